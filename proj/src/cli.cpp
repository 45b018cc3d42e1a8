#include "ctm/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctm/analysis.hpp"
#include "ctm/bifurcation.hpp"
#include "ctm/csv.hpp"
#include "ctm/dynamics.hpp"
#include "ctm/errors.hpp"
#include "ctm/ltm.hpp"
#include "ctm/network.hpp"
#include "ctm/reduced.hpp"
#include "ctm/run_config.hpp"

namespace ctm::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string optional_csv(const std::optional<double>& v) {
    return v ? csv::format_double(*v) : std::string();
}

class Output {
public:
    explicit Output(const RunConfig& cfg) : dir_(cfg.out), header_(cfg.header_lines()) {
        fs::create_directories(dir_);
    }

    fs::path path(const std::string& name) const { return dir_ / name; }
    const std::vector<std::string>& header() const { return header_; }

    std::ofstream open(const std::string& name) const {
        std::ofstream f(path(name), std::ios::binary);
        if (!f) throw UsageError("cannot write " + path(name).string());
        return f;
    }

    void write_json(const std::string& name, const json& body) const {
        auto f = open(name);
        csv::write_header(f, header_);
        f << body.dump(2) << '\n';
    }

private:
    fs::path dir_;
    std::vector<std::string> header_;
};

CtmParams ctm_params(const RunConfig& cfg) {
    CtmParams p;
    p.u0 = cfg.u0;
    p.kappa = cfg.kappa;
    p.kappa_s = cfg.kappa_s;
    p.v = cfg.v;
    if (cfg.fixed_u >= 0.0) {
        p.gain_mode = GainMode::Fixed;
        p.fixed_u = cfg.fixed_u;
    }
    return p;
}

IntegratorConfig integrator(const RunConfig& cfg) {
    IntegratorConfig ic;
    if (cfg.method == "rk4")
        ic.method = Method::RK4Fixed;
    else if (cfg.method == "rk45")
        ic.method = Method::RK45Adaptive;
    else
        throw UsageError("--method must be rk4 or rk45");
    ic.dt = cfg.dt;
    ic.t_end = cfg.t_end;
    ic.record_every = cfg.record_every;
    return ic;
}

json config_json(const RunConfig& cfg) {
    json j;
    for (const auto& line : cfg.header_lines()) {
        const auto eq = line.find('=');
        j[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return j;
}

json response_json(const ResponseClass& r) {
    return json{{"kind", to_string(r.kind)},
                {"jump_time", optional_json(r.jump_time)},
                {"jump_magnitude", optional_json(r.jump_magnitude)},
                {"u_at_jump", optional_json(r.u_at_jump)}};
}

json transition_json(const TransitionReport& r) {
    return json{{"N", r.N},
                {"n", r.n},
                {"exists", r.exists},
                {"y_star_0", optional_json(r.y_star_0)},
                {"y_star_1", optional_json(r.y_star_1)},
                {"u_star", optional_json(r.u_star)},
                {"eps_star", optional_json(r.eps_star)},
                {"lambda3_max", r.lambda3_max},
                {"y_at_lambda3_max", r.y_at_lambda3_max},
                {"sign_changes", r.sign_changes},
                {"scan", {{"y_min", r.scan_min}, {"y_max", r.scan_max}, {"points", r.scan_points}}}};
}

// ---------------------------------------------------------------------------

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    const Network net = build_three_cluster({cfg.N, cfg.n, cfg.eps});
    const CtmParams params = ctm_params(cfg);
    InputSchedule input;
    if (cfg.beta != 0.0) {
        input.perturbed_agent = cfg.perturbed;
        input.beta = cfg.beta;
    }
    const auto x0 = negative_mean_initial_state(cfg.N, cfg.perturbed, cfg.seed);
    Trajectory traj = simulate(net, params, x0, 0.0, input, integrator(cfg));
    traj.config = {{"seed", std::to_string(cfg.seed)}};

    const Output o(cfg);
    {
        auto f = o.open("trajectory.csv");
        write_trajectory_csv(f, traj, o.header());
    }
    std::set<int> exclude;
    if (input.perturbed_agent) exclude.insert(*input.perturbed_agent);
    const auto coherence = cluster_coherence(traj, net, exclude);
    {
        auto f = o.open("coherence.csv");
        write_coherence_csv(f, coherence, o.header());
    }
    o.write_json("trajectory.json", json{{"config", config_json(cfg)},
                                         {"rng_seed", cfg.seed},
                                         {"initial_state", x0},
                                         {"initial_x_bar_s", 0.0}});

    json summary;
    summary["samples"] = traj.samples();
    summary["t_final"] = traj.times.back();
    summary["steady_state_reached"] = traj.steady_state_reached;
    summary["final_x_bar"] = traj.x_bar_series.back();
    summary["final_u"] = traj.u_series.back();
    const auto& last = coherence.back().spread;
    summary["final_spread"] = {last[0], last[1], last[2]};
    const auto final_state = traj.final_state();
    summary["argmax_agent"] =
        std::distance(final_state.begin(), std::max_element(final_state.begin(), final_state.end()));
    try {
        ResponseThresholds th;
        th.settle_time = cfg.settle_time;
        summary["response"] = response_json(classify_response(traj, th));
    } catch (const UsageError& e) {
        summary["response"] = json{{"kind", "inconclusive"}, {"reason", e.what()}};
    }
    o.write_json("classification.json", summary);
    out << summary.dump(2) << '\n';
    return kExitOk;
}

int cmd_reduce(const RunConfig& cfg, std::ostream& out) {
    const ReducedModel model{cfg.N, cfg.n, cfg.eps, cfg.beta};
    model.validate();
    // cluster averages of the same seeded initial state `simulate` uses
    const auto x0 = negative_mean_initial_state(cfg.N, cfg.perturbed, cfg.seed);
    ReducedState y0;
    for (int i = 0; i < cfg.N; ++i) {
        if (i < cfg.n) y0.y1 += x0[i] / cfg.n;
        else if (i < 2 * cfg.n) y0.y2 += x0[i] / cfg.n;
        else y0.y3 += x0[i] / (cfg.N - 2 * cfg.n);
    }
    const auto traj = simulate_reduced(model, ctm_params(cfg), y0, 0.0, integrator(cfg));

    const Output o(cfg);
    auto f = o.open("reduced.csv");
    csv::write_header(f, o.header());
    f << "t,y1,y2,y3,y_bar,u,x_bar_s\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const auto& y = traj.states[k];
        f << csv::format_double(traj.times[k]) << ',' << csv::format_double(y.y1) << ','
          << csv::format_double(y.y2) << ',' << csv::format_double(y.y3) << ','
          << csv::format_double(traj.y_bar[k]) << ',' << csv::format_double(traj.u_series[k])
          << ',' << csv::format_double(traj.x_bar_s_series[k]) << '\n';
    }
    ResponseThresholds th;
    th.settle_time = cfg.settle_time;
    const auto cls = classify_response(traj.times, traj.y_bar, traj.u_series, th);
    json summary{{"samples", traj.times.size()},
                 {"final_y_bar", traj.y_bar.back()},
                 {"final_u", traj.u_series.back()},
                 {"response", response_json(cls)}};
    o.write_json("reduced_summary.json", summary);
    out << summary.dump(2) << '\n';
    return kExitOk;
}

int cmd_bifurcate(const RunConfig& cfg, std::ostream& out) {
    const TransitionReport tr = find_transition(cfg.N, cfg.n);
    json report;
    report["transition"] = transition_json(tr);

    json pitchfork{{"epsilon", cfg.eps}};
    try {
        const PitchforkClass pc = classify_pitchfork(cfg.N, cfg.n, cfg.eps);
        pitchfork["kind"] = to_string(pc.kind);
        pitchfork["u_c"] = pc.u_c;
        pitchfork["y_star_at_uc"] = pc.y_star_at_uc;
        pitchfork["lambda3_at_uc"] = pc.lambda3_at_uc;
    } catch (const DegeneratePitchfork& e) {
        pitchfork["kind"] = "degenerate";
        pitchfork["reason"] = e.what();
    }
    report["pitchfork"] = pitchfork;
    report["eps_star"] = optional_json(tr.eps_star);

    Output(cfg).write_json("bifurcation.json", report);
    out << report.dump(2) << '\n';
    return kExitOk;
}

void write_lambda3_curve(const Output& o, int N, int n) {
    auto f = o.open("lambda3_N" + std::to_string(N) + "_n" + std::to_string(n) + ".csv");
    csv::write_header(f, o.header());
    f << "y_star,lambda3\n";
    for (const auto& s : lambda3_curve(N, n))
        f << csv::format_double(s.y_star) << ',' << csv::format_double(s.lambda3) << '\n';
}

int sweep_impl(const RunConfig& cfg, bool curves, const std::vector<int>& curve_ns,
               std::ostream& out) {
    const int n_max = cfg.n_max > 0 ? cfg.n_max : (cfg.N - 1) / 2;
    const auto reports = transition_sweep(cfg.N, cfg.n_min, n_max);
    const Output o(cfg);
    {
        auto f = o.open("sweep.csv");
        csv::write_header(f, o.header());
        f << "N,n,exists,y_star_0,y_star_1,u_star,eps_star\n";
        for (const auto& r : reports)
            f << r.N << ',' << r.n << ',' << (r.exists ? "true" : "false") << ','
              << optional_csv(r.y_star_0) << ',' << optional_csv(r.y_star_1) << ','
              << optional_csv(r.u_star) << ',' << optional_csv(r.eps_star) << '\n';
    }
    for (const auto& r : reports)
        if (curves || std::find(curve_ns.begin(), curve_ns.end(), r.n) != curve_ns.end())
            write_lambda3_curve(o, r.N, r.n);

    json summary{{"N", cfg.N}, {"n_min", cfg.n_min}, {"n_max", n_max}};
    const auto first = std::find_if(reports.begin(), reports.end(),
                                    [](const TransitionReport& r) { return r.exists; });
    summary["min_n_for_cascade"] = first != reports.end() ? json(first->n) : json(nullptr);
    out << summary.dump(2) << '\n';
    return kExitOk;
}

int cmd_branch(const RunConfig& cfg, std::ostream& out) {
    const double ceiling = 1.5 * (cfg.N - 1.0) / (cfg.N - 2 * cfg.n - 1);
    const double u_max = cfg.u_max > 0.0 ? cfg.u_max : ceiling;
    const auto diagram =
        branch_continuation(cfg.N, cfg.n, cfg.eps, cfg.u_min, u_max, cfg.u_steps, cfg.beta);
    const Output o(cfg);
    {
        auto f = o.open("branch.csv");
        write_branch_csv(f, diagram, o.header());
    }
    json summary{{"points", diagram.points.size()}};
    summary["symmetric_instability_onset"] = optional_json(symmetric_instability_onset(diagram));
    int failed = 0;
    bool boundary = false;
    for (const auto& p : diagram.points) {
        failed += p.newton_failed;
        boundary = boundary || p.near_lattice_boundary;
    }
    summary["newton_failed_points"] = failed;
    summary["near_lattice_boundary"] = boundary;
    out << summary.dump(2) << '\n';
    return kExitOk;
}

AgentSet parse_seeds(const std::string& text) {
    AgentSet seeds;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            std::size_t used = 0;
            const int v = std::stoi(item, &used);
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
            seeds.insert(v);
        } catch (const std::logic_error&) {
            throw UsageError("--seeds: cannot parse `" + item + "`");
        }
    }
    return seeds;
}

int cmd_ltm_compare(const RunConfig& cfg, std::ostream& out) {
    Network net;
    if (!cfg.edges.empty()) {
        if (cfg.thresholds.empty()) throw UsageError("--edges requires --thresholds");
        const EdgeList list = read_edge_list(cfg.edges);
        net = build_from_edges(list.size, list.edges, read_thresholds(cfg.thresholds));
    } else {
        net = build_three_cluster({cfg.N, cfg.n, cfg.eps});
    }
    const AgentSet seeds = parse_seeds(cfg.seeds);
    const auto report = ctm_ltm_agreement(net, seeds, cfg.v, default_agreement_integrator());

    json j{{"v", cfg.v},
           {"seeds", std::vector<int>(seeds.begin(), seeds.end())},
           {"ctm_active_set", std::vector<int>(report.ctm_active.begin(), report.ctm_active.end())},
           {"ltm_active_set", std::vector<int>(report.ltm_active.begin(), report.ltm_active.end())},
           {"match", report.match},
           {"switch_order_match", report.switch_order_match},
           {"ltm_converged", report.ltm_converged},
           {"ctm_steady", report.ctm_steady},
           {"marginal", report.marginal},
           {"conclusive", report.conclusive()},
           {"ltm_rounds", report.ltm_rounds},
           {"ctm_switch_times", report.ctm_switch_times}};
    Output(cfg).write_json("ltm_compare.json", j);
    out << j.dump(2) << '\n';
    return kExitOk;
}

RunConfig fig5_config(RunConfig cfg) {
    cfg.N = 11;
    cfg.n = 4;
    cfg.eps = 0.2;
    cfg.u0 = 3.0;
    cfg.kappa = 10.0;
    cfg.kappa_s = 0.05;
    cfg.v = 1.0;
    cfg.fixed_u = -1.0;
    cfg.beta = 1.0;
    cfg.perturbed = 0;
    cfg.dt = 0.01;
    cfg.t_end = 200.0;
    cfg.method = "rk4";
    return cfg;
}

RunConfig fig3_config(RunConfig cfg) {
    cfg.N = 100;
    cfg.n_min = 2;
    cfg.n_max = 49;
    return cfg;
}

// ---------------------------------------------------------------------------

std::set<std::string> keys_in(const std::string& text) {
    std::set<std::string> keys;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        line = line.substr(0, line.find('#'));
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const auto first = line.find_first_not_of(" \t");
        const auto last = line.find_last_not_of(" \t", eq - 1);
        if (first < eq) keys.insert(line.substr(first, last - first + 1));
    }
    return keys;
}

std::optional<std::string> find_config_path(int argc, const char* const* argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
        if (a.rfind("--config=", 0) == 0) return a.substr(9);
    }
    return std::nullopt;
}

void add_shared(CLI::App* sub, RunConfig& cfg, std::string& config_path) {
    sub->add_option("--N", cfg.N, "total number of agents");
    sub->add_option("--n", cfg.n, "size of clusters 1 and 2");
    sub->add_option("--eps", cfg.eps, "threshold disparity half-width");
    sub->add_option("--u0", cfg.u0, "maximal social sensitivity");
    sub->add_option("--kappa", cfg.kappa, "gain saturation rate");
    sub->add_option("--kappa-s", cfg.kappa_s, "slow filter rate");
    sub->add_option("--v", cfg.v, "social effort gain");
    sub->add_option("--beta", cfg.beta, "additive input on the perturbed agent");
    sub->add_option("--seed", cfg.seed, "RNG seed for initial conditions");
    sub->add_option("--dt", cfg.dt, "integration step");
    sub->add_option("--t-end", cfg.t_end, "integration horizon");
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--config", config_path, "key=value config file (flags override it)");
    sub->add_option("--fixed-u", cfg.fixed_u, "hold u fixed at this value (negative: feedback)");
    sub->add_option("--perturbed", cfg.perturbed, "index of the agent receiving beta");
    sub->add_option("--record-every", cfg.record_every, "record every k-th step");
    sub->add_option("--method", cfg.method, "rk4 or rk45");
    sub->add_option("--settle-time", cfg.settle_time, "ignore jumps starting before this time");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    std::string config_path;
    std::set<std::string> config_keys;
    try {
        if (auto path = find_config_path(argc, argv)) {
            std::ifstream f(*path);
            if (!f) throw UsageError("cannot read config file " + *path);
            std::stringstream text;
            text << f.rdbuf();
            cfg = RunConfig::from_text(text.str(), cfg);
            config_keys = keys_in(text.str());
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    CLI::App app{"Continuous threshold model: simulation and pitchfork analysis"};
    app.require_subcommand(1);
    std::vector<CLI::App*> subs;
    auto add = [&](const char* name, const char* help) {
        CLI::App* s = app.add_subcommand(name, help);
        add_shared(s, cfg, config_path);
        subs.push_back(s);
        return s;
    };
    add("simulate", "simulate the full N-agent CTM");
    add("reduce", "simulate the three-dimensional reduced system");
    add("bifurcate", "transition report and pitchfork class for (N, n, eps)");
    auto* sweep = add("sweep", "transition existence over n for fixed N");
    sweep->add_option("--n-min", cfg.n_min, "smallest n");
    sweep->add_option("--n-max", cfg.n_max, "largest n (default (N-1)/2)");
    bool curves = false;
    sweep->add_flag("--curves", curves, "also write lambda3 curves per n");
    auto* branch = add("branch", "equilibrium branches of the reduced system over u");
    branch->add_option("--u-min", cfg.u_min, "smallest u");
    branch->add_option("--u-max", cfg.u_max, "largest u (default 1.5 (N-1)/(N-2n-1))");
    branch->add_option("--u-steps", cfg.u_steps, "number of u values");
    auto* ltm = add("ltm-compare", "compare the large-v CTM with the discrete LTM");
    ltm->add_option("--edges", cfg.edges, "edge-list file");
    ltm->add_option("--thresholds", cfg.thresholds, "thresholds file");
    ltm->add_option("--seeds", cfg.seeds, "comma-separated seed agents");
    auto* reproduce = add("reproduce", "canned configurations");
    std::string target;
    reproduce->add_option("target", target, "fig3 or fig5")->required()->check(CLI::IsMember({"fig3", "fig5"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    try {
        // per-command defaults that differ from the simulation defaults
        if (ltm->parsed() && ltm->count("--v") == 0 && !config_keys.count("v")) cfg.v = 200.0;
        if (branch->parsed() && branch->count("--beta") == 0 && !config_keys.count("beta"))
            cfg.beta = 0.0;
        for (auto* s : subs)
            if (s->parsed()) cfg.command = s->get_name();

        if (cfg.command == "simulate") return cmd_simulate(cfg, out);
        if (cfg.command == "reduce") return cmd_reduce(cfg, out);
        if (cfg.command == "bifurcate") return cmd_bifurcate(cfg, out);
        if (cfg.command == "sweep") return sweep_impl(cfg, curves, {}, out);
        if (cfg.command == "branch") return cmd_branch(cfg, out);
        if (cfg.command == "ltm-compare") return cmd_ltm_compare(cfg, out);
        if (target == "fig5") {
            cfg = fig5_config(cfg);
            cfg.command = "reproduce fig5";
            return cmd_simulate(cfg, out);
        }
        cfg = fig3_config(cfg);
        cfg.command = "reproduce fig3";
        return sweep_impl(cfg, false, {20, 25, 27, 30, 35, 40, 45}, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigurationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace ctm::cli
