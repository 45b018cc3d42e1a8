#include "ctm/ltm.hpp"

#include <cmath>

#include "ctm/dynamics.hpp"
#include "ctm/errors.hpp"

namespace ctm {

namespace {

void check_agents(const Network& net, const AgentSet& set, const char* what) {
    for (int i : set)
        if (i < 0 || i >= net.size)
            throw UsageError(std::string(what) + " contains out-of-range agent " + std::to_string(i));
}

double active_fraction(const Network& net, int i, const std::vector<char>& active) {
    int count = 0;
    for (int j = 0; j < net.size; ++j)
        if (net.adjacent(i, j) && active[j]) ++count;
    return static_cast<double>(count) / net.degrees[i];
}

std::vector<char> as_mask(const Network& net, const AgentSet& set) {
    std::vector<char> mask(net.size, 0);
    for (int i : set) mask[i] = 1;
    return mask;
}

}  // namespace

AgentSet ltm_step(const Network& network, const AgentSet& active, const AgentSet& seeds) {
    check_agents(network, active, "active set");
    check_agents(network, seeds, "seed set");
    for (int i = 0; i < network.size; ++i)
        if (network.degrees[i] == 0)
            throw ConfigurationError("LTM undefined for isolated agent " + std::to_string(i));
    const auto mask = as_mask(network, active);
    AgentSet next = seeds;
    for (int i = 0; i < network.size; ++i)
        if (active_fraction(network, i, mask) > network.thresholds[i]) next.insert(i);
    return next;
}

LtmResult ltm_fixed_point(const Network& network, const AgentSet& seeds) {
    LtmResult result;
    result.activation_round.assign(network.size, -1);
    for (int s : seeds) {
        if (s < 0 || s >= network.size) throw UsageError("seed out of range: " + std::to_string(s));
        result.activation_round[s] = 0;
    }
    AgentSet current = seeds;
    const int limit = 4 * network.size;
    for (int round = 1; round <= limit; ++round) {
        AgentSet next = ltm_step(network, current, seeds);
        result.rounds = round;
        if (next == current) {
            result.converged = true;
            break;
        }
        for (int i : next)
            if (result.activation_round[i] < 0) result.activation_round[i] = round;
        // agents that dropped out lose their recorded round
        for (int i : current)
            if (!next.count(i) && !seeds.count(i)) result.activation_round[i] = -1;
        current = std::move(next);
    }
    result.active = std::move(current);
    return result;
}

IntegratorConfig default_agreement_integrator() {
    IntegratorConfig cfg;
    cfg.method = Method::RK45Adaptive;
    cfg.dt = 0.005;
    cfg.t_end = 60.0;
    cfg.steady_tol = 1e-9;
    cfg.record_every = 1;
    return cfg;
}

AgreementReport ctm_ltm_agreement(const Network& network, const AgentSet& seeds, double v,
                                  const IntegratorConfig& integ) {
    if (!(v > 0.0)) throw UsageError("v must be > 0");
    AgreementReport report;

    const LtmResult ltm = ltm_fixed_point(network, seeds);
    report.ltm_active = ltm.active;
    report.ltm_converged = ltm.converged;
    report.ltm_rounds = ltm.activation_round;
    const auto ltm_mask = as_mask(network, ltm.active);
    for (int i = 0; i < network.size; ++i)
        if (!seeds.count(i) &&
            std::abs(active_fraction(network, i, ltm_mask) - network.thresholds[i]) <= 1e-12)
            report.marginal = true;

    CtmParams params;
    params.gain_mode = GainMode::Fixed;
    params.fixed_u = 1.0;
    params.v = v;
    InputSchedule input;
    input.pinned_agents.assign(seeds.begin(), seeds.end());
    std::vector<double> x0(network.size, -1.0);
    for (int s : seeds) x0[s] = 3.0;

    const Trajectory traj = simulate(network, params, x0, 0.0, input, integ);
    report.ctm_steady = traj.steady_state_reached;

    const auto final_state = traj.final_state();
    for (int i = 0; i < network.size; ++i)
        if (final_state[i] > 0.0) report.ctm_active.insert(i);

    report.ctm_switch_times.assign(network.size, -1.0);
    for (int i = 0; i < network.size; ++i) {
        if (seeds.count(i)) continue;
        for (std::size_t k = 1; k < traj.samples(); ++k) {
            const double a = traj.state(k - 1)[i];
            const double b = traj.state(k)[i];
            if (a <= 0.0 && b > 0.0) {
                const double t0 = traj.times[k - 1];
                const double t1 = traj.times[k];
                report.ctm_switch_times[i] = t0 + (t1 - t0) * (-a) / (b - a);
                break;
            }
        }
    }

    report.match = report.ctm_active == report.ltm_active;
    report.switch_order_match = report.match;
    if (report.match) {
        for (int i : ltm.active) {
            if (seeds.count(i)) continue;
            if (report.ctm_switch_times[i] < 0.0) report.switch_order_match = false;
            for (int j : ltm.active) {
                if (seeds.count(j)) continue;
                if (ltm.activation_round[i] < ltm.activation_round[j] &&
                    !(report.ctm_switch_times[i] < report.ctm_switch_times[j]))
                    report.switch_order_match = false;
            }
        }
    }
    return report;
}

}  // namespace ctm
