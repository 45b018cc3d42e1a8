#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "ctm/analysis.hpp"
#include "ctm/dynamics.hpp"
#include "ctm/errors.hpp"
#include "ctm/kernels.hpp"
#include "ctm/network.hpp"

using namespace ctm;
using Catch::Approx;

namespace {

constexpr double kTanh1 = 0.7615941559557649;

CtmParams fixed_gain(double u) {
    CtmParams p;
    p.gain_mode = GainMode::Fixed;
    p.fixed_u = u;
    return p;
}

InputSchedule kick(int agent, double beta) {
    InputSchedule in;
    in.perturbed_agent = agent;
    in.beta = beta;
    return in;
}

Trajectory fig5_run(Method method, double t_end = 200.0) {
    const Network net = build_three_cluster({11, 4, 0.2});
    IntegratorConfig ic;
    ic.method = method;
    ic.t_end = t_end;
    ic.record_every = 10;
    return simulate(net, CtmParams{}, negative_mean_initial_state(11, 0, 1), 0.0, kick(0, 1.0), ic);
}

}  // namespace

TEST_CASE("vector field at the origin", "[dynamics]") {
    const Network net = build_three_cluster({11, 4, 0.2});
    const std::vector<double> x(11, 0.0);
    std::vector<double> dx(11);
    for (double u : {0.0, 0.5, 3.0}) {
        const double dxs = ctm_vector_field(net, fixed_gain(u), x, {0.0}, {}, 0.0, dx);
        CHECK(dxs == 0.0);
        for (int i = 0; i < 4; ++i) CHECK(dx[i] == Approx(2.4).epsilon(1e-14));
        for (int i = 4; i < 8; ++i) CHECK(dx[i] == Approx(-2.4).epsilon(1e-14));
        for (int i = 8; i < 11; ++i) CHECK(dx[i] == 0.0);
    }

    const Network sym = build_three_cluster({11, 4, 0.0});
    ctm_vector_field(sym, CtmParams{}, x, {0.0}, {}, 0.0, dx);
    for (double d : dx) CHECK(d == 0.0);

    ctm_vector_field(sym, CtmParams{}, x, {0.0}, kick(2, 1.0), 0.0, dx);
    for (int i = 0; i < 11; ++i) CHECK(dx[i] == (i == 2 ? 1.0 : 0.0));

    std::vector<double> wrong(10, 0.0);
    CHECK_THROWS_AS(ctm_vector_field(sym, CtmParams{}, wrong, {0.0}, {}, 0.0, dx), UsageError);
}

TEST_CASE("vector field against an elementwise oracle", "[dynamics]") {
    const Network net = build_three_cluster({13, 4, 0.15});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    std::vector<double> x(13), dx(13);
    for (double& xi : x) xi = d(rng);
    CtmParams p;
    p.v = 1.7;
    const ControllerState c{-0.08};
    const double xs_dot = ctm_vector_field(net, p, x, c, kick(5, 0.4), 1.0, dx);
    const double u = 3.0 * std::tanh(10.0 * 0.08);
    for (int i = 0; i < 13; ++i) {
        double expected = -net.degrees[i] * x[i] + net.degrees[i] * (1.0 - 2.0 * net.thresholds[i]);
        for (int j = 0; j < 13; ++j)
            if (net.adjacent(i, j)) expected += u * std::tanh(1.7 * x[j]);
        if (i == 5) expected += 0.4;
        CHECK(dx[i] == Approx(expected).margin(1e-12));
    }
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / 13;
    CHECK(xs_dot == Approx(0.05 * (mean + 0.08)).margin(1e-15));
}

TEST_CASE("control gain", "[dynamics]") {
    const CtmParams p;
    CHECK(control_gain(p, {0.0}) == 0.0);
    CHECK(control_gain(p, {0.1}) == Approx(3.0 * kTanh1).epsilon(1e-14));
    CHECK(control_gain(p, {10.0}) == Approx(3.0).epsilon(1e-15));
    CHECK(control_gain(p, {-10.0}) == control_gain(p, {10.0}));
    CHECK(control_gain(p, {-0.3}) == control_gain(p, {0.3}));
    CHECK_THROWS_AS(control_gain(fixed_gain(1.0), {0.1}), UsageError);
    CHECK(effective_gain(fixed_gain(1.25), {0.4}) == 1.25);
}

TEST_CASE("parameter validation", "[dynamics]") {
    CtmParams p;
    p.kappa = 0.0;
    CHECK_THROWS_AS(p.validate(), UsageError);
    CHECK_THROWS_AS(fixed_gain(-1.0).validate(), UsageError);
    CHECK_THROWS_AS(kick(11, 1.0).validate(11), UsageError);
}

TEST_CASE("symmetric rest point is exact", "[dynamics]") {
    const Network net = build_three_cluster({11, 4, 0.0});
    IntegratorConfig ic;
    ic.steady_tol = 0.0;
    ic.t_end = 20.0;
    const auto traj = simulate(net, CtmParams{}, std::vector<double>(11, 0.0), 0.0, {}, ic);
    CHECK(std::all_of(traj.states.begin(), traj.states.end(), [](double v) { return v == 0.0; }));
    CHECK(std::all_of(traj.x_bar_s_series.begin(), traj.x_bar_s_series.end(),
                      [](double v) { return v == 0.0; }));
}

TEST_CASE("zero fixed gain decouples the agents", "[dynamics]") {
    const Network net = build_three_cluster({11, 4, 0.2});
    IntegratorConfig ic;
    ic.t_end = 10.0;  // slowest rate is 6, so e^-60 is far below tolerance
    ic.steady_tol = 0.0;
    const auto traj = simulate(net, fixed_gain(0.0), negative_mean_initial_state(11, 0, 5), 0.0, {}, ic);
    const auto x = traj.final_state();
    for (int i = 0; i < 11; ++i) CHECK(std::abs(x[i] - (1.0 - 2.0 * net.thresholds[i])) <= 1e-8);
}

TEST_CASE("swapping two same-cluster agents permutes the trajectory", "[dynamics]") {
    const Network net = build_three_cluster({11, 4, 0.2});
    auto x0 = negative_mean_initial_state(11, 0, 9);
    IntegratorConfig ic;
    ic.t_end = 30.0;
    const auto a = simulate(net, CtmParams{}, x0, 0.0, kick(0, 1.0), ic);
    std::swap(x0[5], x0[6]);
    const auto b = simulate(net, CtmParams{}, x0, 0.0, kick(0, 1.0), ic);
    REQUIRE(a.samples() == b.samples());
    double worst = 0.0;
    for (std::size_t k = 0; k < a.samples(); ++k)
        for (int i = 0; i < 11; ++i) {
            const int j = i == 5 ? 6 : i == 6 ? 5 : i;
            worst = std::max(worst, std::abs(a.state(k)[i] - b.state(k)[j]));
        }
    CHECK(worst <= 1e-12);
}

TEST_CASE("serial and parallel kernels are bit-identical", "[dynamics][parallel]") {
    for (int N : {11, 300, 1001}) {
        const Network net = build_three_cluster({N, N / 3, 0.1});
        std::mt19937_64 rng(N);
        std::normal_distribution<double> d;
        std::vector<double> x(N), a(N), b(N), ca(N), cb(N);
        for (double& v : x) v = d(rng);
        kernels::ctm_drift_serial(net, Sigmoid{}, 1.3, 2.0, x, a, ca);
        kernels::ctm_drift_parallel(net, Sigmoid{}, 1.3, 2.0, x, b, cb);
        CHECK(a == b);

        IntegratorConfig ic;
        ic.t_end = 2.0;
        ic.dt = std::min(0.01, 2.0 / N);  // RK4 stability: dt * degree below ~2.8
        const auto x0 = negative_mean_initial_state(N, 0, 2);
        const auto ts = simulate(net, CtmParams{}, x0, 0.0, kick(0, 1.0), ic, Execution::Serial);
        const auto tp = simulate(net, CtmParams{}, x0, 0.0, kick(0, 1.0), ic, Execution::Parallel);
        CHECK(ts.states == tp.states);
        CHECK(ts.u_series == tp.u_series);
    }
}

TEST_CASE("negative-mean initial states", "[dynamics]") {
    const auto a = negative_mean_initial_state(11, 3, 42);
    CHECK(a == negative_mean_initial_state(11, 3, 42));
    CHECK(a != negative_mean_initial_state(11, 3, 43));
    CHECK(a[3] == -0.1);
    for (double v : a) {
        CHECK(v >= -1.5);
        CHECK(v <= -0.1);
    }
}

TEST_CASE("the example configuration cascades and collapses onto clusters", "[dynamics]") {
    const Trajectory traj = fig5_run(Method::RK4Fixed);
    const double mean0 = traj.x_bar_series.front();
    CHECK(mean0 < 0.0);
    for (double u : traj.u_series) {
        CHECK(u >= 0.0);
        CHECK(u < 3.0 + 1e-15);
    }
    ResponseThresholds th;
    th.settle_time = 10.0;
    const auto cls = classify_response(traj, th);
    CHECK(cls.kind == ResponseKind::Cascade);

    const Network net = build_three_cluster({11, 4, 0.2});
    const auto spread = cluster_coherence(traj, net, {0});
    for (const auto& s : spread)
        if (s.t >= 50.0 - 1e-9) {
            for (double v : s.spread) CHECK(v < 1e-6);
        }
    const auto x = traj.final_state();
    CHECK(std::max_element(x.begin(), x.end()) - x.begin() == 0);
}

TEST_CASE("adaptive and fixed-step runs agree on the example configuration", "[dynamics][integrator]") {
    const Trajectory a = fig5_run(Method::RK4Fixed);
    const Trajectory b = fig5_run(Method::RK45Adaptive);
    REQUIRE(a.samples() == b.samples());
    double worst = 0.0;
    for (std::size_t k = 0; k < a.samples(); ++k) {
        CHECK(a.times[k] == Approx(b.times[k]).margin(1e-9));
        for (int i = 0; i < a.agents; ++i)
            worst = std::max(worst, std::abs(a.state(k)[i] - b.state(k)[i]));
    }
    INFO("sup-norm difference " << worst);
    CHECK(worst <= 1e-6);
}

TEST_CASE("trajectory CSV layout", "[dynamics]") {
    const Trajectory traj = fig5_run(Method::RK4Fixed, 1.0);
    std::ostringstream out;
    write_trajectory_csv(out, traj, {"N=11", "seed=1"});
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "# N=11");
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line.rfind("t,x_0,x_1,", 0) == 0);
    CHECK(line.find(",x_10,u,x_bar,x_bar_s") != std::string::npos);
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == static_cast<int>(traj.samples()));
}
