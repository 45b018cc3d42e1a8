#include "ctm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "ctm/csv.hpp"
#include "ctm/errors.hpp"
#include "ctm/kernels.hpp"

namespace ctm {

void CtmParams::validate() const {
    if (!(u0 > 0.0)) throw UsageError("u0 must be > 0");
    if (!(kappa > 0.0)) throw UsageError("kappa must be > 0");
    if (!(kappa_s > 0.0)) throw UsageError("kappa_s must be > 0");
    if (!(v > 0.0)) throw UsageError("v must be > 0");
    if (gain_mode == GainMode::Fixed && !(fixed_u >= 0.0))
        throw UsageError("fixed gain must be >= 0");
}

void InputSchedule::validate(int agents) const {
    if (perturbed_agent && (*perturbed_agent < 0 || *perturbed_agent >= agents))
        throw UsageError("perturbed agent index out of range");
    if (!std::isfinite(beta)) throw UsageError("beta must be finite");
    for (int p : pinned_agents)
        if (p < 0 || p >= agents) throw UsageError("pinned agent index out of range");
}

double control_gain(const CtmParams& params, const ControllerState& controller) {
    if (params.gain_mode != GainMode::Feedback)
        throw UsageError("control_gain requires feedback gain mode");
    return params.u0 * params.sigmoid(params.kappa * std::abs(controller.x_bar_s));
}

double effective_gain(const CtmParams& params, const ControllerState& controller) {
    return params.gain_mode == GainMode::Fixed ? params.fixed_u : control_gain(params, controller);
}

namespace {

bool use_parallel(Execution exec, int agents) {
    switch (exec) {
        case Execution::Serial: return false;
        case Execution::Parallel: return true;
        case Execution::Auto: return agents >= kernels::kParallelMinAgents;
    }
    return false;
}

double mean(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Shared by ctm_vector_field and simulate, which keeps its scratch alive.
double evaluate_field(const Network& net, const CtmParams& params, std::span<const double> x,
                      const ControllerState& controller, const InputSchedule& input, double t,
                      std::span<double> dx, std::span<double> scratch, bool parallel) {
    const double u = effective_gain(params, controller);
    if (parallel)
        kernels::ctm_drift_parallel(net, params.sigmoid, u, params.v, x, dx, scratch);
    else
        kernels::ctm_drift_serial(net, params.sigmoid, u, params.v, x, dx, scratch);
    if (input.input_active(t)) dx[*input.perturbed_agent] += input.beta;
    for (int p : input.pinned_agents) dx[p] = 0.0;
    if (params.gain_mode == GainMode::Fixed) return 0.0;
    return params.kappa_s * (mean(x) - controller.x_bar_s);
}

}  // namespace

double ctm_vector_field(const Network& network, const CtmParams& params,
                        std::span<const double> state, const ControllerState& controller,
                        const InputSchedule& input, double t, std::span<double> dx, Execution exec) {
    if (static_cast<int>(state.size()) != network.size || static_cast<int>(dx.size()) != network.size)
        throw UsageError("state dimension " + std::to_string(state.size()) +
                         " does not match network size " + std::to_string(network.size));
    std::vector<double> scratch(state.size());
    return evaluate_field(network, params, state, controller, input, t, dx, scratch,
                          use_parallel(exec, network.size));
}

Trajectory simulate(const Network& network, const CtmParams& params,
                    std::span<const double> initial_state, double initial_x_bar_s,
                    const InputSchedule& input, const IntegratorConfig& integ, Execution exec) {
    params.validate();
    input.validate(network.size);
    integ.validate();
    const int N = network.size;
    if (static_cast<int>(initial_state.size()) != N)
        throw UsageError("initial state dimension does not match network size");
    if (!std::isfinite(initial_x_bar_s)) throw UsageError("initial x_bar_s must be finite");

    const bool parallel = use_parallel(exec, N);
    std::vector<double> scratch(N);
    VectorField field = [&](double t, std::span<const double> z, std::span<double> dz) {
        const ControllerState controller{z[N]};
        dz[N] = evaluate_field(network, params, z.first(N), controller, input, t, dz.first(N),
                               scratch, parallel);
    };

    std::vector<double> z0(initial_state.begin(), initial_state.end());
    z0.push_back(initial_x_bar_s);
    const Solution sol = integrate(field, z0, integ);

    Trajectory traj;
    traj.agents = N;
    traj.steady_state_reached = sol.steady_state_reached;
    traj.times = sol.times;
    traj.states.reserve(sol.samples() * N);
    for (std::size_t k = 0; k < sol.samples(); ++k) {
        const auto z = sol.state(k);
        traj.states.insert(traj.states.end(), z.begin(), z.begin() + N);
        traj.x_bar_series.push_back(mean(z.first(N)));
        traj.x_bar_s_series.push_back(z[N]);
        traj.u_series.push_back(effective_gain(params, ControllerState{z[N]}));
    }
    return traj;
}

std::vector<double> negative_mean_initial_state(int agents, int perturbed, std::uint64_t seed) {
    if (agents <= 0) throw UsageError("agent count must be positive");
    if (perturbed < 0 || perturbed >= agents) throw UsageError("perturbed agent out of range");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.5, -0.1);
    std::vector<double> x(agents);
    for (auto& xi : x) xi = dist(rng);
    x[perturbed] = -0.1;
    return x;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const std::vector<std::string>& header) {
    csv::write_header(out, header);
    out << "t";
    for (int i = 0; i < traj.agents; ++i) out << ",x_" << i;
    out << ",u,x_bar,x_bar_s\n";
    for (std::size_t k = 0; k < traj.samples(); ++k) {
        out << csv::format_double(traj.times[k]);
        for (double x : traj.state(k)) out << ',' << csv::format_double(x);
        out << ',' << csv::format_double(traj.u_series[k]) << ','
            << csv::format_double(traj.x_bar_series[k]) << ','
            << csv::format_double(traj.x_bar_s_series[k]) << '\n';
    }
}

}  // namespace ctm
