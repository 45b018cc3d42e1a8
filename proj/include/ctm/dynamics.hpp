#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctm/execution.hpp"
#include "ctm/integrator.hpp"
#include "ctm/network.hpp"
#include "ctm/sigmoid.hpp"

namespace ctm {

enum class GainMode { Feedback, Fixed };

/// Control gains of the CTM. In Feedback mode u = u0 S(kappa |x_bar_s|)
/// with the slow filter d(x_bar_s)/dt = kappa_s (x_bar - x_bar_s).
struct CtmParams {
    double u0 = 3.0;
    double kappa = 10.0;
    double kappa_s = 0.05;
    double v = 1.0;
    GainMode gain_mode = GainMode::Feedback;
    double fixed_u = 1.0;  // used in Fixed mode only
    Sigmoid sigmoid{};

    void validate() const;
};

struct ControllerState {
    double x_bar_s = 0.0;
};

/// Exogenous inputs: a constant additive beta on one agent while
/// t is in [t_on, t_off), and agents whose state is held fixed.
struct InputSchedule {
    std::optional<int> perturbed_agent;
    double beta = 0.0;
    double t_on = 0.0;
    double t_off = std::numeric_limits<double>::infinity();
    std::vector<int> pinned_agents;

    bool input_active(double t) const { return perturbed_agent && t >= t_on && t < t_off; }
    void validate(int agents) const;
};

struct Trajectory {
    int agents = 0;
    std::vector<double> times;
    std::vector<double> states;  // row-major, `agents` values per time
    std::vector<double> u_series;
    std::vector<double> x_bar_series;
    std::vector<double> x_bar_s_series;
    bool steady_state_reached = false;
    std::vector<std::pair<std::string, std::string>> config;

    std::size_t samples() const { return times.size(); }
    std::span<const double> state(std::size_t k) const {
        return {states.data() + k * static_cast<std::size_t>(agents),
                static_cast<std::size_t>(agents)};
    }
    std::span<const double> final_state() const { return state(samples() - 1); }
};

/// u0 S(kappa |x_bar_s|). Requires Feedback mode.
double control_gain(const CtmParams& params, const ControllerState& controller);

/// Gain in effect for either mode.
double effective_gain(const CtmParams& params, const ControllerState& controller);

/// Writes the agent derivatives into `dx` and returns d(x_bar_s)/dt
/// (zero in Fixed mode). Pinned agents get a zero derivative.
double ctm_vector_field(const Network& network, const CtmParams& params,
                        std::span<const double> state, const ControllerState& controller,
                        const InputSchedule& input, double t, std::span<double> dx,
                        Execution exec = Execution::Auto);

Trajectory simulate(const Network& network, const CtmParams& params,
                    std::span<const double> initial_state, double initial_x_bar_s,
                    const InputSchedule& input, const IntegratorConfig& integ,
                    Execution exec = Execution::Auto);

/// Uniform on [-1.5, -0.1] for every agent, with `perturbed` set to -0.1.
std::vector<double> negative_mean_initial_state(int agents, int perturbed, std::uint64_t seed);

/// Columns `t, x_0..x_{N-1}, u, x_bar, x_bar_s`; every line of `header`
/// is emitted first as a `# ` comment.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const std::vector<std::string>& header = {});

}  // namespace ctm
