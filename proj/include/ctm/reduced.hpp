#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ctm/dynamics.hpp"
#include "ctm/integrator.hpp"

namespace ctm {

/// Cluster-average dynamics of the three-cluster network on the sync
/// manifold. `beta` is an additive input on a single cluster-1 agent; its
/// cluster average beta/n enters the y1 equation. beta = 0 gives the
/// Z2-symmetric system.
struct ReducedModel {
    int N = 11;
    int n = 4;
    double epsilon = 0.0;
    double beta = 0.0;

    /// N >= 2n+1, n >= 2, 0 <= eps < 1/2, finite beta; throws UsageError.
    void validate() const;
};

struct ReducedState {
    double y1 = 0.0;
    double y2 = 0.0;
    double y3 = 0.0;

    Eigen::Vector3d vec() const { return {y1, y2, y3}; }
    static ReducedState from(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }
};

/// Network-wide average (n y1 + n y2 + (N-2n) y3) / N.
double mean_state(const ReducedModel& model, const ReducedState& y);

ReducedState reduced_field(const ReducedModel& model, double u, const ReducedState& y);

/// The Z2 action: (y1, y2, y3) -> (-y2, -y1, -y3).
ReducedState z2_action(const ReducedState& y);

/// ||F(gamma y) - gamma F(y)||_inf. Only meaningful for beta = 0.
double check_z2_equivariance(const ReducedModel& model, double u, const ReducedState& y);

Eigen::Matrix3d reduced_jacobian(const ReducedModel& model, double u, const ReducedState& y);

/// g(y) = -(N-n-1) y + (n-1) u tanh(y) + 2 (N-n-1) eps; roots give the
/// symmetric equilibria (y, -y, 0).
double symmetric_balance(const ReducedModel& model, double u, double y);

struct SymmetricEquilibrium {
    double y_star = 0.0;
    double u = 0.0;
    double epsilon = 0.0;
    int N = 0;
    int n = 0;
    double residual = 0.0;
    bool principal = false;
};

/// All roots of g on [-10, 10] (scan step 1e-3, bisection to |g| <= 1e-12),
/// ascending. The root continued from y = 2 eps at u = 0 in steps of 0.01
/// is flagged principal.
std::vector<SymmetricEquilibrium> solve_y_star(const ReducedModel& model, double u);

/// Principal root without the full scan. For eps > 0 it is the unique
/// positive root (g is concave on y > 0 with g(0) > 0); for eps = 0 it is 0.
double principal_y_star(const ReducedModel& model, double u);

struct ReducedTrajectory {
    std::vector<double> times;
    std::vector<ReducedState> states;
    std::vector<double> y_bar;
    std::vector<double> u_series;
    std::vector<double> x_bar_s_series;
    bool steady_state_reached = false;
};

/// Integrates the reduced system; the feedback filter is driven by the
/// network average y_bar exactly as the full system is driven by x_bar.
ReducedTrajectory simulate_reduced(const ReducedModel& model, const CtmParams& params,
                                   const ReducedState& initial, double initial_x_bar_s,
                                   const IntegratorConfig& integ);

}  // namespace ctm
