#pragma once

#include <array>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "ctm/dynamics.hpp"
#include "ctm/execution.hpp"
#include "ctm/network.hpp"
#include "ctm/reduced.hpp"

namespace ctm {

// ---------------------------------------------------------------------------
// Cubic normal form, fitted numerically
// ---------------------------------------------------------------------------

struct CubicFit {
    double lambda1 = 0.0;
    double lambda3 = 0.0;
    double max_residual = 0.0;  // of the fitted odd polynomial over the grid
};

/// Brute-force estimate of (lambda1, lambda3) at the principal symmetric
/// equilibrium. For dy3 = +-0.01..+-0.05 the first two reduced equations are
/// solved exactly for y1, y2, the third is evaluated, and an odd polynomial
/// through dy3^7 is least-squares fitted; its first two coefficients are
/// returned. Independent of the closed forms in bifurcation.hpp.
/// Throws NumericalError if a root-find fails.
CubicFit fit_cubic_normal_form(int N, int n, double epsilon, double u);

// ---------------------------------------------------------------------------
// Equilibrium branches
// ---------------------------------------------------------------------------

struct Equilibrium {
    ReducedState y;
    double y_bar = 0.0;
    bool stable = false;
    double max_real_eigenvalue = 0.0;
};

struct BranchPoint {
    double u = 0.0;
    std::vector<Equilibrium> equilibria;  // sorted by y_bar
    bool newton_failed = false;           // no start converged
    bool near_lattice_boundary = false;   // some equilibrium within 1e-3 of the lattice edge
};

struct BranchDiagram {
    int N = 0;
    int n = 0;
    double epsilon = 0.0;
    double beta = 0.0;
    std::vector<BranchPoint> points;
};

/// Multi-start damped Newton at each u of an evenly spaced grid. The 7^3
/// lattice spans [-L,L]^3 with L >= 3 covering the a priori bound
/// |y_k| <= u + 2 eps + beta/(n (N-n-1)). Duplicates are merged at 1e-6.
/// beta enters the cluster-1 equation as beta/n, the cluster average of a
/// single-agent input.
BranchDiagram branch_continuation(int N, int n, double epsilon, double u_min, double u_max,
                                  int u_steps, double beta, Execution exec = Execution::Auto);

/// First grid u at which the equilibrium with y_bar = 0 and y3 = 0 is
/// unstable, if any.
std::optional<double> symmetric_instability_onset(const BranchDiagram& diagram);

/// Columns `u, y_bar, stable`.
void write_branch_csv(std::ostream& out, const BranchDiagram& diagram,
                      const std::vector<std::string>& header = {});

// ---------------------------------------------------------------------------
// Trajectory analytics
// ---------------------------------------------------------------------------

struct CoherenceSample {
    double t = 0.0;
    std::array<double, 3> spread{};  // max - min per cluster
};

/// Per-cluster spread of member states, skipping `exclude`. Clusters with
/// fewer than two counted members report 0.
std::vector<CoherenceSample> cluster_coherence(const Trajectory& traj, const Network& network,
                                               const std::set<int>& exclude = {});

/// Columns `t, spread_c1, spread_c2, spread_c3`.
void write_coherence_csv(std::ostream& out, const std::vector<CoherenceSample>& samples,
                         const std::vector<std::string>& header = {});

struct LogLinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
};

/// Least-squares fit of log(values) against times over samples with
/// t >= t_min and value > floor.
LogLinearFit fit_log_linear(std::span<const double> times, std::span<const double> values,
                            double t_min, double floor);

enum class ResponseKind { None, Contained, Cascade };

struct ResponseClass {
    ResponseKind kind = ResponseKind::None;
    std::optional<double> jump_time;
    std::optional<double> jump_magnitude;
    std::optional<double> u_at_jump;
};

struct ResponseThresholds {
    double jump = 0.5;          // rise of the mean state that counts as a jump
    double window = 5.0;        // ... within this many time units
    double contained_level = 0.05;
    double settle_time = 0.0;   // windows starting earlier than this are ignored
};

/// Cascade iff the mean state rises by more than `jump` inside some window
/// of width `window`; Contained iff the final mean exceeds
/// `contained_level` without such a jump; None otherwise. The reported
/// jump is the window with the largest rise. Throws UsageError
/// when the series span less than one window.
ResponseClass classify_response(std::span<const double> times, std::span<const double> mean_state,
                                std::span<const double> u_series,
                                const ResponseThresholds& thresholds = {});
ResponseClass classify_response(const Trajectory& traj, const ResponseThresholds& thresholds = {});

const char* to_string(ResponseKind kind);

}  // namespace ctm
