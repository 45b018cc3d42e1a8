#pragma once

#include <optional>
#include <vector>

#include "ctm/errors.hpp"
#include "ctm/execution.hpp"
#include "ctm/reduced.hpp"

namespace ctm {

// Closed-form pitchfork analysis of the symmetric equilibrium (y*, -y*, 0).
// All formulas assume S = tanh.

struct ExpansionCoeffs {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

struct LambdaCoeffs {
    double lambda1 = 0.0;
    double lambda3 = 0.0;
};

/// Coefficients of the quadratic c2 u^2 + c1 u + c0 = 0 equivalent to lambda1 = 0.
struct QuadraticCoeffs {
    double c2 = 0.0;
    double c1 = 0.0;
    double c0 = 0.0;
};

/// Throws UsageError unless N >= 2n+1 and n >= 2.
void check_cluster_sizes(int N, int n);

/// Throws UsageError for u <= 0.
ExpansionCoeffs expansion_coeffs(double y_star, double u, int N, int n);

/// Throws NumericalError when c == 0.
LambdaCoeffs lambda_coeffs(double y_star, double u, int N, int n);

/// Series solution of a dx^3 + b dx^2 + c dx = -dy + dy^3/3 near zero,
/// correct through third order in dy. Throws NumericalError when c == 0.
double invert_cubic_series(const ExpansionCoeffs& coeffs, double delta_y);

QuadraticCoeffs quadratic_coeffs(double y_star, int N, int n);

/// Positive root of the quadratic, in [1, (N-1)/(N-2n-1)), via the
/// cancellation-free form -2 c0 / (sqrt(c1^2 - 4 c2 c0) + c1).
double u_at_transition(double y_star, int N, int n);

/// eps for which y_star is the symmetric equilibrium at u_at_transition.
double eps_at_transition(double y_star, int N, int n);

/// lambda3 along the lambda1 = 0 curve, parametrised by y_star.
double lambda3_transition(double y_star, int N, int n);

struct TransitionReport {
    int N = 0;
    int n = 0;
    bool exists = false;
    std::optional<double> y_star_0;
    std::optional<double> y_star_1;  // absent for N = 2n+1: lambda3 stays positive
    std::optional<double> u_star;
    std::optional<double> eps_star;
    double lambda3_max = 0.0;
    double y_at_lambda3_max = 0.0;
    int sign_changes = 0;  // more than two is reported, not hidden
    // scan record
    double scan_min = 0.0;
    double scan_max = 0.0;
    int scan_points = 0;
};

inline constexpr double kTransitionScanMin = 1e-4;
inline constexpr double kTransitionScanMax = 20.0;
inline constexpr int kTransitionScanPoints = 2000;

/// Log-spaced scan of lambda3_transition over [1e-4, 20]; when it becomes
/// positive the first upward and last downward zero crossings are bisected
/// to 1e-10. For N >= 2n+2 the scan end must sit on the -(N-1)/3 asymptote;
/// for N = 2n+1 lambda3 diverges to +infinity and only y_star_0 exists.
TransitionReport find_transition(int N, int n);

/// Reports for n = n_min..n_max in index order. The Parallel path farms
/// out one n per OpenMP iteration.
std::vector<TransitionReport> transition_sweep(int N, int n_min, int n_max,
                                               Execution exec = Execution::Auto);

/// Smallest n in [2, (N-1)/2] admitting a transition. Requires N >= 5.
std::optional<int> min_n_for_cascade(int N);

struct Lambda3Sample {
    double y_star;
    double lambda3;
};

/// lambda3_transition on the same grid that find_transition scans.
std::vector<Lambda3Sample> lambda3_curve(int N, int n);

struct BifurcationPoint {
    double u_c = 0.0;
    double y_star = 0.0;
    double g_residual = 0.0;
    double lambda1_residual = 0.0;
};

/// Solves g(y*, u, eps) = 0 and lambda1(y*, u) = 0 jointly: bisection on u
/// over [1, (N-1)/(N-2n-1)] (a geometric grid from 1 when N = 2n+1),
/// principal root of g inside. Throws
/// NumericalError when lambda1 does not change sign along the branch.
BifurcationPoint find_bifurcation_point(int N, int n, double epsilon);

enum class PitchforkKind { Supercritical, Subcritical };

/// lambda3 vanishes at the bifurcation; the cubic normal form cannot decide.
class DegeneratePitchfork : public NumericalError {
public:
    using NumericalError::NumericalError;
};

struct PitchforkClass {
    PitchforkKind kind = PitchforkKind::Supercritical;
    double u_c = 0.0;
    double y_star_at_uc = 0.0;
    double lambda3_at_uc = 0.0;
};

/// Throws NumericalError when |lambda3| <= 1e-8 at the bifurcation
/// (degenerate: fifth-order terms decide).
PitchforkClass classify_pitchfork(int N, int n, double epsilon);

const char* to_string(PitchforkKind kind);

}  // namespace ctm
