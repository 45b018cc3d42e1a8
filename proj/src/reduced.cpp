#include "ctm/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "ctm/errors.hpp"

namespace ctm {

void ReducedModel::validate() const {
    if (n < 2) throw UsageError("reduced model requires n >= 2");
    if (N < 2 * n + 1) throw UsageError("reduced model requires N >= 2n+1");
    if (!(epsilon >= 0.0 && epsilon < 0.5)) throw UsageError("epsilon must lie in [0, 1/2)");
    if (!std::isfinite(beta)) throw UsageError("beta must be finite");
}

double mean_state(const ReducedModel& m, const ReducedState& y) {
    return (m.n * y.y1 + m.n * y.y2 + (m.N - 2 * m.n) * y.y3) / m.N;
}

ReducedState reduced_field(const ReducedModel& m, double u, const ReducedState& y) {
    m.validate();
    const double outer = m.N - m.n - 1;  // degree of a cluster-1/2 agent
    const double within = m.n - 1;
    const double middle = m.N - 2 * m.n;
    const double s1 = std::tanh(y.y1);
    const double s2 = std::tanh(y.y2);
    const double s3 = std::tanh(y.y3);
    const double bias = 2.0 * outer * m.epsilon;
    return {
        -outer * y.y1 + within * u * s1 + middle * u * s3 + bias + m.beta / m.n,
        -outer * y.y2 + within * u * s2 + middle * u * s3 - bias,
        -(m.N - 1.0) * y.y3 + (middle - 1.0) * u * s3 + m.n * u * s1 + m.n * u * s2,
    };
}

ReducedState z2_action(const ReducedState& y) { return {-y.y2, -y.y1, -y.y3}; }

double check_z2_equivariance(const ReducedModel& m, double u, const ReducedState& y) {
    const ReducedState lhs = reduced_field(m, u, z2_action(y));
    const ReducedState rhs = z2_action(reduced_field(m, u, y));
    return std::max({std::abs(lhs.y1 - rhs.y1), std::abs(lhs.y2 - rhs.y2),
                     std::abs(lhs.y3 - rhs.y3)});
}

Eigen::Matrix3d reduced_jacobian(const ReducedModel& m, double u, const ReducedState& y) {
    m.validate();
    const double outer = m.N - m.n - 1;
    const double within = m.n - 1;
    const double middle = m.N - 2 * m.n;
    auto dtanh = [](double x) {
        const double t = std::tanh(x);
        return 1.0 - t * t;
    };
    const double d1 = dtanh(y.y1);
    const double d2 = dtanh(y.y2);
    const double d3 = dtanh(y.y3);
    Eigen::Matrix3d J;
    J << -outer + within * u * d1, 0.0, middle * u * d3,
         0.0, -outer + within * u * d2, middle * u * d3,
         m.n * u * d1, m.n * u * d2, -(m.N - 1.0) + (middle - 1.0) * u * d3;
    return J;
}

double symmetric_balance(const ReducedModel& m, double u, double y) {
    const double outer = m.N - m.n - 1;
    return -outer * y + (m.n - 1) * u * std::tanh(y) + 2.0 * outer * m.epsilon;
}

namespace {

constexpr double kScanLo = -10.0;
constexpr double kScanHi = 10.0;
constexpr double kScanStep = 1e-3;
constexpr double kRootTol = 1e-12;

double bisect_balance(const ReducedModel& m, double u, double lo, double hi) {
    double glo = symmetric_balance(m, u, lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double gm = symmetric_balance(m, u, mid);
        if (gm == 0.0) return mid;
        if ((gm > 0.0) == (glo > 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    const double glo_abs = std::abs(symmetric_balance(m, u, lo));
    const double ghi_abs = std::abs(symmetric_balance(m, u, hi));
    return glo_abs <= ghi_abs ? lo : hi;
}

std::vector<double> scan_roots(const ReducedModel& m, double u) {
    if (!(symmetric_balance(m, u, kScanLo) > 0.0) || !(symmetric_balance(m, u, kScanHi) < 0.0))
        throw NumericalError("symmetric-equilibrium bracket [-10, 10] does not enclose all roots");
    std::vector<double> roots;
    const int steps = static_cast<int>(std::lround((kScanHi - kScanLo) / kScanStep));
    double y_prev = kScanLo;
    double g_prev = symmetric_balance(m, u, y_prev);
    for (int k = 1; k <= steps; ++k) {
        const double y = kScanLo + k * kScanStep;
        const double g = symmetric_balance(m, u, y);
        if (g == 0.0) {
            roots.push_back(y);
        } else if (g_prev != 0.0 && (g > 0.0) != (g_prev > 0.0)) {
            roots.push_back(bisect_balance(m, u, y_prev, y));
        }
        y_prev = y;
        g_prev = g;
    }
    return roots;
}

// Newton on g from `guess`; nullopt when it does not settle.
std::optional<double> newton_balance(const ReducedModel& m, double u, double guess) {
    const double outer = m.N - m.n - 1;
    double y = guess;
    for (int it = 0; it < 50; ++it) {
        const double g = symmetric_balance(m, u, y);
        if (std::abs(g) <= kRootTol) return y;
        const double t = std::tanh(y);
        const double dg = -outer + (m.n - 1) * u * (1.0 - t * t);
        if (dg == 0.0) return std::nullopt;
        y -= g / dg;
        if (!std::isfinite(y)) return std::nullopt;
    }
    return std::abs(symmetric_balance(m, u, y)) <= 1e-10 ? std::optional<double>(y) : std::nullopt;
}

std::size_t nearest(const std::vector<double>& roots, double target) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < roots.size(); ++k)
        if (std::abs(roots[k] - target) < std::abs(roots[best] - target)) best = k;
    return best;
}

}  // namespace

std::vector<SymmetricEquilibrium> solve_y_star(const ReducedModel& model, double u) {
    model.validate();
    if (!(u >= 0.0)) throw UsageError("u must be >= 0");
    const std::vector<double> roots = scan_roots(model, u);
    if (roots.empty()) throw NumericalError("no symmetric equilibrium found");

    // Continue the u = 0 root 2 eps up to u in steps of 0.01.
    double tracked = 2.0 * model.epsilon;
    constexpr double kStep = 0.01;
    const int steps = static_cast<int>(std::floor(u / kStep));
    for (int k = 1; k <= steps; ++k) {
        const double uk = k * kStep;
        if (auto next = newton_balance(model, uk, tracked)) {
            tracked = *next;
        } else {
            const auto at_uk = scan_roots(model, uk);
            tracked = at_uk[nearest(at_uk, tracked)];
        }
    }
    const std::size_t principal = nearest(roots, tracked);

    std::vector<SymmetricEquilibrium> out;
    for (std::size_t k = 0; k < roots.size(); ++k) {
        out.push_back({roots[k], u, model.epsilon, model.N, model.n,
                       std::abs(symmetric_balance(model, u, roots[k])), k == principal});
    }
    return out;
}

double principal_y_star(const ReducedModel& model, double u) {
    model.validate();
    if (!(u >= 0.0)) throw UsageError("u must be >= 0");
    if (model.epsilon == 0.0) return 0.0;
    const double outer = model.N - model.n - 1;
    const double hi = 2.0 * model.epsilon + u * (model.n - 1) / outer + 1.0;
    return bisect_balance(model, u, 0.0, hi);
}

ReducedTrajectory simulate_reduced(const ReducedModel& model, const CtmParams& params,
                                   const ReducedState& initial, double initial_x_bar_s,
                                   const IntegratorConfig& integ) {
    model.validate();
    params.validate();
    VectorField field = [&](double, std::span<const double> z, std::span<double> dz) {
        const ReducedState y{z[0], z[1], z[2]};
        const double u = effective_gain(params, ControllerState{z[3]});
        const ReducedState f = reduced_field(model, u, y);
        dz[0] = f.y1;
        dz[1] = f.y2;
        dz[2] = f.y3;
        dz[3] = params.gain_mode == GainMode::Fixed ? 0.0
                                                    : params.kappa_s * (mean_state(model, y) - z[3]);
    };
    const std::vector<double> z0{initial.y1, initial.y2, initial.y3, initial_x_bar_s};
    const Solution sol = integrate(field, z0, integ);

    ReducedTrajectory traj;
    traj.steady_state_reached = sol.steady_state_reached;
    traj.times = sol.times;
    for (std::size_t k = 0; k < sol.samples(); ++k) {
        const auto z = sol.state(k);
        const ReducedState y{z[0], z[1], z[2]};
        traj.states.push_back(y);
        traj.y_bar.push_back(mean_state(model, y));
        traj.x_bar_s_series.push_back(z[3]);
        traj.u_series.push_back(effective_gain(params, ControllerState{z[3]}));
    }
    return traj;
}

}  // namespace ctm
