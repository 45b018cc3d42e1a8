#include "ctm/bifurcation.hpp"

#include <cmath>

#include "ctm/errors.hpp"
#include "ctm/sigmoid.hpp"
#include "parallel.hpp"

namespace ctm {

namespace {

const Sigmoid kTanh{};

// n(N-n-1)/(n-1), the weight with which y1 and y2 feed back into y3.
double feedback_weight(int N, int n) {
    return static_cast<double>(n) * (N - n - 1) / (n - 1);
}

// 1 + (n+1)(N-2n)/(n-1), the common factor of u in lambda1 and lambda3.
double gain_factor(int N, int n) {
    return 1.0 + static_cast<double>(n + 1) * (N - 2 * n) / (n - 1);
}

}  // namespace

void check_cluster_sizes(int N, int n) {
    if (n < 2) throw UsageError("pitchfork analysis requires n >= 2");
    if (N < 2 * n + 1) throw UsageError("pitchfork analysis requires N >= 2n+1");
}

ExpansionCoeffs expansion_coeffs(double y_star, double u, int N, int n) {
    check_cluster_sizes(N, n);
    if (!(u > 0.0)) throw UsageError("expansion coefficients require u > 0");
    const double ratio = static_cast<double>(n - 1) / (N - 2 * n);
    return {
        ratio * kTanh.derivative(y_star, 3) / 6.0,
        ratio * kTanh.derivative(y_star, 2) / 2.0,
        ratio * kTanh.derivative(y_star, 1) - (N - n - 1) / ((N - 2 * n) * u),
    };
}

LambdaCoeffs lambda_coeffs(double y_star, double u, int N, int n) {
    const auto [a, b, c] = expansion_coeffs(y_star, u, N, n);
    if (c == 0.0) throw NumericalError("lambda coefficients are singular (c = 0)");
    const double K = gain_factor(N, n);
    const double M = feedback_weight(N, n);
    const double c4 = c * c * c * c;
    const double c5 = c4 * c;
    return {
        -(N - 1.0) - K * u - M * 2.0 / c,
        K * u / 3.0 + M * (2.0 / (3.0 * c) - 4.0 * b * b / c5 + 2.0 * a / c4),
    };
}

double invert_cubic_series(const ExpansionCoeffs& k, double delta_y) {
    if (k.c == 0.0) throw NumericalError("cubic series inversion is singular (c = 0)");
    const double c = k.c;
    const double c3 = c * c * c;
    const double c4 = c3 * c;
    const double c5 = c4 * c;
    const double dy2 = delta_y * delta_y;
    return -delta_y / c - k.b / c3 * dy2 +
           (1.0 / (3.0 * c) - 2.0 * k.b * k.b / c5 + k.a / c4) * dy2 * delta_y;
}

QuadraticCoeffs quadratic_coeffs(double y_star, int N, int n) {
    check_cluster_sizes(N, n);
    const double slope = kTanh.derivative(y_star, 1);
    const double middle = N - 2 * n;
    return {
        (n + 1 + (n - 1) / middle) * slope,
        (N - 2 * n - 1) * (N - n - 1.0) / middle + (N - 1.0) * (n - 1) / middle * slope,
        -(N - n - 1.0) * (N - 1) / middle,
    };
}

double u_at_transition(double y_star, int N, int n) {
    const auto [c2, c1, c0] = quadratic_coeffs(y_star, N, n);
    return -2.0 * c0 / (std::sqrt(c1 * c1 - 4.0 * c2 * c0) + c1);
}

double eps_at_transition(double y_star, int N, int n) {
    const double u = u_at_transition(y_star, N, n);
    return 0.5 * y_star - (n - 1.0) / (2.0 * (N - n - 1)) * u * kTanh.value(y_star);
}

double lambda3_transition(double y_star, int N, int n) {
    const double u = u_at_transition(y_star, N, n);
    const auto [a, b, c] = expansion_coeffs(y_star, u, N, n);
    const double c5 = c * c * c * c * c;
    return -(N - 1.0) / 3.0 + feedback_weight(N, n) * (2.0 * a * c - 4.0 * b * b) / c5;
}

namespace {

std::vector<double> transition_grid() {
    std::vector<double> grid(kTransitionScanPoints);
    const double lo = std::log(kTransitionScanMin);
    const double hi = std::log(kTransitionScanMax);
    for (int k = 0; k < kTransitionScanPoints; ++k)
        grid[k] = std::exp(lo + (hi - lo) * k / (kTransitionScanPoints - 1));
    grid.front() = kTransitionScanMin;
    grid.back() = kTransitionScanMax;
    return grid;
}

double bisect_lambda3(int N, int n, double lo, double hi) {
    double flo = lambda3_transition(lo, N, n);
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = lambda3_transition(mid, N, n);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<Lambda3Sample> lambda3_curve(int N, int n) {
    check_cluster_sizes(N, n);
    std::vector<Lambda3Sample> out;
    for (double y : transition_grid()) out.push_back({y, lambda3_transition(y, N, n)});
    return out;
}

TransitionReport find_transition(int N, int n) {
    check_cluster_sizes(N, n);
    TransitionReport report;
    report.N = N;
    report.n = n;
    report.scan_min = kTransitionScanMin;
    report.scan_max = kTransitionScanMax;
    report.scan_points = kTransitionScanPoints;

    const auto curve = lambda3_curve(N, n);
    // With a single neutral agent (N = 2n+1) u(y*) is unbounded and lambda3
    // grows without bound instead of settling at -(N-1)/3.
    const bool single_neutral = N == 2 * n + 1;
    if (single_neutral ? !(curve.back().lambda3 > 0.0)
                       : std::abs(curve.back().lambda3 + (N - 1.0) / 3.0) >= 1e-6)
        throw NumericalError("lambda3 has not reached its asymptote at the scan ceiling");

    std::optional<std::size_t> first_up;
    std::optional<std::size_t> last_down;
    report.lambda3_max = curve.front().lambda3;
    report.y_at_lambda3_max = curve.front().y_star;
    for (std::size_t k = 1; k < curve.size(); ++k) {
        if (curve[k].lambda3 > report.lambda3_max) {
            report.lambda3_max = curve[k].lambda3;
            report.y_at_lambda3_max = curve[k].y_star;
        }
        const bool was_pos = curve[k - 1].lambda3 > 0.0;
        const bool is_pos = curve[k].lambda3 > 0.0;
        if (was_pos != is_pos) {
            ++report.sign_changes;
            if (is_pos && !first_up) first_up = k - 1;
            if (!is_pos) last_down = k - 1;
        }
    }
    if (report.lambda3_max <= 0.0 || !first_up) return report;

    const double y0 = bisect_lambda3(N, n, curve[*first_up].y_star, curve[*first_up + 1].y_star);
    report.exists = true;
    report.y_star_0 = y0;
    if (last_down && *last_down > *first_up)
        report.y_star_1 = bisect_lambda3(N, n, curve[*last_down].y_star, curve[*last_down + 1].y_star);
    report.u_star = u_at_transition(y0, N, n);
    report.eps_star = eps_at_transition(y0, N, n);
    return report;
}

std::vector<TransitionReport> transition_sweep(int N, int n_min, int n_max, Execution exec) {
    if (n_min < 2) throw UsageError("sweep requires n_min >= 2");
    if (n_max < n_min) throw UsageError("sweep requires n_max >= n_min");
    if (N < 2 * n_max + 1) throw UsageError("sweep requires N >= 2 n_max + 1");
    std::vector<TransitionReport> out(static_cast<std::size_t>(n_max - n_min + 1));
    detail::for_each_index(out.size(), exec, [&](std::size_t i) {
        out[i] = find_transition(N, n_min + static_cast<int>(i));
    });
    return out;
}

std::optional<int> min_n_for_cascade(int N) {
    if (N < 5) throw UsageError("min_n_for_cascade requires N >= 5");
    for (const auto& r : transition_sweep(N, 2, (N - 1) / 2))
        if (r.exists) return r.n;
    return std::nullopt;
}

BifurcationPoint find_bifurcation_point(int N, int n, double epsilon) {
    check_cluster_sizes(N, n);
    const ReducedModel model{N, n, epsilon, 0.0};
    model.validate();

    auto branch_lambda1 = [&](double u) {
        return lambda_coeffs(principal_y_star(model, u), u, N, n).lambda1;
    };
    auto finish = [&](double u) {
        const double y = principal_y_star(model, u);
        return BifurcationPoint{u, y, std::abs(symmetric_balance(model, u, y)),
                                std::abs(lambda_coeffs(y, u, N, n).lambda1)};
    };

    const double u_lo = 1.0;
    double f_prev = branch_lambda1(u_lo);
    if (std::abs(f_prev) <= 1e-12) return finish(u_lo);

    // u_c = u(y*) lies below (N-1)/(N-2n-1); for N = 2n+1 there is no such
    // bound and the grid is geometric instead.
    // A fine grid: for small eps lambda1 can be positive only on a short
    // window just above u = 1.
    const bool bounded = N > 2 * n + 1;
    const int kIntervals = bounded ? 1024 : 64 * 32;
    const double u_hi = bounded ? (N - 1.0) / (N - 2 * n - 1) : 0.0;
    auto grid = [&](int k) {
        return bounded ? u_lo + (u_hi - u_lo) * k / kIntervals : u_lo * std::exp2(k / 64.0);
    };
    double a = u_lo;
    for (int k = 1; k <= kIntervals; ++k) {
        const double b = grid(k);
        const double f = branch_lambda1(b);
        if (f == 0.0) return finish(b);
        if ((f > 0.0) != (f_prev > 0.0)) {
            double lo = a;
            double hi = b;
            double flo = f_prev;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                const double fm = branch_lambda1(mid);
                if (fm == 0.0) return finish(mid);
                if ((fm > 0.0) == (flo > 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            const double u = std::abs(branch_lambda1(lo)) <= std::abs(branch_lambda1(hi)) ? lo : hi;
            return finish(u);
        }
        a = b;
        f_prev = f;
    }
    throw NumericalError("lambda1 does not change sign along the symmetric branch: no bifurcation");
}

PitchforkClass classify_pitchfork(int N, int n, double epsilon) {
    const BifurcationPoint bp = find_bifurcation_point(N, n, epsilon);
    const LambdaCoeffs lam = lambda_coeffs(bp.y_star, bp.u_c, N, n);
    if (std::abs(lam.lambda3) <= 1e-8)
        throw DegeneratePitchfork("lambda3 vanishes at the bifurcation point (transition case)");
    return {lam.lambda3 > 0.0 ? PitchforkKind::Subcritical : PitchforkKind::Supercritical, bp.u_c,
            bp.y_star, lam.lambda3};
}

const char* to_string(PitchforkKind kind) {
    return kind == PitchforkKind::Subcritical ? "subcritical" : "supercritical";
}

}  // namespace ctm
