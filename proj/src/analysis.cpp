#include "ctm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Dense>

#include "ctm/csv.hpp"
#include "ctm/errors.hpp"
#include "parallel.hpp"

namespace ctm {

// ---------------------------------------------------------------------------
// fit_cubic_normal_form
// ---------------------------------------------------------------------------

namespace {

// Root of a scalar equation h(y) = 0 near `guess`, with h'(y) supplied.
// Newton first; bisection on a widening bracket as a fallback.
template <typename H, typename DH>
std::optional<double> local_root(H&& h, DH&& dh, double guess) {
    double y = guess;
    for (int it = 0; it < 60; ++it) {
        const double v = h(y);
        if (v == 0.0) return y;
        const double d = dh(y);
        if (d == 0.0 || !std::isfinite(d)) break;
        const double next = y - v / d;
        if (!std::isfinite(next)) break;
        if (std::abs(next - y) <= 1e-15 * std::max(1.0, std::abs(y))) return next;
        y = next;
    }
    if (std::abs(h(y)) <= 1e-12) return y;

    for (double width = 0.25; width <= 4.0; width *= 2.0) {
        double lo = guess - width;
        double hi = guess + width;
        double hlo = h(lo);
        if ((hlo > 0.0) == (h(hi) > 0.0)) continue;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            const double hm = h(mid);
            if ((hm > 0.0) == (hlo > 0.0)) {
                lo = mid;
                hlo = hm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }
    return std::nullopt;
}

}  // namespace

CubicFit fit_cubic_normal_form(int N, int n, double epsilon, double u) {
    const ReducedModel model{N, n, epsilon, 0.0};
    model.validate();
    if (!(u > 0.0)) throw UsageError("normal-form fit requires u > 0");
    const double y_star = principal_y_star(model, u);

    const double outer = N - n - 1;
    auto dfield = [&](double y) {
        const double t = std::tanh(y);
        return -outer + (n - 1) * u * (1.0 - t * t);
    };

    constexpr int kLevels = 5;
    constexpr double kStep = 0.01;
    constexpr double kScale = kStep * kLevels;  // columns use dy3 / kScale
    constexpr int kTerms = 4;                   // dy3, dy3^3, dy3^5, dy3^7

    Eigen::MatrixXd A(2 * kLevels, kTerms);
    Eigen::VectorXd rate(2 * kLevels);
    int row = 0;
    for (int level = 1; level <= kLevels; ++level) {
        for (int sign : {1, -1}) {
            const double dy3 = sign * kStep * level;
            auto h1 = [&](double y1) { return reduced_field(model, u, {y1, 0.0, dy3}).y1; };
            auto h2 = [&](double y2) { return reduced_field(model, u, {0.0, y2, dy3}).y2; };
            const auto y1 = local_root(h1, dfield, y_star);
            const auto y2 = local_root(h2, dfield, -y_star);
            if (!y1 || !y2)
                throw NumericalError("normal-form oracle inconclusive: root-find failed at dy3=" +
                                     std::to_string(dy3));
            rate(row) = reduced_field(model, u, {*y1, *y2, dy3}).y3;
            const double s = dy3 / kScale;
            for (int k = 0; k < kTerms; ++k) A(row, k) = std::pow(s, 2 * k + 1);
            ++row;
        }
    }
    const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(rate);
    const Eigen::VectorXd residual = A * coef - rate;

    CubicFit fit;
    fit.lambda1 = coef(0) / kScale;
    fit.lambda3 = coef(1) / (kScale * kScale * kScale);
    fit.max_residual = residual.cwiseAbs().maxCoeff();
    return fit;
}

// ---------------------------------------------------------------------------
// branch_continuation
// ---------------------------------------------------------------------------

namespace {

constexpr double kMinLattice = 3.0;
constexpr int kLatticePoints = 7;
constexpr double kDedupTol = 1e-6;

double sup(const ReducedState& f) {
    return std::max({std::abs(f.y1), std::abs(f.y2), std::abs(f.y3)});
}

std::optional<ReducedState> damped_newton(const ReducedModel& model, double u, ReducedState y) {
    ReducedState f = reduced_field(model, u, y);
    double norm = sup(f);
    for (int it = 0; it < 100; ++it) {
        if (norm <= 1e-11) return y;
        const Eigen::Matrix3d J = reduced_jacobian(model, u, y);
        const Eigen::Vector3d step = J.fullPivLu().solve(-f.vec());
        if (!step.allFinite()) return std::nullopt;
        double damping = 1.0;
        bool improved = false;
        while (damping >= 1.0 / 1024) {
            const ReducedState trial = ReducedState::from(y.vec() + damping * step);
            const ReducedState ft = reduced_field(model, u, trial);
            const double nt = sup(ft);
            if (nt < norm) {
                y = trial;
                f = ft;
                norm = nt;
                improved = true;
                break;
            }
            damping *= 0.5;
        }
        if (!improved) break;
    }
    return norm <= 1e-9 ? std::optional<ReducedState>(y) : std::nullopt;
}

// Since |S| <= 1, every equilibrium satisfies |y_k| <= u + 2 eps + beta / (n A).
double lattice_half_width(const ReducedModel& model, double u) {
    const double A = model.N - model.n - 1.0;
    const double bound = u + 2.0 * model.epsilon + model.beta / (model.n * A);
    return std::max(kMinLattice, bound + 0.5);
}

BranchPoint equilibria_at(const ReducedModel& model, double u) {
    BranchPoint point;
    point.u = u;
    bool any = false;
    const double kLattice = lattice_half_width(model, u);
    const double spacing = 2.0 * kLattice / (kLatticePoints - 1);
    for (int i = 0; i < kLatticePoints; ++i)
        for (int j = 0; j < kLatticePoints; ++j)
            for (int k = 0; k < kLatticePoints; ++k) {
                const ReducedState start{-kLattice + i * spacing, -kLattice + j * spacing,
                                         -kLattice + k * spacing};
                const auto root = damped_newton(model, u, start);
                if (!root) continue;
                any = true;
                const bool seen = std::any_of(
                    point.equilibria.begin(), point.equilibria.end(), [&](const Equilibrium& e) {
                        return (e.y.vec() - root->vec()).cwiseAbs().maxCoeff() < kDedupTol;
                    });
                if (seen) continue;
                Equilibrium eq;
                eq.y = *root;
                eq.y_bar = mean_state(model, *root);
                const Eigen::EigenSolver<Eigen::Matrix3d> es(reduced_jacobian(model, u, *root),
                                                             false);
                eq.max_real_eigenvalue = es.eigenvalues().real().maxCoeff();
                eq.stable = eq.max_real_eigenvalue < 0.0;
                if (root->vec().cwiseAbs().maxCoeff() > kLattice - 1e-3)
                    point.near_lattice_boundary = true;
                point.equilibria.push_back(eq);
            }
    point.newton_failed = !any;
    std::sort(point.equilibria.begin(), point.equilibria.end(),
              [](const Equilibrium& a, const Equilibrium& b) { return a.y_bar < b.y_bar; });
    return point;
}

}  // namespace

BranchDiagram branch_continuation(int N, int n, double epsilon, double u_min, double u_max,
                                  int u_steps, double beta, Execution exec) {
    const ReducedModel model{N, n, epsilon, beta};
    model.validate();
    if (!(beta >= 0.0)) throw UsageError("beta must be >= 0");
    if (u_steps < 1) throw UsageError("u_steps must be >= 1");
    const double ceiling = 1.5 * (N - 1.0) / (N - 2 * n - 1);
    if (!(u_min >= 0.0) || !(u_max >= u_min) || u_max > ceiling)
        throw UsageError("u range must satisfy 0 <= u_min <= u_max <= 1.5 (N-1)/(N-2n-1)");

    BranchDiagram diagram{N, n, epsilon, beta, {}};
    diagram.points.resize(static_cast<std::size_t>(u_steps));
    detail::for_each_index(diagram.points.size(), exec, [&](std::size_t k) {
        const double u = u_steps == 1 ? u_min : u_min + (u_max - u_min) * k / (u_steps - 1);
        diagram.points[k] = equilibria_at(model, u);
    });
    return diagram;
}

std::optional<double> symmetric_instability_onset(const BranchDiagram& diagram) {
    for (const auto& p : diagram.points)
        for (const auto& e : p.equilibria)
            if (std::abs(e.y_bar) < 1e-8 && std::abs(e.y.y3) < 1e-8 && !e.stable) return p.u;
    return std::nullopt;
}

void write_branch_csv(std::ostream& out, const BranchDiagram& diagram,
                      const std::vector<std::string>& header) {
    csv::write_header(out, header);
    out << "u,y_bar,stable\n";
    for (const auto& p : diagram.points)
        for (const auto& e : p.equilibria)
            out << csv::format_double(p.u) << ',' << csv::format_double(e.y_bar) << ','
                << (e.stable ? 1 : 0) << '\n';
}

// ---------------------------------------------------------------------------
// Trajectory analytics
// ---------------------------------------------------------------------------

std::vector<CoherenceSample> cluster_coherence(const Trajectory& traj, const Network& network,
                                               const std::set<int>& exclude) {
    if (traj.agents != network.size)
        throw UsageError("trajectory does not belong to this network");
    std::vector<CoherenceSample> out;
    out.reserve(traj.samples());
    for (std::size_t k = 0; k < traj.samples(); ++k) {
        const auto x = traj.state(k);
        std::array<double, 3> lo{}, hi{};
        std::array<int, 3> count{};
        for (int i = 0; i < network.size; ++i) {
            const auto label = static_cast<int>(network.clusters[i]);
            if (label < 1 || exclude.count(i)) continue;
            const int c = label - 1;
            if (count[c] == 0) {
                lo[c] = hi[c] = x[i];
            } else {
                lo[c] = std::min(lo[c], x[i]);
                hi[c] = std::max(hi[c], x[i]);
            }
            ++count[c];
        }
        CoherenceSample s;
        s.t = traj.times[k];
        for (int c = 0; c < 3; ++c) s.spread[c] = count[c] >= 2 ? hi[c] - lo[c] : 0.0;
        out.push_back(s);
    }
    return out;
}

void write_coherence_csv(std::ostream& out, const std::vector<CoherenceSample>& samples,
                         const std::vector<std::string>& header) {
    csv::write_header(out, header);
    out << "t,spread_c1,spread_c2,spread_c3\n";
    for (const auto& s : samples)
        out << csv::format_double(s.t) << ',' << csv::format_double(s.spread[0]) << ','
            << csv::format_double(s.spread[1]) << ',' << csv::format_double(s.spread[2]) << '\n';
}

LogLinearFit fit_log_linear(std::span<const double> times, std::span<const double> values,
                            double t_min, double floor) {
    if (times.size() != values.size()) throw UsageError("series lengths differ");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    std::size_t m = 0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] < t_min || !(values[k] > floor)) continue;
        const double x = times[k];
        const double y = std::log(values[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++m;
    }
    LogLinearFit fit;
    fit.points = m;
    if (m < 2) return fit;
    const double md = static_cast<double>(m);
    const double vx = sxx - sx * sx / md;
    const double vy = syy - sy * sy / md;
    const double cxy = sxy - sx * sy / md;
    if (vx <= 0.0) return fit;
    fit.slope = cxy / vx;
    fit.intercept = (sy - fit.slope * sx) / md;
    fit.r_squared = vy > 0.0 ? cxy * cxy / (vx * vy) : 1.0;
    return fit;
}

ResponseClass classify_response(std::span<const double> times, std::span<const double> mean_state,
                                std::span<const double> u_series,
                                const ResponseThresholds& th) {
    if (times.size() != mean_state.size() || times.size() != u_series.size())
        throw UsageError("response classification: series lengths differ");
    if (times.empty() || times.back() - times.front() < th.window)
        throw UsageError("response classification inconclusive: trajectory shorter than one window");

    ResponseClass r;
    double best = th.jump;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < times.front() + th.settle_time) continue;
        double rise = 0.0;
        for (std::size_t j = i + 1; j < times.size() && times[j] - times[i] <= th.window + 1e-12; ++j)
            rise = std::max(rise, mean_state[j] - mean_state[i]);
        if (rise > best) {
            best = rise;
            r.kind = ResponseKind::Cascade;
            r.jump_time = times[i];
            r.jump_magnitude = rise;
            r.u_at_jump = u_series[i];
        }
    }
    if (r.kind == ResponseKind::Cascade) return r;
    r.kind = mean_state.back() > th.contained_level ? ResponseKind::Contained : ResponseKind::None;
    return r;
}

ResponseClass classify_response(const Trajectory& traj, const ResponseThresholds& th) {
    return classify_response(traj.times, traj.x_bar_series, traj.u_series, th);
}

const char* to_string(ResponseKind kind) {
    switch (kind) {
        case ResponseKind::Cascade: return "cascade";
        case ResponseKind::Contained: return "contained";
        case ResponseKind::None: return "none";
    }
    return "none";
}

}  // namespace ctm
