#include "ctm/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "ctm/errors.hpp"

namespace ctm {

void IntegratorConfig::validate() const {
    if (!(dt > 0.0)) throw UsageError("integrator: dt must be > 0");
    if (!(t_end > 0.0)) throw UsageError("integrator: t_end must be > 0");
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
        throw UsageError("integrator: tolerances must be > 0");
    if (!(steady_tol >= 0.0)) throw UsageError("integrator: steady_tol must be >= 0");
    if (record_every < 1) throw UsageError("integrator: record_every must be >= 1");
}

namespace {

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void record(Solution& sol, double t, std::span<const double> y) {
    sol.times.push_back(t);
    sol.states.insert(sol.states.end(), y.begin(), y.end());
}

Solution integrate_rk4(const VectorField& f, std::span<const double> initial,
                       const IntegratorConfig& cfg) {
    const std::size_t n = initial.size();
    Solution sol;
    sol.dim = n;
    std::vector<double> y(initial.begin(), initial.end());
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);

    const auto total_steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
    const double h = cfg.dt;
    record(sol, 0.0, y);

    for (std::size_t step = 0; step < total_steps; ++step) {
        const double t = static_cast<double>(step) * h;
        f(t, y, k1);
        if (cfg.steady_tol > 0.0 && sup_norm(k1) < cfg.steady_tol) {
            sol.steady_state_reached = true;
            if (sol.times.back() != t) record(sol, t, y);
            return sol;
        }
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        f(t + 0.5 * h, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        f(t + 0.5 * h, tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        f(t + h, tmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        ++sol.steps;
        if (!all_finite(y)) throw IntegrationError("non-finite state", t);

        const std::size_t done = step + 1;
        if (done % static_cast<std::size_t>(cfg.record_every) == 0 || done == total_steps)
            record(sol, static_cast<double>(done) * h, y);
    }
    return sol;
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

Solution integrate_rk45(const VectorField& f, std::span<const double> initial,
                        const IntegratorConfig& cfg) {
    const std::size_t n = initial.size();
    Solution sol;
    sol.dim = n;
    std::vector<double> y(initial.begin(), initial.end());
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y5(n);

    const double interval = cfg.dt * cfg.record_every;
    const auto total_records = static_cast<std::size_t>(std::ceil(cfg.t_end / interval - 1e-9));
    std::size_t next_record = 1;
    auto record_time = [&](std::size_t k) { return std::min(static_cast<double>(k) * interval, cfg.t_end); };

    double t = 0.0;
    double h = cfg.dt;
    record(sol, t, y);
    f(t, y, k1);

    while (next_record <= total_records) {
        if (!all_finite(k1)) throw IntegrationError("non-finite derivative", t);
        if (cfg.steady_tol > 0.0 && sup_norm(k1) < cfg.steady_tol) {
            sol.steady_state_reached = true;
            if (sol.times.back() != t) record(sol, t, y);
            return sol;
        }
        const double target = record_time(next_record);
        const bool clipped = t + h >= target;
        const double step = clipped ? target - t : h;
        if (step <= 1e-14 * std::max(1.0, std::abs(t)))
            throw IntegrationError("adaptive step underflow", t);

        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + step * a21 * k1[i];
        f(t + c2 * step, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + step * (a31 * k1[i] + a32 * k2[i]);
        f(t + c3 * step, tmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + step * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(t + c4 * step, tmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + step * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(t + c5 * step, tmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + step * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                    a65 * k5[i]);
        f(t + step, tmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            y5[i] = y[i] + step * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        f(t + step, y5, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                     e6 * k6[i] + e7 * k7[i]);
            const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err = std::max(err, std::abs(e) / scale);
        }
        if (!std::isfinite(err)) err = 1e10;

        if (err <= 1.0) {
            t = clipped ? target : t + step;
            y.swap(y5);
            k1.swap(k7);  // FSAL
            ++sol.steps;
            if (!all_finite(y)) throw IntegrationError("non-finite state", t);
            if (clipped) {
                record(sol, t, y);
                ++next_record;
            }
        } else {
            ++sol.rejected_steps;
        }
        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        // A clipped accepted step says nothing about the natural step size.
        if (!(clipped && err <= 1.0)) h = step * factor;
        else h = std::max(h, step * factor);
    }
    return sol;
}

}  // namespace

Solution integrate(const VectorField& field, std::span<const double> initial,
                   const IntegratorConfig& config) {
    config.validate();
    if (initial.empty()) throw UsageError("integrator: empty initial state");
    if (!all_finite(initial)) throw IntegrationError("non-finite initial state", 0.0);
    return config.method == Method::RK4Fixed ? integrate_rk4(field, initial, config)
                                             : integrate_rk45(field, initial, config);
}

}  // namespace ctm
