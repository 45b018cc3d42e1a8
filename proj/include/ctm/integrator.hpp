#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ctm {

enum class Method { RK4Fixed, RK45Adaptive };

struct IntegratorConfig {
    Method method = Method::RK4Fixed;
    double dt = 0.01;        // fixed step, and initial step for RK45
    double t_end = 100.0;
    double abs_tol = 1e-9;
    double rel_tol = 1e-7;
    double steady_tol = 1e-10;  // sup-norm of the derivative; 0 disables
    int record_every = 1;       // output interval is dt*record_every

    /// Throws UsageError on non-positive step, horizon, tolerances.
    void validate() const;
};

/// dy/dt = f(t, y); the callee writes into `dydt`.
using VectorField = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Samples of an integration on the grid k*dt*record_every plus the final time.
struct Solution {
    std::size_t dim = 0;
    std::vector<double> times;
    std::vector<double> states;  // row-major, one row of `dim` per time
    bool steady_state_reached = false;
    std::size_t steps = 0;
    std::size_t rejected_steps = 0;

    std::size_t samples() const { return times.size(); }
    std::span<const double> state(std::size_t k) const {
        return {states.data() + k * dim, dim};
    }
    std::span<const double> final_state() const { return state(samples() - 1); }
};

/// Integrates from t=0. Stops early when steady_tol > 0 and the sup-norm of
/// the derivative drops below it. Throws IntegrationError on a non-finite
/// state or adaptive step underflow.
Solution integrate(const VectorField& field, std::span<const double> initial,
                   const IntegratorConfig& config);

}  // namespace ctm
