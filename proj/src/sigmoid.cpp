#include "ctm/sigmoid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ctm/errors.hpp"

namespace ctm {

namespace {

void require_finite(double x) {
    if (!std::isfinite(x)) throw std::domain_error("sigmoid argument is not finite");
}

}  // namespace

double Sigmoid::value(double x) const {
    require_finite(x);
    return std::tanh(x);
}

double Sigmoid::derivative(double x, int order) const {
    require_finite(x);
    const double s = std::tanh(x);
    // sech^2 rather than 1 - tanh^2, which rounds to 0 for |x| > ~19
    const double c = std::cosh(x);
    const double d1 = 1.0 / (c * c);
    switch (order) {
        case 1:
            return d1;
        case 2:
            return -2.0 * s * d1;
        case 3: {
            const double d2 = -2.0 * s * d1;
            return -2.0 * d1 * d1 - 2.0 * s * d2;
        }
        default:
            throw UsageError("sigmoid derivative order must be 1, 2 or 3, got " +
                             std::to_string(order));
    }
}

}  // namespace ctm
