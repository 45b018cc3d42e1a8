#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "ctm/errors.hpp"
#include "ctm/sigmoid.hpp"

using Catch::Approx;
using ctm::Sigmoid;

namespace {

// Fourth-order central stencils (five points, seven for the third
// derivative) with step h applied to the value function.
double fd(const Sigmoid& s, double x, int order, double h) {
    if (order == 3)
        return (s.value(x - 3 * h) - 8 * s.value(x - 2 * h) + 13 * s.value(x - h) - 13 * s.value(x + h) +
                8 * s.value(x + 2 * h) - s.value(x + 3 * h)) / (8 * h * h * h);
    const double fm2 = s.value(x - 2 * h), fm1 = s.value(x - h), f0 = s.value(x);
    const double fp1 = s.value(x + h), fp2 = s.value(x + 2 * h);
    switch (order) {
        case 1: return (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h);
        default: return (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h);
    }
}

}  // namespace

TEST_CASE("tanh values", "[sigmoid]") {
    const Sigmoid s;
    CHECK(s.value(0.0) == 0.0);
    // tanh(1) to 16 digits, (e^2 - 1)/(e^2 + 1) evaluated in extended precision
    CHECK(s.value(1.0) == Approx(0.7615941559557649).epsilon(1e-15));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> x(-20.0, 20.0);
    for (int k = 0; k < 1000; ++k) {
        const double v = x(rng);
        CHECK(s.value(v) + s.value(-v) == 0.0);
        CHECK(std::abs(s.value(v)) <= 1.0);
        CHECK(s(v) == s.value(v));
    }
}

TEST_CASE("non-finite input is a domain error", "[sigmoid]") {
    const Sigmoid s;
    CHECK_THROWS_AS(s.value(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
    CHECK_THROWS_AS(s.value(std::numeric_limits<double>::infinity()), std::domain_error);
    CHECK_THROWS_AS(s.derivative(std::numeric_limits<double>::infinity(), 1), std::domain_error);
}

TEST_CASE("derivatives at the origin", "[sigmoid]") {
    const Sigmoid s;
    CHECK(s.derivative(0.0, 1) == 1.0);
    CHECK(s.derivative(0.0, 2) == 0.0);
    CHECK(s.derivative(0.0, 3) == -2.0);
    CHECK(fd(s, 0.0, 3, 1e-4) == Approx(-2.0).margin(1e-6));
}

TEST_CASE("unsupported derivative order", "[sigmoid]") {
    const Sigmoid s;
    CHECK_THROWS_AS(s.derivative(0.3, 0), ctm::UsageError);
    CHECK_THROWS_AS(s.derivative(0.3, 4), ctm::UsageError);
}

TEST_CASE("closed-form derivatives match finite differences", "[sigmoid]") {
    const Sigmoid s;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> x(-5.0, 5.0);
    // larger steps for higher orders keep rounding below truncation error
    const double step[4] = {0.0, 1e-3, 1e-3, 5e-3};
    for (int k = 0; k < 1000; ++k) {
        const double v = x(rng);
        for (int order = 1; order <= 3; ++order) {
            const double exact = s.derivative(v, order);
            CHECK(std::abs(exact - fd(s, v, order, step[order])) <= 1e-6 * std::max(1.0, std::abs(exact)));
        }
        CHECK(s.derivative(v, 1) > 0.0);
        if (v != 0.0) CHECK(std::signbit(s.derivative(v, 2)) != std::signbit(v));
    }
}
