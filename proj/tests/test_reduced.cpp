#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "ctm/dynamics.hpp"
#include "ctm/errors.hpp"
#include "ctm/network.hpp"
#include "ctm/reduced.hpp"

using namespace ctm;
using Catch::Approx;

namespace {

double sup_norm(const ReducedState& y) { return y.vec().cwiseAbs().maxCoeff(); }

ReducedModel model(int N, int n, double eps, double beta = 0.0) { return {N, n, eps, beta}; }

CtmParams fixed_gain(double u) {
    CtmParams p;
    p.gain_mode = GainMode::Fixed;
    p.fixed_u = u;
    return p;
}

// Roots of g from a uniform scan with step 1e-6 on [-10, 10].
std::vector<double> brute_roots(const ReducedModel& m, double u) {
    std::vector<double> roots;
    const double h = 1e-6;
    double prev_y = -10.0, prev_g = symmetric_balance(m, u, prev_y);
    for (long k = 1; k <= 20000000; ++k) {
        const double y = -10.0 + k * h;
        const double g = symmetric_balance(m, u, y);
        if (g == 0.0 || (prev_g > 0.0) != (g > 0.0)) roots.push_back(0.5 * (prev_y + y));
        prev_y = y;
        prev_g = g;
    }
    return roots;
}

}  // namespace

TEST_CASE("reduced field at the origin", "[reduced]") {
    for (double u : {0.0, 1.0, 2.5}) {
        const auto f = reduced_field(model(11, 4, 0.2), u, {0, 0, 0});
        CHECK(f.y1 == Approx(2.4).epsilon(1e-15));
        CHECK(f.y2 == Approx(-2.4).epsilon(1e-15));
        CHECK(f.y3 == 0.0);
        const auto z = reduced_field(model(11, 4, 0.0), u, {0, 0, 0});
        CHECK(z.y1 == 0.0);
        CHECK(z.y2 == 0.0);
        CHECK(z.y3 == 0.0);
    }
    CHECK_THROWS_AS(reduced_field(model(8, 4, 0.1), 1.0, {0, 0, 0}), UsageError);
    CHECK_THROWS_AS(reduced_field(model(11, 1, 0.1), 1.0, {0, 0, 0}), UsageError);
}

TEST_CASE("reduced field written out term by term", "[reduced]") {
    const ReducedState y{0.3, 0.7, -0.2};
    const auto f = reduced_field(model(11, 4, 0.1, 0.8), 1.5, y);
    const double t1 = std::tanh(0.3), t2 = std::tanh(0.7), t3 = std::tanh(-0.2);
    CHECK(f.y1 == Approx(-6 * 0.3 + 3 * 1.5 * t1 + 3 * 1.5 * t3 + 1.2 + 0.2).epsilon(1e-14));
    CHECK(f.y2 == Approx(-6 * 0.7 + 3 * 1.5 * t2 + 3 * 1.5 * t3 - 1.2).epsilon(1e-14));
    CHECK(f.y3 == Approx(-10 * -0.2 + 2 * 1.5 * t3 + 4 * 1.5 * (t1 + t2)).epsilon(1e-14));
}

TEST_CASE("Z2 equivariance", "[reduced]") {
    CHECK(check_z2_equivariance(model(11, 4, 0.1), 1.5, {0.3, 0.7, -0.2}) <= 1e-14);
    CHECK(check_z2_equivariance(model(11, 4, 0.1), 1.5, {0.9, -0.9, 0.0}) <= 1e-15);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const ReducedState y{d(rng), d(rng), d(rng)};
        worst = std::max(worst, check_z2_equivariance(model(11, 4, 0.2), 2.0, y));
    }
    CHECK(worst <= 1e-12);
    const auto g = z2_action({1, 2, 3});
    CHECK(g.y1 == -2);
    CHECK(g.y2 == -1);
    CHECK(g.y3 == -3);
}

TEST_CASE("analytic Jacobian", "[reduced]") {
    Eigen::Matrix3d expected;
    expected << -3, 0, 3, 0, -3, 3, 4, 4, -8;
    const Eigen::Matrix3d J = reduced_jacobian(model(11, 4, 0.0), 1.0, {0, 0, 0});
    CHECK((J - expected).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(J.determinant()) <= 1e-12);

    const Eigen::Matrix3d D = reduced_jacobian(model(11, 4, 0.2), 0.0, {0.4, -1.0, 2.0});
    CHECK((D - Eigen::Vector3d(-6, -6, -10).asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff() == 0.0);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    const auto m = model(17, 5, 0.13, 0.3);
    for (int k = 0; k < 50; ++k) {
        const ReducedState y{d(rng), d(rng), d(rng)};
        const double u = 0.5 + std::abs(d(rng));
        const Eigen::Matrix3d Ja = reduced_jacobian(m, u, y);
        const double h = 1e-6;
        for (int col = 0; col < 3; ++col) {
            Eigen::Vector3d yp = y.vec(), ym = y.vec();
            yp[col] += h;
            ym[col] -= h;
            const Eigen::Vector3d fd = (reduced_field(m, u, ReducedState::from(yp)).vec() -
                                        reduced_field(m, u, ReducedState::from(ym)).vec()) / (2 * h);
            CHECK((Ja.col(col) - fd).cwiseAbs().maxCoeff() <= 1e-6);
        }
    }
}

TEST_CASE("symmetric equilibria", "[reduced]") {
    const auto at_zero = solve_y_star(model(11, 4, 0.2), 0.0);
    REQUIRE(at_zero.size() == 1);
    CHECK(at_zero[0].y_star == Approx(0.4).epsilon(1e-12));
    CHECK(at_zero[0].principal);

    for (double u : {0.5, 1.0, 2.0}) {
        const auto roots = solve_y_star(model(11, 4, 0.0), u);
        const bool has_zero = std::any_of(roots.begin(), roots.end(),
                                          [](const SymmetricEquilibrium& r) { return std::abs(r.y_star) <= 1e-12; });
        CHECK(has_zero);
    }

    const auto m = model(11, 4, 0.2);
    const auto roots = solve_y_star(m, 1.0);
    const auto oracle = brute_roots(m, 1.0);
    REQUIRE(roots.size() == oracle.size());
    int principal = 0;
    for (std::size_t k = 0; k < roots.size(); ++k) {
        CHECK(std::abs(roots[k].y_star - oracle[k]) <= 1e-6);
        CHECK(std::abs(roots[k].residual) <= 1e-12);
        principal += roots[k].principal;
    }
    CHECK(principal == 1);
}

TEST_CASE("principal root shortcut matches continuation", "[reduced]") {
    for (auto [N, n] : {std::pair{11, 4}, {21, 8}, {50, 15}, {100, 30}})
        for (double eps : {0.0, 0.05, 0.2, 0.45})
            for (double u : {0.0, 0.7, 1.5, 3.0, 6.0}) {
                const auto m = model(N, n, eps);
                const auto roots = solve_y_star(m, u);
                const auto it = std::find_if(roots.begin(), roots.end(),
                                             [](const SymmetricEquilibrium& r) { return r.principal; });
                REQUIRE(it != roots.end());
                INFO(N << " " << n << " " << eps << " " << u);
                CHECK(principal_y_star(m, u) == Approx(it->y_star).margin(1e-10));
                const double y = it->y_star;
                CHECK(sup_norm(reduced_field(m, u, {y, -y, 0.0})) <= 1e-10);
            }
}

TEST_CASE("mean state bookkeeping", "[reduced]") {
    const auto m = model(11, 4, 0.1);
    CHECK(mean_state(m, {1.0, 2.0, 3.0}) == Approx((4.0 + 8.0 + 9.0) / 11.0).epsilon(1e-15));
}

TEST_CASE("reduction is exact on cluster-uniform states", "[reduced]") {
    const int N = 11, n = 4;
    const double eps = 0.2, u = 1.4;
    const Network net = build_three_cluster({N, n, eps});
    const ReducedState y0{-0.6, 0.3, -1.1};
    std::vector<double> x0(N);
    for (int i = 0; i < N; ++i) x0[i] = i < n ? y0.y1 : i < 2 * n ? y0.y2 : y0.y3;

    IntegratorConfig ic;
    ic.t_end = 10.0;
    ic.steady_tol = 0.0;
    const auto full = simulate(net, fixed_gain(u), x0, 0.0, {}, ic);
    const auto red = simulate_reduced(model(N, n, eps), fixed_gain(u), y0, 0.0, ic);
    REQUIRE(full.samples() == red.times.size());
    double worst = 0.0, worst_bar = 0.0;
    for (std::size_t k = 0; k < full.samples(); ++k) {
        const auto x = full.state(k);
        double c[3] = {0, 0, 0};
        for (int i = 0; i < N; ++i) c[i < n ? 0 : i < 2 * n ? 1 : 2] += x[i];
        const ReducedState avg{c[0] / n, c[1] / n, c[2] / (N - 2 * n)};
        worst = std::max(worst, sup_norm(ReducedState::from(avg.vec() - red.states[k].vec())));
        worst_bar = std::max(worst_bar, std::abs(full.x_bar_series[k] - red.y_bar[k]));
    }
    CHECK(worst <= 1e-8);
    CHECK(worst_bar <= 1e-8);
}

TEST_CASE("non-uniform states converge to the reduced limit", "[reduced]") {
    const int N = 11, n = 4;
    const Network net = build_three_cluster({N, n, 0.2});
    const auto x0 = negative_mean_initial_state(N, 0, 4);
    ReducedState y0;
    for (int i = 0; i < N; ++i) (i < n ? y0.y1 : i < 2 * n ? y0.y2 : y0.y3) += x0[i];
    y0.y1 /= n;
    y0.y2 /= n;
    y0.y3 /= N - 2 * n;
    IntegratorConfig ic;
    ic.t_end = 40.0;
    ic.steady_tol = 0.0;
    const auto full = simulate(net, fixed_gain(1.4), x0, 0.0, {}, ic);
    const auto red = simulate_reduced(model(N, n, 0.2), fixed_gain(1.4), y0, 0.0, ic);
    const auto x = full.final_state();
    double c[3] = {0, 0, 0};
    for (int i = 0; i < N; ++i) c[i < n ? 0 : i < 2 * n ? 1 : 2] += x[i];
    CHECK(c[0] / n == Approx(red.states.back().y1).margin(1e-8));
    CHECK(c[1] / n == Approx(red.states.back().y2).margin(1e-8));
    CHECK(c[2] / (N - 2 * n) == Approx(red.states.back().y3).margin(1e-8));
}
