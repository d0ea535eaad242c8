#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "bidshade/grid.hpp"
#include "bidshade/wprox.hpp"
#include "test_support.hpp"

using namespace bidshade;

namespace {

double max_abs_diff(const ShadingDistribution& a, const ShadingDistribution& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

const ParameterGrid& symmetric_pair_grid() {
    static const ParameterGrid grid({{0.0, 0.0}, {1.0, 0.0}}, 0.8);
    return grid;
}

} // namespace

TEST_CASE("proximal_update: one-point simplex is a fixed point") {
    const ParameterGrid grid = build_grid({0.0, 0.0}, {0.0, 0.0}, 1, 1, 1.0);
    const auto mu = ShadingDistribution::uniform(1);
    const auto next = proximal_update(mu, {3.7}, grid, {1.0, 1.0});
    CHECK(next[0] == 1.0);
}

TEST_CASE("proximal_update: symmetric pair with constant r stays uniform") {
    const auto mu = ShadingDistribution::uniform(2);
    for (double c : {0.0, 0.7, -3.0}) {
        const auto next = proximal_update(mu, {c, c}, symmetric_pair_grid(), {1.0, 0.8});
        CHECK(next[0] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(next[1] == doctest::Approx(0.5).epsilon(1e-15));
    }
}

TEST_CASE("proximal_update matches the direct-minimization oracle on N=3") {
    const ParameterGrid grid({{0.0, 0.0}, {0.5, 0.0}, {1.0, 0.0}}, 0.8);
    const auto mu = ShadingDistribution::uniform(3);
    const std::vector<double> r{0.0, -1.0, 0.0};
    const ProximalConfig cfg{1.0, 0.8};

    const auto closed = proximal_update(mu, r, grid, cfg);
    const auto oracle = oracle_minimize(mu, r, grid, cfg);
    CHECK(max_abs_diff(closed, oracle) < 1e-6);

    // Mass must concentrate at the r-minimizing middle point.
    CHECK(closed[1] > closed[0]);
    CHECK(closed[1] > closed[2]);
}

TEST_CASE("oracle_minimize trivial cases") {
    const ParameterGrid one = build_grid({0.0, 0.0}, {0.0, 0.0}, 1, 1, 1.0);
    const auto mu1 = oracle_minimize(ShadingDistribution::uniform(1), {2.0}, one, {1.0, 1.0});
    CHECK(mu1[0] == doctest::Approx(1.0).epsilon(1e-12));

    const auto mu2 = oracle_minimize(ShadingDistribution::uniform(2), {0.4, 0.4},
                                     symmetric_pair_grid(), {1.0, 0.8});
    CHECK(mu2[0] == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(mu2[1] == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("oracle agreement on seeded random instances up to N=5") {
    Rng rng(210);
    for (std::size_t n = 2; n <= 5; ++n) {
        for (int trial = 0; trial < 3; ++trial) {
            const ParameterGrid grid = testing::random_grid(rng, n, 0.8);
            const auto mu = ShadingDistribution::from_weights(testing::random_simplex(rng, n));
            const auto r = testing::random_r(rng, n, -2.0, 2.0);
            const ProximalConfig cfg{1.0, 0.8};
            const auto closed = proximal_update(mu, r, grid, cfg);
            const auto oracle = oracle_minimize(mu, r, grid, cfg);
            CHECK(max_abs_diff(closed, oracle) < 1e-6);
        }
    }
}

TEST_CASE("dual_residual certifies the closed form and detects perturbations") {
    Rng rng(211);
    const ParameterGrid grid = testing::random_grid(rng, 6, 0.8);
    const auto mu = ShadingDistribution::from_weights(testing::random_simplex(rng, 6));
    const auto r = testing::random_r(rng, 6, -1.5, 1.5);
    const ProximalConfig cfg{1.0, 0.8};

    const auto next = proximal_update(mu, r, grid, cfg);
    CHECK(dual_residual(next, mu, r, grid, cfg) <= 1e-10);

    // One entry nudged by 1e-3 and renormalized must break the certificate.
    std::vector<double> perturbed = next.weights();
    perturbed[2] += 1e-3;
    const auto bad = ShadingDistribution::from_weights(perturbed, 1e-2).normalized();
    CHECK(dual_residual(bad, mu, r, grid, cfg) > 1e-4);
}

TEST_CASE("dual_residual is zero for the one-point simplex") {
    const ParameterGrid one = build_grid({0.0, 0.0}, {0.0, 0.0}, 1, 1, 1.0);
    const auto mu = ShadingDistribution::uniform(1);
    const auto next = proximal_update(mu, {0.0}, one, {1.0, 1.0});
    CHECK(dual_residual(next, mu, {0.0}, one, {1.0, 1.0}) == 0.0);
    // Nonzero r only adds one rounding in exp(-h r/eps) and its reciprocal.
    const auto next2 = proximal_update(mu, {0.3}, one, {1.0, 1.0});
    CHECK(dual_residual(next2, mu, {0.3}, one, {1.0, 1.0}) <= 1e-15);
}

TEST_CASE("proximal_update preserves normalization and positivity") {
    Rng rng(212);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform01() * 9);
        const ParameterGrid grid = testing::random_grid(rng, n, 0.5 + rng.uniform01());
        const auto mu = ShadingDistribution::from_weights(testing::random_simplex(rng, n));
        const auto r = testing::random_r(rng, n, -2.0, 2.0);
        const ProximalConfig cfg{0.5 + rng.uniform01(), grid.epsilon()};
        const auto next = proximal_update(mu, r, grid, cfg);
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(next[j] > 0.0);
            sum += next[j];
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("proximal_update is invariant to constant shifts of r") {
    Rng rng(213);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 3 + static_cast<std::size_t>(rng.uniform01() * 5);
        const ParameterGrid grid = testing::random_grid(rng, n, 0.8);
        const auto mu = ShadingDistribution::from_weights(testing::random_simplex(rng, n));
        const auto r = testing::random_r(rng, n, -2.0, 2.0);
        const ProximalConfig cfg{1.0, 0.8};
        const auto base = proximal_update(mu, r, grid, cfg);
        for (double c : {-1000.0, -1.0, 1.0, 1000.0}) {
            std::vector<double> shifted = r;
            for (double& rj : shifted) rj += c;
            const auto moved = proximal_update(mu, shifted, grid, cfg);
            CHECK(max_abs_diff(base, moved) <= 1e-12);
        }
    }
}

TEST_CASE("mass at the r-minimizer grows with the step size") {
    const ParameterGrid grid({{0.0, 0.0}, {0.35, 0.0}, {0.7, 0.0}, {1.0, 0.0}}, 0.8);
    const auto mu = ShadingDistribution::uniform(4);
    const std::vector<double> r{0.3, -0.9, 0.1, 0.5};  // unique argmin at 1
    double previous = mu[1];
    for (double h : {0.1, 1.0, 10.0}) {
        const auto next = proximal_update(mu, r, grid, {h, 0.8});
        CHECK(next[1] > previous);
        previous = next[1];
    }
}

TEST_CASE("h -> 0 limit recovers the kernel-smoothed previous distribution") {
    Rng rng(214);
    const std::size_t n = 5;
    const ParameterGrid grid = testing::random_grid(rng, n, 0.8);
    const auto mu = ShadingDistribution::from_weights(testing::random_simplex(rng, n));
    const auto r = testing::random_r(rng, n, -2.0, 2.0);

    // At h = 0 the update reduces to K^T (mu ./ (K 1)).
    std::vector<double> k1(n, 0.0), ratio(n), limit(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) k1[i] += grid.kernel(i, j);
    for (std::size_t i = 0; i < n; ++i) ratio[i] = mu[i] / k1[i];
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) limit[j] += grid.kernel(i, j) * ratio[i];

    const auto tiny = proximal_update(mu, r, grid, {1e-14, 0.8});
    for (std::size_t j = 0; j < n; ++j)
        CHECK(tiny[j] == doctest::Approx(limit[j]).epsilon(1e-10));
}

TEST_CASE("proximal_update rejects underflowing inputs") {
    // Far-apart points with small epsilon underflow the kernel column of the
    // r-minimizer, and an extreme r spread underflows the shifted scaling.
    const ParameterGrid grid({{0.0, 0.0}, {60.0, 0.0}}, 0.8);
    const auto mu = ShadingDistribution::uniform(2);
    CHECK_THROWS_AS(proximal_update(mu, {0.0, 1600.0}, grid, {1.0, 0.8}),
                    std::domain_error);
}

TEST_CASE("proximal_update input validation") {
    const ParameterGrid grid = symmetric_pair_grid();
    const auto mu = ShadingDistribution::uniform(2);
    CHECK_THROWS_AS(proximal_update(mu, {0.0}, grid, {1.0, 0.8}), std::invalid_argument);
    CHECK_THROWS_AS(proximal_update(mu, {0.0, 0.0}, grid, {0.0, 0.8}), std::invalid_argument);
    CHECK_THROWS_AS(proximal_update(mu, {0.0, 0.0}, grid, {1.0, -0.8}), std::invalid_argument);
}

TEST_CASE("entropic_distance trivial and symmetry properties") {
    const ParameterGrid one = build_grid({0.0, 0.0}, {0.0, 0.0}, 1, 1, 1.0);
    const auto p1 = ShadingDistribution::uniform(1);
    CHECK(std::abs(entropic_distance(p1, p1, one, 0.8)) < 1e-12);

    Rng rng(215);
    const ParameterGrid grid = testing::random_grid(rng, 5, 0.8);
    const auto p = ShadingDistribution::from_weights(testing::random_simplex(rng, 5));
    const auto q = ShadingDistribution::from_weights(testing::random_simplex(rng, 5));
    const double pq = entropic_distance(p, q, grid, 0.8);
    const double qp = entropic_distance(q, p, grid, 0.8);
    CHECK(pq == doctest::Approx(qp).epsilon(1e-10));
    CHECK(pq >= 0.0);
}

TEST_CASE("entropic_distance matches the one-parameter coupling oracle on N=2") {
    // Couplings of (1/2,1/2) with itself form the family
    //   M(a) = [[a, 1/2-a], [1/2-a, a]], a in [0, 1/2];
    // minimize cost + eps*KL(M | p x q) by direct scalar search.
    const double eps = 0.8;
    const auto value = [eps](double a) {
        const double b = 0.5 - a;
        double kl = 0.0;
        if (a > 0.0) kl += 2.0 * a * std::log(a / 0.25);
        if (b > 0.0) kl += 2.0 * b * std::log(b / 0.25);
        return 2.0 * b * 1.0 + eps * kl;
    };
    double best = value(0.25);
    double best_a = 0.25;
    for (int i = 0; i <= 500000; ++i) {
        const double a = 0.5 * i / 500000.0;
        const double v = value(a);
        if (v < best) {
            best = v;
            best_a = a;
        }
    }
    // Golden-section refinement around the scan minimum.
    double lo = std::max(0.0, best_a - 1e-5), hi = std::min(0.5, best_a + 1e-5);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 200; ++it) {
        const double x1 = hi - gr * (hi - lo);
        const double x2 = lo + gr * (hi - lo);
        if (value(x1) < value(x2)) hi = x2;
        else lo = x1;
    }
    best = value(0.5 * (lo + hi));

    const auto half = ShadingDistribution::uniform(2);
    const double computed = entropic_distance(half, half, symmetric_pair_grid(), eps);
    CHECK(computed == doctest::Approx(best).epsilon(1e-8));
}

TEST_CASE("entropic_distance rejects nonpositive marginals") {
    const auto ok = ShadingDistribution::uniform(2);
    const auto zero = ShadingDistribution::from_weights({1.0, 0.0});
    CHECK_THROWS_AS(entropic_distance(ok, zero, symmetric_pair_grid(), 0.8),
                    std::invalid_argument);
}
