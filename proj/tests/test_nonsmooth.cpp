#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dgdamage/fem.hpp"
#include "dgdamage/mesh.hpp"
#include "dgdamage/nonsmooth.hpp"

using namespace dgdamage;

TEST_CASE("max_plus basics") {
    CHECK(max_plus(-1.0) == 0.0);
    CHECK(max_plus(0.0) == 0.0);
    CHECK(max_plus(2.5) == 2.5);
}

TEST_CASE("max_eps branch values and seams") {
    const double eps = 1e-3;
    CHECK(max_eps(-1.0, eps) == 0.0);
    CHECK(max_eps(0.0, eps) == 0.0);
    // both middle and upper branch give eps/2 at the seam
    CHECK(max_eps(eps, eps) == Catch::Approx(eps / 2.0));
    CHECK(max_eps(2.0 * eps, eps) == Catch::Approx(1.5 * eps));
    // quartic branch at eps/2: -eps/32 + eps/8 = 3 eps / 32
    CHECK(max_eps(eps / 2.0, eps) == Catch::Approx(3.0 * eps / 32.0));
    CHECK_THROWS_AS(max_eps(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("max_eps_prime branch values, range and seams") {
    const double eps = 1e-3;
    CHECK(max_eps_prime(-2.0, eps) == 0.0);
    CHECK(max_eps_prime(0.0, eps) == 0.0);
    CHECK(max_eps_prime(eps, eps) == Catch::Approx(1.0));
    CHECK(max_eps_prime(5.0, eps) == 1.0);
    CHECK(max_eps_prime(eps / 2.0, eps) == Catch::Approx(0.5));
    CHECK_THROWS_AS(max_eps_prime(1.0, -1.0), std::invalid_argument);

    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-3.0 * eps, 3.0 * eps);
    double last_x = -4.0 * eps, last_v = 0.0;
    std::vector<double> xs(2000);
    for (auto& x : xs) x = u(rng);
    std::sort(xs.begin(), xs.end());
    for (double x : xs) {
        const double p = max_eps_prime(x, eps);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        const double v = max_eps(x, eps);
        if (x > last_x) CHECK(v >= last_v - 1e-18);  // monotone nondecreasing
        last_x = x;
        last_v = v;
    }
}

TEST_CASE("Lipschitz, ordering and regularization-error bounds (sampled)") {
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> wide(-50.0, 50.0), pos(1e-6, 10.0);
    const double eps = 1e-3;
    for (int k = 0; k < 100000; ++k) {
        const double a = wide(rng), b = wide(rng), r = pos(rng);
        CHECK(std::abs(max_plus(a) - max_plus(b)) <= std::abs(a - b));
        CHECK(max_plus(a - r) <= max_plus(a));
        CHECK(max_plus(a) <= std::abs(a));
        const double diff = max_plus(a) - max_eps(a, eps);
        CHECK(diff >= 0.0);
        CHECK(diff <= 0.5 * eps + 1e-15 * std::abs(a));  // ulp slack of the tail subtraction
    }
    // dense sampling across the transition band
    for (int k = 0; k <= 4000; ++k) {
        const double x = -2.0 * eps + k * (4.0 * eps / 4000.0);
        const double diff = max_plus(x) - max_eps(x, eps);
        CHECK(diff >= 0.0);
        CHECK(diff <= 0.5 * eps * (1.0 + 1e-12));
    }
}

TEST_CASE("driver at quadrature points") {
    const auto mesh = build_spatial_mesh(0.0, 1.0, 4);
    const GaussRule rule = gauss_rule_01(4);
    ModelParams params{1.0, 2.0, 1.0, 0.3, 1.0};

    // phi = d nodally (phi dirichlet: compare on interior profile with zero
    // boundary) -> w = -r < 0 -> exact variant vanishes
    std::vector<double> phi(mesh.dirichlet_dofs(), 0.7);
    std::vector<double> d(mesh.free_dofs(), 0.7);
    d.front() = 0.0;
    d.back() = 0.0;
    const auto w0 = driver_at_quadrature(phi, d, params, mesh, rule, MaxVariant::exact);
    for (double v : w0.v) CHECK(v == 0.0);

    // phi = d + 2r/beta -> w = r > 0 -> output r (checked away from the
    // boundary elements where the dirichlet profile ramps to zero)
    std::vector<double> phi2(mesh.dirichlet_dofs());
    std::vector<double> d2(mesh.free_dofs(), 0.0);
    for (auto& v : phi2) v = 2.0 * params.r / params.beta;
    const auto w1 = driver_at_quadrature(phi2, d2, params, mesh, rule, MaxVariant::exact);
    for (int k = 0; k < w1.q; ++k) CHECK(w1.at(1, k) == Catch::Approx(params.r));

    // the regularized variant differs from exact by at most eps/2 everywhere
    const double eps = 1e-9;
    const auto wr = driver_at_quadrature(phi2, d2, params, mesh, rule, MaxVariant::regularized, eps);
    for (std::size_t i = 0; i < wr.v.size(); ++i)
        CHECK(std::abs(wr.v[i] - w1.v[i]) <= 0.5 * eps * (1.0 + 1e-12));

    std::vector<double> bad(2, 0.0);
    CHECK_THROWS_AS(driver_raw_at_quadrature(bad, d, params, mesh, rule), std::invalid_argument);
}
