#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>

#include "dgdamage/control.hpp"
#include "dgdamage/core.hpp"
#include "dgdamage/fem.hpp"
#include "dgdamage/nonsmooth.hpp"

namespace dgdamage {

/// Analytic exact-solution bundle for one benchmark problem. phi_xx and d_t
/// are the closed-form derivatives used by the residual self-check;
/// near_kink marks the loci where the exact solution is not smooth.
struct ManufacturedCase {
    std::string label;
    ModelParams params;
    double xa = 0.0, xb = 1.0;
    SpaceTimeFn phi_exact, d_exact, l_exact;
    SpatialFn d0;
    std::function<double(double)> t_active;  // case 1 only
    SpaceTimeFn phi_xx, d_t;
    std::function<bool(double, double)> near_kink;  // (t, x)
    ControlNorm norm_variant = ControlNorm::seminorm;
};

/// First benchmark problem: activation front moving in time, biactive set of
/// zero measure. The damage kinks along t_a(x) = r / (beta sin(3 pi x)).
inline ManufacturedCase case_one() {
    ManufacturedCase c;
    c.label = "case1";
    c.params = ModelParams{1.0, 50.0, 0.1, 12.5, 1.0};
    c.norm_variant = ControlNorm::seminorm;
    const double pi = 3.14159265358979323846;
    const double alpha = c.params.alpha, beta = c.params.beta, delta = c.params.delta, r = c.params.r;
    const double rb = r / beta;          // 0.25
    const double bd = beta / delta;      // 500
    const double db = delta / beta;      // 0.002

    c.phi_exact = [pi](double t, double x) { return std::sin(3.0 * pi * x) * t; };
    c.phi_xx = [pi](double t, double x) { return -9.0 * pi * pi * std::sin(3.0 * pi * x) * t; };
    c.t_active = [pi, rb](double x) {
        const double s = std::sin(3.0 * pi * x);
        return s > 0.0 ? rb / s : std::numeric_limits<double>::infinity();
    };
    c.d0 = [](double) { return 0.0; };
    c.d_exact = [pi, rb, bd, db](double t, double x) {
        const double s = std::sin(3.0 * pi * x);
        if (s <= 0.0) return 0.0;
        const double ta = rb / s;
        if (t <= ta) return 0.0;
        return s * t - rb - db * s * (1.0 - std::exp(bd * (ta - t)));
    };
    c.d_t = [pi, rb, bd](double t, double x) {
        const double s = std::sin(3.0 * pi * x);
        if (s <= 0.0) return 0.0;
        const double ta = rb / s;
        if (t <= ta) return 0.0;
        return s * (1.0 - std::exp(bd * (ta - t)));
    };
    c.l_exact = [phi = c.phi_exact, d = c.d_exact, alpha, beta, pi](double t, double x) {
        return (9.0 * alpha * pi * pi + beta) * phi(t, x) - beta * d(t, x);
    };
    c.near_kink = [pi, rb](double t, double x) {
        const double s = std::sin(3.0 * pi * x);
        if (std::abs(s) < 1e-2) return true;
        if (s > 0.0 && std::abs(t - rb / s) < 1e-2) return true;
        return false;
    };
    return c;
}

/// Second benchmark problem: stationary plateau phi = r/beta on (1/3, 2/3)
/// gives a biactive set of positive measure for all t.
inline ManufacturedCase case_two() {
    ManufacturedCase c;
    c.label = "case2";
    c.params = ModelParams{1.0, 1.0, 0.1, 0.25, 1.0};
    c.norm_variant = ControlNorm::full;
    const double alpha = c.params.alpha, beta = c.params.beta, delta = c.params.delta;
    const double rb = c.params.r / beta;  // 0.25
    const double bd = beta / delta;       // 10

    auto phi2 = [rb](double x) {
        if (x <= 1.0 / 3.0) return 9.0 * rb * (((-27.0 * x + 30.0) * x - 12.0) * x + 2.0) * x;
        if (x < 2.0 / 3.0) return rb;
        return 9.0 * rb * ((((-27.0 * x + 78.0) * x - 84.0) * x + 40.0) * x - 7.0);
    };
    auto phi2_xx = [rb](double x) {
        if (x <= 1.0 / 3.0) return 9.0 * rb * ((-324.0 * x + 180.0) * x - 24.0);
        if (x < 2.0 / 3.0) return 0.0;
        return 9.0 * rb * ((-324.0 * x + 468.0) * x - 168.0);
    };
    auto bump = [phi2, rb](double x) { return max_plus(phi2(x) - rb); };

    c.phi_exact = [phi2](double, double x) { return phi2(x); };
    c.phi_xx = [phi2_xx](double, double x) { return phi2_xx(x); };
    c.d0 = [](double) { return 0.0; };
    c.d_exact = [bump, bd](double t, double x) { return bump(x) * (1.0 - std::exp(-bd * t)); };
    c.d_t = [bump, bd](double t, double x) { return bump(x) * bd * std::exp(-bd * t); };
    c.l_exact = [d = c.d_exact, alpha, beta, phi2, phi2_xx](double t, double x) {
        return -alpha * phi2_xx(x) + beta * phi2(x) - beta * d(t, x);
    };
    c.near_kink = [](double, double x) {
        const double kinks[] = {1.0 / 9.0, 1.0 / 3.0, 2.0 / 3.0, 8.0 / 9.0};
        for (double k : kinks)
            if (std::abs(x - k) < 1e-2) return true;
        return false;
    };
    return c;
}

inline ManufacturedCase case_by_id(int id) {
    if (id == 1) return case_one();
    if (id == 2) return case_two();
    throw std::invalid_argument("case_by_id: case must be 1 or 2");
}

/// Strong-form residuals of the manufactured solution at random sample
/// points away from the kink loci:
///   |-alpha phi_xx + beta phi - beta d - l|  and
///   |d_t - (1/delta) max(-beta (d - phi) - r, 0)|.
inline double residual_check(const ManufacturedCase& c, int n_samples, unsigned seed = 12345) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ut(0.0, c.params.T), ux(c.xa, c.xb);
    double worst = 0.0;
    int accepted = 0;
    long attempts = 0;
    const long max_attempts = 100L * n_samples + 1000;
    while (accepted < n_samples && attempts < max_attempts) {
        ++attempts;
        const double t = ut(rng), x = ux(rng);
        if (c.near_kink && c.near_kink(t, x)) continue;
        ++accepted;
        const double phi = c.phi_exact(t, x), d = c.d_exact(t, x), l = c.l_exact(t, x);
        const double r1 = std::abs(-c.params.alpha * c.phi_xx(t, x) + c.params.beta * phi -
                                   c.params.beta * d - l);
        const double r2 = std::abs(c.d_t(t, x) - max_plus(-c.params.beta * (d - phi) - c.params.r) /
                                                     c.params.delta);
        worst = std::max(worst, std::max(r1, r2));
    }
    if (accepted < n_samples) throw std::runtime_error("residual_check: sampling starved by kink filter");
    return worst;
}

}  // namespace dgdamage
