#pragma once

#include <span>
#include <stdexcept>

#include "dgdamage/core.hpp"
#include "dgdamage/fem.hpp"

namespace dgdamage {

inline double max_plus(double x) { return x > 0.0 ? x : 0.0; }

/// C^1 polynomial regularization of max(.,0):
///   0                       for x <= 0
///   -x^4/(2 eps^3) + x^3/eps^2   on (0, eps)
///   x - eps/2               for x >= eps
/// Satisfies 0 <= max_plus(x) - max_eps(x) <= eps/2 for all x.
inline double max_eps(double x, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("max_eps: eps must be > 0");
    if (x <= 0.0) return 0.0;
    if (x >= eps) return x - 0.5 * eps;
    const double x3 = x * x * x;
    return -x3 * x / (2.0 * eps * eps * eps) + x3 / (eps * eps);
}

/// Derivative of max_eps: 0 for x <= 0, -2x^3/eps^3 + 3x^2/eps^2 on (0, eps),
/// 1 for x >= eps. Continuous, values in [0, 1].
inline double max_eps_prime(double x, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("max_eps_prime: eps must be > 0");
    if (x <= 0.0) return 0.0;
    if (x >= eps) return 1.0;
    const double s = x / eps;
    return s * s * (3.0 - 2.0 * s);
}

enum class MaxVariant { exact, regularized };

/// Nonlinearity argument w = -beta (d - phi) - r at the element quadrature
/// points, by P1 interpolation of the slab values. phi is dirichlet-kind
/// (interior coefficients), d free-kind.
inline QuadValues driver_raw_at_quadrature(std::span<const double> phi_interior,
                                           std::span<const double> d_free, const ModelParams& params,
                                           const SpatialMesh1D& mesh, const GaussRule& rule) {
    const int N = mesh.elements();
    if (static_cast<int>(phi_interior.size()) != mesh.dirichlet_dofs() ||
        static_cast<int>(d_free.size()) != mesh.free_dofs())
        throw std::invalid_argument("driver_raw_at_quadrature: shape mismatch");
    const int q = static_cast<int>(rule.node.size());
    QuadValues w = QuadValues::zero(N, q);
    const auto phi_at = [&](int i) -> double {
        return (i == 0 || i == N) ? 0.0 : phi_interior[i - 1];
    };
    for (int e = 0; e < N; ++e) {
        const double pl = phi_at(e), pr = phi_at(e + 1);
        const double dl = d_free[e], dr = d_free[e + 1];
        for (int k = 0; k < q; ++k) {
            const double theta = rule.node[k];
            const double phi = (1.0 - theta) * pl + theta * pr;
            const double d = (1.0 - theta) * dl + theta * dr;
            w.at(e, k) = -params.beta * (d - phi) - params.r;
        }
    }
    return w;
}

inline void apply_max_variant(QuadValues& w, MaxVariant variant, double eps) {
    if (variant == MaxVariant::exact) {
        for (auto& v : w.v) v = max_plus(v);
    } else {
        for (auto& v : w.v) v = max_eps(v, eps);
    }
}

/// max-variant applied to the driver; this is what the discrete ODE tests
/// against P1 functions.
inline QuadValues driver_at_quadrature(std::span<const double> phi_interior,
                                       std::span<const double> d_free, const ModelParams& params,
                                       const SpatialMesh1D& mesh, const GaussRule& rule,
                                       MaxVariant variant, double eps = 0.0) {
    QuadValues w = driver_raw_at_quadrature(phi_interior, d_free, params, mesh, rule);
    apply_max_variant(w, variant, eps);
    return w;
}

}  // namespace dgdamage
