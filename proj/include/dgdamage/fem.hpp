#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "dgdamage/core.hpp"
#include "dgdamage/mesh.hpp"
#include "dgdamage/quadrature.hpp"
#include "dgdamage/tridiag.hpp"

namespace dgdamage {

using SpatialFn = std::function<double(double)>;          // f(x)
using SpaceTimeFn = std::function<double(double, double)>; // f(t, x)

/// Values attached to the spatial quadrature points, shaped elements x q.
struct QuadValues {
    int q = 0;
    std::vector<double> v;  // row-major: v[e*q + k]

    double& at(int e, int k) { return v[static_cast<std::size_t>(e) * q + k]; }
    double at(int e, int k) const { return v[static_cast<std::size_t>(e) * q + k]; }

    static QuadValues zero(int elements, int q) {
        QuadValues w;
        w.q = q;
        w.v.assign(static_cast<std::size_t>(elements) * q, 0.0);
        return w;
    }
};

// -- dirichlet <-> free index mapping (dirichlet basis = interior free hats) --

inline std::vector<double> pad_boundary(std::span<const double> interior) {
    std::vector<double> full(interior.size() + 2, 0.0);
    std::copy(interior.begin(), interior.end(), full.begin() + 1);
    return full;
}

inline std::vector<double> slice_interior(std::span<const double> full) {
    if (full.size() < 2) throw std::invalid_argument("slice_interior: vector too short");
    return std::vector<double>(full.begin() + 1, full.end() - 1);
}

inline TriMat restrict_interior(const TriMat& full) {
    const int n = full.n();
    TriMat m = TriMat::zero(n - 2);
    for (int i = 0; i < n - 2; ++i) m.di[i] = full.di[i + 1];
    for (int i = 0; i + 1 < n - 2; ++i) {
        m.lo[i] = full.lo[i + 1];
        m.up[i] = full.up[i + 1];
    }
    return m;
}

// -- P1 assembly ------------------------------------------------------------

inline TriMat assemble_mass(const SpatialMesh1D& mesh, Kind kind, MassMode mode = MassMode::consistent) {
    const int N = mesh.elements();
    TriMat m = TriMat::zero(N + 1);
    for (int e = 0; e < N; ++e) {
        const double h = mesh.element_length(e);
        if (mode == MassMode::consistent) {
            m.di[e] += h / 3.0;
            m.di[e + 1] += h / 3.0;
            m.lo[e] += h / 6.0;
            m.up[e] += h / 6.0;
        } else {
            m.di[e] += h / 2.0;
            m.di[e + 1] += h / 2.0;
        }
    }
    return kind == Kind::free ? m : restrict_interior(m);
}

inline TriMat assemble_stiffness(const SpatialMesh1D& mesh, Kind kind) {
    const int N = mesh.elements();
    TriMat m = TriMat::zero(N + 1);
    for (int e = 0; e < N; ++e) {
        const double h = mesh.element_length(e);
        m.di[e] += 1.0 / h;
        m.di[e + 1] += 1.0 / h;
        m.lo[e] -= 1.0 / h;
        m.up[e] -= 1.0 / h;
    }
    return kind == Kind::free ? m : restrict_interior(m);
}

/// Entry (i,j) = sum over element quadrature of weight * hat_i * hat_j.
/// With weight == 1 this reproduces the consistent mass matrix (the rule is
/// exact for quadratics).
inline TriMat assemble_weighted_mass(const SpatialMesh1D& mesh, Kind kind, const QuadValues& weight,
                                     const GaussRule& rule) {
    const int N = mesh.elements();
    if (weight.q != static_cast<int>(rule.node.size()) ||
        weight.v.size() != static_cast<std::size_t>(N) * weight.q)
        throw std::invalid_argument("assemble_weighted_mass: weight shape mismatch");
    TriMat m = TriMat::zero(N + 1);
    for (int e = 0; e < N; ++e) {
        const double h = mesh.element_length(e);
        for (int k = 0; k < weight.q; ++k) {
            const double theta = rule.node[k];
            const double w = rule.weight[k] * h * weight.at(e, k);
            const double phi_l = 1.0 - theta, phi_r = theta;
            m.di[e] += w * phi_l * phi_l;
            m.di[e + 1] += w * phi_r * phi_r;
            m.lo[e] += w * phi_l * phi_r;
            m.up[e] += w * phi_l * phi_r;
        }
    }
    return kind == Kind::free ? m : restrict_interior(m);
}

/// b_i = sum over quadrature of f(x) * hat_i(x), over the kind's dofs.
inline std::vector<double> load_vector(const SpatialMesh1D& mesh, Kind kind, const SpatialFn& f,
                                       const GaussRule& rule) {
    const int N = mesh.elements();
    std::vector<double> b(N + 1, 0.0);
    const int q = static_cast<int>(rule.node.size());
    for (int e = 0; e < N; ++e) {
        const double x0 = mesh.nodes[e], h = mesh.element_length(e);
        for (int k = 0; k < q; ++k) {
            const double theta = rule.node[k];
            const double w = rule.weight[k] * h * f(x0 + theta * h);
            b[e] += w * (1.0 - theta);
            b[e + 1] += w * theta;
        }
    }
    return kind == Kind::free ? b : slice_interior(b);
}

/// Load of per-quadrature-point values (used for the max nonlinearity, which
/// is not a P1 function). Always against the free basis.
inline std::vector<double> load_vector_from_quad(const SpatialMesh1D& mesh, const QuadValues& values,
                                                 const GaussRule& rule) {
    const int N = mesh.elements();
    std::vector<double> b(N + 1, 0.0);
    for (int e = 0; e < N; ++e) {
        const double h = mesh.element_length(e);
        for (int k = 0; k < values.q; ++k) {
            const double theta = rule.node[k];
            const double w = rule.weight[k] * h * values.at(e, k);
            b[e] += w * (1.0 - theta);
            b[e + 1] += w * theta;
        }
    }
    return b;
}

/// Spatial L2 projection: coefficients solve M c = load(f). Realizes the
/// projections P_h onto the P1 spaces.
inline std::vector<double> l2_project_space(const SpatialFn& f, const SpatialMesh1D& mesh, Kind kind,
                                            const QuadratureConfig& quad = {}) {
    const GaussRule rule = gauss_rule_01(quad.q_space);
    const TriMat m = assemble_mass(mesh, kind, MassMode::consistent);
    const TriLU lu(m);
    return lu.solve(load_vector(mesh, kind, f, rule));
}

/// Load vector of the slab average (1/tau_m) * int_{I_m} l(t,.) dt, by
/// q_time-point Gauss in time and q_space-point Gauss in space. Realizes the
/// temporal projection P_tau composed with spatial load assembly.
inline std::vector<double> time_average_load(const SpaceTimeFn& l, const TemporalMesh& tmesh, int m,
                                             const SpatialMesh1D& mesh, Kind kind,
                                             const QuadratureConfig& quad = {}) {
    if (m < 0 || m >= tmesh.slabs()) throw std::out_of_range("time_average_load: slab index");
    const GaussRule trule = gauss_rule_01(quad.q_time);
    const GaussRule xrule = gauss_rule_01(quad.q_space);
    const double t0 = tmesh.points[m], tau = tmesh.lengths[m];
    std::vector<double> acc(mesh.dofs(kind), 0.0);
    for (std::size_t k = 0; k < trule.node.size(); ++k) {
        const double t = t0 + trule.node[k] * tau;
        const auto bt = load_vector(mesh, kind, [&](double x) { return l(t, x); }, xrule);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += trule.weight[k] * bt[i];
    }
    // Gauss weights on [0,1] sum to 1, so acc is already the slab average.
    return acc;
}

/// sqrt(v' M v) — the discrete L2(Omega) norm of the P1 function with
/// coefficients v.
inline double mass_norm(const TriMat& mass, std::span<const double> v) {
    std::vector<double> mv(v.size());
    mass.matvec(v, mv);
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * mv[i];
    return std::sqrt(std::max(0.0, s));
}

inline double mass_inner(const TriMat& mass, std::span<const double> u, std::span<const double> v) {
    std::vector<double> mv(v.size());
    mass.matvec(v, mv);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * mv[i];
    return s;
}

}  // namespace dgdamage
