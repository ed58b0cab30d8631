#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "dgdamage/fem.hpp"
#include "dgdamage/field.hpp"
#include "dgdamage/quadrature.hpp"

namespace dgdamage {

/// ||field - exact||_{L2(I x Omega)} by q_time x q_space Gauss per slab and
/// element.
inline double error_l2l2(const SpaceTimeField& f, const SpaceTimeFn& exact,
                         const QuadratureConfig& quad = {}) {
    const auto& tmesh = *f.grids.time;
    const auto& mesh = *f.grids.space;
    const GaussRule trule = gauss_rule_01(quad.q_time);
    const GaussRule xrule = gauss_rule_01(quad.q_space);
    const int nfree = mesh.free_dofs();
    double acc = 0.0;
    for (int m = 0; m < tmesh.slabs(); ++m) {
        const double t0 = tmesh.points[m], tau = tmesh.lengths[m];
        const auto row = f.row(m);
        const auto nodal = [&](int i) -> double {
            if (f.kind == Kind::free) return row[i];
            return (i == 0 || i == nfree - 1) ? 0.0 : row[i - 1];
        };
        for (std::size_t k = 0; k < trule.node.size(); ++k) {
            const double t = t0 + trule.node[k] * tau;
            const double wt = trule.weight[k] * tau;
            double space = 0.0;
            for (int e = 0; e < mesh.elements(); ++e) {
                const double x0 = mesh.nodes[e], h = mesh.element_length(e);
                const double vl = nodal(e), vr = nodal(e + 1);
                for (std::size_t j = 0; j < xrule.node.size(); ++j) {
                    const double theta = xrule.node[j];
                    const double diff = (1.0 - theta) * vl + theta * vr - exact(t, x0 + theta * h);
                    space += xrule.weight[j] * h * diff * diff;
                }
            }
            acc += wt * space;
        }
    }
    return std::sqrt(std::max(0.0, acc));
}

/// Exact L2(I x Omega) distance between two fields on the same grids (P1
/// difference integrated with the mass matrix).
inline double error_l2l2_fields(const SpaceTimeField& a, const SpaceTimeField& b) {
    check_same_layout(a, b);
    const TriMat mass = assemble_mass(*a.grids.space, a.kind, MassMode::consistent);
    double acc = 0.0;
    std::vector<double> diff(a.dofs());
    for (int m = 0; m < a.slabs(); ++m) {
        const auto ra = a.row(m), rb = b.row(m);
        for (int i = 0; i < a.dofs(); ++i) diff[i] = ra[i] - rb[i];
        const double nrm = mass_norm(mass, diff);
        acc += a.grids.time->lengths[m] * nrm * nrm;
    }
    return std::sqrt(std::max(0.0, acc));
}

/// max over slabs of the L2(Omega) distance.
inline double error_linf_l2_fields(const SpaceTimeField& a, const SpaceTimeField& b) {
    check_same_layout(a, b);
    const TriMat mass = assemble_mass(*a.grids.space, a.kind, MassMode::consistent);
    double worst = 0.0;
    std::vector<double> diff(a.dofs());
    for (int m = 0; m < a.slabs(); ++m) {
        const auto ra = a.row(m), rb = b.row(m);
        for (int i = 0; i < a.dofs(); ++i) diff[i] = ra[i] - rb[i];
        worst = std::max(worst, mass_norm(mass, diff));
    }
    return worst;
}

/// Experimental orders of convergence: rate_k = log(e_{k-1}/e_k) / log(p_{k-1}/p_k).
inline std::vector<double> eoc(std::span<const double> errors, std::span<const double> params) {
    if (errors.size() != params.size() || errors.size() < 2)
        throw std::invalid_argument("eoc: need >= 2 matching entries");
    for (std::size_t k = 0; k < errors.size(); ++k) {
        if (!(errors[k] > 0.0)) throw std::invalid_argument("eoc: errors must be positive");
        if (k > 0 && !(params[k] < params[k - 1]))
            throw std::invalid_argument("eoc: params must be strictly decreasing");
    }
    std::vector<double> rates(errors.size() - 1);
    for (std::size_t k = 1; k < errors.size(); ++k)
        rates[k - 1] = std::log(errors[k - 1] / errors[k]) / std::log(params[k - 1] / params[k]);
    return rates;
}

}  // namespace dgdamage
