#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "dgdamage/core.hpp"
#include "dgdamage/fem.hpp"
#include "dgdamage/field.hpp"
#include "dgdamage/forward.hpp"
#include "dgdamage/nonsmooth.hpp"

namespace dgdamage {

struct DesiredStates {
    SpaceTimeFn phi_d;
    SpaceTimeFn d_d;
};

/// Per-slab data of the tracking terms, precomputed once per level:
///   F*_m = int_{I_m} loadvec(desired(t)) dt,
///   C*_m = int_{I_m} ||desired(t)||^2 dt (same quadrature).
/// With these, tracking values and their exact derivatives never re-evaluate
/// the analytic desired states.
struct TrackingData {
    std::vector<std::vector<double>> Fphi;  // dirichlet dofs per slab
    std::vector<std::vector<double>> Fd;    // free dofs per slab
    std::vector<double> Cphi, Cd;
};

inline TrackingData precompute_tracking(const DesiredStates& des, const Grids& grids,
                                        const QuadratureConfig& quad = {}) {
    const auto& tmesh = *grids.time;
    const auto& mesh = *grids.space;
    const GaussRule trule = gauss_rule_01(quad.q_time);
    const GaussRule xrule = gauss_rule_01(quad.q_space);
    const int M = tmesh.slabs();
    TrackingData td;
    td.Fphi.assign(M, std::vector<double>(mesh.dirichlet_dofs(), 0.0));
    td.Fd.assign(M, std::vector<double>(mesh.free_dofs(), 0.0));
    td.Cphi.assign(M, 0.0);
    td.Cd.assign(M, 0.0);
    std::vector<double> bphi(mesh.free_dofs()), bd(mesh.free_dofs());
    for (int m = 0; m < M; ++m) {
        const double t0 = tmesh.points[m], tau = tmesh.lengths[m];
        for (std::size_t k = 0; k < trule.node.size(); ++k) {
            const double t = t0 + trule.node[k] * tau;
            const double wt = trule.weight[k] * tau;
            std::fill(bphi.begin(), bphi.end(), 0.0);
            std::fill(bd.begin(), bd.end(), 0.0);
            double cphi = 0.0, cd = 0.0;
            for (int e = 0; e < mesh.elements(); ++e) {
                const double x0 = mesh.nodes[e], h = mesh.element_length(e);
                for (std::size_t j = 0; j < xrule.node.size(); ++j) {
                    const double theta = xrule.node[j];
                    const double w = xrule.weight[j] * h;
                    const double x = x0 + theta * h;
                    const double vphi = des.phi_d(t, x), vd = des.d_d(t, x);
                    bphi[e] += w * vphi * (1.0 - theta);
                    bphi[e + 1] += w * vphi * theta;
                    bd[e] += w * vd * (1.0 - theta);
                    bd[e + 1] += w * vd * theta;
                    cphi += w * vphi * vphi;
                    cd += w * vd * vd;
                }
            }
            for (int i = 1; i + 1 < mesh.free_dofs(); ++i) td.Fphi[m][i - 1] += wt * bphi[i];
            for (int i = 0; i < mesh.free_dofs(); ++i) td.Fd[m][i] += wt * bd[i];
            td.Cphi[m] += wt * cphi;
            td.Cd[m] += wt * cd;
        }
    }
    return td;
}

struct AdjointSolution {
    SpaceTimeField z;   // dirichlet
    SpaceTimeField p;   // free
    SpaceTimeField mu;  // free; g.p projected to nodes (consistent) / nodal (lumped)
    std::vector<int> fp_iterations;
};

/// Pointwise product mu = g . p of nodal weights and the adjoint state. With
/// g in [0,1], mu lies between 0 and p at every node.
inline SpaceTimeField compute_multiplier(const SpaceTimeField& p, const SpaceTimeField& g) {
    check_same_layout(p, g);
    SpaceTimeField mu = p;
    for (std::size_t i = 0; i < mu.coeffs.size(); ++i) mu.coeffs[i] *= g.coeffs[i];
    return mu;
}

/// Exact discrete adjoint of the regularized discrete state system, solved
/// backward slab by slab. For m = M..1, with g_m = max_eps'(-beta(d_m - phi_m) - r):
///   (A1)  alpha (grad z_m, grad psi) + beta (z_m, psi)
///           = (beta/delta)(g_m p_m, psi) - tau_m^-1 int_{I_m} (phi_m - phi_d, psi) dt
///   (A2)  (p_m, lam) + (tau_m beta/delta)(g_m p_m, lam)
///           = (p_{m+1}, lam) + tau_m beta (z_m, lam) - int_{I_m} (d_m - d_d, lam) dt
/// with p_{M+1} = 0, by inner fixed-point sweeps initialized at p_m = p_{m+1}.
inline AdjointSolution solve_adjoint(const ForwardSolution& fwd, const TrackingData& tracking,
                                     const ModelParams& params, const SolverConfig& config,
                                     const QuadratureConfig& quad = {}) {
    if (config.variant != MaxVariant::regularized)
        throw std::invalid_argument("solve_adjoint: forward solve must use the regularized variant");
    config.validate();
    const Grids& grids = fwd.phi.grids;
    const auto& mesh = *grids.space;
    const auto& tmesh = *grids.time;
    const double beta = params.beta, delta = params.delta, eps = config.eps;
    const int M = tmesh.slabs();
    const int nfree = mesh.free_dofs();
    const bool lumped = config.mass_mode == MassMode::lumped;

    const GaussRule xrule = gauss_rule_01(quad.q_space);
    const TriMat M_free = assemble_mass(mesh, Kind::free, MassMode::consistent);
    const TriLU M_lu(M_free);
    const TriMat Ml = assemble_mass(mesh, Kind::free, MassMode::lumped);
    const TriMat K = assemble_stiffness(mesh, Kind::dirichlet);
    const TriMat Mi = assemble_mass(mesh, Kind::dirichlet, MassMode::consistent);
    const TriLU A_lu(scaled(K, params.alpha) + scaled(Mi, beta));

    AdjointSolution sol;
    sol.z = SpaceTimeField::zeros(Kind::dirichlet, grids);
    sol.p = SpaceTimeField::zeros(Kind::free, grids);
    sol.mu = SpaceTimeField::zeros(Kind::free, grids);
    sol.fp_iterations.assign(M, 0);

    std::vector<double> p_next(nfree, 0.0);  // p_{M+1} = 0
    std::vector<double> diff(nfree), tmp(nfree);

    for (int m = M - 1; m >= 0; --m) {
        const double tau = tmesh.lengths[m];
        const double margin = tau * beta / delta;
        const auto phi_m = fwd.phi.row(m);
        const auto d_m = fwd.d.row(m);

        // tracking right-hand sides: int_{I_m} (state - desired, .) dt
        const auto padded_phi = pad_boundary(phi_m);
        std::vector<double> trkphi = slice_interior(M_free.matvec(padded_phi));
        for (std::size_t i = 0; i < trkphi.size(); ++i)
            trkphi[i] = tau * trkphi[i] - tracking.Fphi[m][i];
        std::vector<double> trkd = M_free.matvec(d_m);
        for (int i = 0; i < nfree; ++i) trkd[i] = tau * trkd[i] - tracking.Fd[m][i];

        // (p_{m+1}, lam) with the mass realization of the mode in use
        std::vector<double> rhs_p_const(nfree);
        if (!lumped) {
            M_free.matvec(p_next, rhs_p_const);
        } else {
            for (int i = 0; i < nfree; ++i) rhs_p_const[i] = Ml.di[i] * p_next[i];
        }
        for (int i = 0; i < nfree; ++i) rhs_p_const[i] -= trkd[i];

        // linearization weights of the max nonlinearity along the trajectory
        QuadValues g;
        std::vector<double> g_nodal;
        TriMat Wg;
        std::optional<TriLU> B_lu;
        if (!lumped) {
            g = driver_raw_at_quadrature(phi_m, d_m, params, mesh, xrule);
            for (auto& v : g.v) v = max_eps_prime(v, eps);
            Wg = assemble_weighted_mass(mesh, Kind::free, g, xrule);
            B_lu.emplace(M_free + scaled(Wg, tau * beta / delta));
        } else {
            g_nodal.resize(nfree);
            for (int i = 0; i < nfree; ++i) {
                const double ph = (i == 0 || i == nfree - 1) ? 0.0 : phi_m[i - 1];
                g_nodal[i] = max_eps_prime(-beta * (d_m[i] - ph) - params.r, eps);
            }
        }

        std::vector<double> p_k = p_next, p_new(nfree), z_k, zrhs;
        int iters = 0;
        double inc0 = -1.0;
        for (int k = 1; k <= config.fp_maxit; ++k) {
            // (A1) for the current p iterate
            std::vector<double> gp(nfree);
            if (!lumped) {
                Wg.matvec(p_k, gp);
            } else {
                for (int i = 0; i < nfree; ++i) gp[i] = Ml.di[i] * g_nodal[i] * p_k[i];
            }
            zrhs = slice_interior(gp);
            for (std::size_t i = 0; i < zrhs.size(); ++i)
                zrhs[i] = (beta / delta) * zrhs[i] - trkphi[i] / tau;
            z_k = A_lu.solve(zrhs);

            // (A2) with the fresh z
            const auto padded_z = pad_boundary(z_k);
            std::vector<double> rhs = M_free.matvec(padded_z);
            for (int i = 0; i < nfree; ++i) rhs[i] = rhs_p_const[i] + tau * beta * rhs[i];
            if (!lumped) {
                B_lu->solve(rhs, p_new);
            } else {
                for (int i = 0; i < nfree; ++i)
                    p_new[i] = rhs[i] / (Ml.di[i] * (1.0 + (tau * beta / delta) * g_nodal[i]));
            }

            for (int i = 0; i < nfree; ++i) diff[i] = p_new[i] - p_k[i];
            M_free.matvec(diff, tmp);
            double inc2 = 0.0;
            for (int i = 0; i < nfree; ++i) inc2 += diff[i] * tmp[i];
            const double inc = std::sqrt(std::max(0.0, inc2));
            std::swap(p_k, p_new);
            iters = k;
            if (!std::isfinite(inc)) detail::throw_diverged(m + 1, margin, k);
            if (inc <= config.fp_tol) break;
            if (k == 1)
                inc0 = inc;
            else if (k > 8 && inc > 1e6 * (inc0 + 1e-300))
                detail::throw_diverged(m + 1, margin, k);
            if (k == config.fp_maxit) detail::throw_diverged(m + 1, margin, k);
        }

        // final z consistent with the converged p
        {
            std::vector<double> gp(nfree);
            if (!lumped) {
                Wg.matvec(p_k, gp);
            } else {
                for (int i = 0; i < nfree; ++i) gp[i] = Ml.di[i] * g_nodal[i] * p_k[i];
            }
            zrhs = slice_interior(gp);
            for (std::size_t i = 0; i < zrhs.size(); ++i)
                zrhs[i] = (beta / delta) * zrhs[i] - trkphi[i] / tau;
            z_k = A_lu.solve(zrhs);
        }

        // multiplier approximation mu = g . p
        if (!lumped) {
            QuadValues gp_quad = QuadValues::zero(mesh.elements(), g.q);
            for (int e = 0; e < mesh.elements(); ++e) {
                for (int j = 0; j < g.q; ++j) {
                    const double theta = xrule.node[j];
                    const double pval = (1.0 - theta) * p_k[e] + theta * p_k[e + 1];
                    gp_quad.at(e, j) = g.at(e, j) * pval;
                }
            }
            const auto mload = load_vector_from_quad(mesh, gp_quad, xrule);
            const auto mu_m = M_lu.solve(mload);
            std::copy(mu_m.begin(), mu_m.end(), sol.mu.row(m).begin());
        } else {
            auto mu_row = sol.mu.row(m);
            for (int i = 0; i < nfree; ++i) mu_row[i] = g_nodal[i] * p_k[i];
        }

        std::copy(z_k.begin(), z_k.end(), sol.z.row(m).begin());
        std::copy(p_k.begin(), p_k.end(), sol.p.row(m).begin());
        sol.fp_iterations[m] = iters;
        p_next = std::move(p_k);
    }
    return sol;
}

inline AdjointSolution solve_adjoint(const ForwardSolution& fwd, const DesiredStates& des,
                                     const ModelParams& params, const SolverConfig& config,
                                     const QuadratureConfig& quad = {}) {
    return solve_adjoint(fwd, precompute_tracking(des, fwd.phi.grids, quad), params, config, quad);
}

}  // namespace dgdamage
