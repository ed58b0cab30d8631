#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "dgdamage/adjoint.hpp"
#include "dgdamage/core.hpp"
#include "dgdamage/fem.hpp"
#include "dgdamage/field.hpp"
#include "dgdamage/forward.hpp"
#include "dgdamage/tridiag.hpp"

namespace dgdamage {

/// Discrete control norm. seminorm: the H^1_{{0}} jump form
///   sum_{m=1}^M tau_m^-1 ||[l]_{m-1}||^2  (ghost 0 at t_0);
/// full: the H^1 form without an initial condition,
///   sum_{m=2}^M tau_m^-1 ||[l]_{m-1}||^2 + sum_m tau_m ||l_m||^2.
/// The slab-derivative terms vanish identically on dG(0).
enum class ControlNorm { seminorm, full };

inline double lsigma_inner(const SpaceTimeField& u, const SpaceTimeField& v, ControlNorm norm) {
    check_same_layout(u, v);
    const TriMat mass = assemble_mass(*u.grids.space, u.kind, MassMode::consistent);
    const auto& tau = u.grids.time->lengths;
    const int M = u.slabs();
    double acc = 0.0;
    const int m_first = norm == ControlNorm::seminorm ? 0 : 1;
    for (int m = m_first; m < M; ++m) {
        const auto ju = jump(u, m);
        const auto jv = jump(v, m);
        acc += mass_inner(mass, ju, jv) / tau[m];
    }
    if (norm == ControlNorm::full) {
        for (int m = 0; m < M; ++m) acc += tau[m] * mass_inner(mass, u.row(m), v.row(m));
    }
    return acc;
}

/// Temporal matrix K_t of the control norm: u' (K_t (x) M_x) v equals
/// lsigma_inner(u, v). Positive definite in both variants.
inline TriMat temporal_lsigma_matrix(const TemporalMesh& tmesh, ControlNorm norm) {
    const int M = tmesh.slabs();
    const auto& tau = tmesh.lengths;
    TriMat K = TriMat::zero(M);
    if (norm == ControlNorm::seminorm) K.di[0] += 1.0 / tau[0];
    for (int m = 1; m < M; ++m) {
        K.di[m - 1] += 1.0 / tau[m];
        K.di[m] += 1.0 / tau[m];
        K.lo[m - 1] -= 1.0 / tau[m];
        K.up[m - 1] -= 1.0 / tau[m];
    }
    if (norm == ControlNorm::full)
        for (int m = 0; m < M; ++m) K.di[m] += tau[m];
    return K;
}

/// Riesz representer of the objective derivative in the L_sigma inner
/// product: G = alpha_l (l - l_ref_proj) + H, where per spatial dof
/// K_t H = b with b_m = -tau_m z_m. The spatial mass matrix cancels on both
/// sides of the defining identity
///   (G, dl)_{L_sigma} = alpha_l (l - l_ref_proj, dl)_{L_sigma} - sum_m tau_m (z_m, dl_m).
inline SpaceTimeField riesz_gradient(const SpaceTimeField& z, const SpaceTimeField& l,
                                     const SpaceTimeField& l_ref_proj, ControlNorm norm,
                                     double alpha_l) {
    check_same_layout(l, l_ref_proj);
    if (!z.grids.same_as(l.grids)) throw std::invalid_argument("riesz_gradient: grid mismatch");
    const int M = l.slabs();
    const int dofs = l.dofs();
    const auto& tau = l.grids.time->lengths;
    const TriLU Kt_lu(temporal_lsigma_matrix(*l.grids.time, norm));

    SpaceTimeField G = SpaceTimeField::zeros(l.kind, l.grids);
    std::vector<double> b(M), h(M);
    const int nfree = l.grids.space->free_dofs();
    for (int j = 0; j < dofs; ++j) {
        for (int m = 0; m < M; ++m) {
            double zval = 0.0;
            if (z.kind == l.kind) {
                zval = z.row(m)[j];
            } else {
                // z dirichlet against a free-kind control dof
                if (j != 0 && j != nfree - 1) zval = z.row(m)[j - 1];
            }
            b[m] = -tau[m] * zval;
        }
        Kt_lu.solve(b, h);
        for (int m = 0; m < M; ++m) G.row(m)[j] = h[m];
    }
    for (int m = 0; m < M; ++m) {
        auto g = G.row(m);
        const auto lr = l.row(m);
        const auto rr = l_ref_proj.row(m);
        for (int j = 0; j < dofs; ++j) g[j] += alpha_l * (lr[j] - rr[j]);
    }
    return G;
}

struct OptimizerConfig {
    double alpha_l = 10.0;
    double epsilon = 1e-9;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    double s0 = 1.0;
    double grad_tol_abs = 1e-10;
    double grad_tol_rel = 1e-6;
    int maxit = 500;

    void validate() const {
        if (!(alpha_l > 0.0)) throw std::invalid_argument("OptimizerConfig: alpha_l must be > 0");
        if (!(epsilon > 0.0)) throw std::invalid_argument("OptimizerConfig: epsilon must be > 0");
        if (!(armijo_c > 0.0 && armijo_c < 1.0))
            throw std::invalid_argument("OptimizerConfig: armijo_c in (0,1)");
        if (!(backtrack > 0.0 && backtrack < 1.0))
            throw std::invalid_argument("OptimizerConfig: backtrack in (0,1)");
        if (!(s0 > 0.0)) throw std::invalid_argument("OptimizerConfig: s0 must be > 0");
        if (maxit < 1) throw std::invalid_argument("OptimizerConfig: maxit must be >= 1");
    }
};

struct OptimResult {
    SpaceTimeField l;
    bool converged = false;
    struct Entry {
        double objective;
        double grad_norm;  // ||G||_{L_sigma}
        double step;       // accepted step length (0 on the final entry)
    };
    std::vector<Entry> history;
};

/// Objective/gradient surface seen by the descent loop. inner() is the
/// L_sigma product defining the gradient geometry.
class DescentProblem {
public:
    virtual ~DescentProblem() = default;
    virtual double value(const SpaceTimeField& l) = 0;
    virtual SpaceTimeField gradient(const SpaceTimeField& l, double& value_out) = 0;
    virtual double inner(const SpaceTimeField& a, const SpaceTimeField& b) const = 0;
};

/// Gradient descent with Armijo backtracking. Accepts step s when
///   j(l - s G) <= j(l) - armijo_c s (G,G)_{L_sigma};
/// the next trial step is twice the last accepted one, capped at 1.
inline OptimResult armijo_descent(DescentProblem& prob, const SpaceTimeField& l_init,
                                  const OptimizerConfig& cfg) {
    cfg.validate();
    OptimResult res;
    SpaceTimeField l = l_init;
    double j = 0.0;
    SpaceTimeField G = prob.gradient(l, j);
    double gn2 = prob.inner(G, G);
    double gn = std::sqrt(std::max(0.0, gn2));
    const double tol = cfg.grad_tol_abs + cfg.grad_tol_rel * gn;
    double s = cfg.s0;

    for (int it = 0; it < cfg.maxit; ++it) {
        if (gn <= tol) {
            res.converged = true;
            res.history.push_back({j, gn, 0.0});
            break;
        }
        double strial = s;
        SpaceTimeField l_trial = axpy(l, -strial, G);
        double j_trial = prob.value(l_trial);
        while (!(j_trial <= j - cfg.armijo_c * strial * gn2)) {
            strial *= cfg.backtrack;
            if (strial < 1e-14)
                throw LineSearchFailure("armijo_descent: step length underflow below 1e-14");
            l_trial = axpy(l, -strial, G);
            j_trial = prob.value(l_trial);
        }
        res.history.push_back({j, gn, strial});
        l = std::move(l_trial);
        s = std::min(2.0 * strial, 1.0);
        G = prob.gradient(l, j);
        gn2 = prob.inner(G, G);
        gn = std::sqrt(std::max(0.0, gn2));
    }
    if (!res.converged) res.history.push_back({j, gn, 0.0});
    res.l = std::move(l);
    return res;
}

}  // namespace dgdamage
