#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dgdamage/core.hpp"
#include "dgdamage/fem.hpp"
#include "dgdamage/field.hpp"
#include "dgdamage/mesh.hpp"
#include "dgdamage/nonsmooth.hpp"

namespace dgdamage {

struct SolverConfig {
    double fp_tol = 1e-12;   // absolute fixed-point tolerance, mass-weighted norm
    int fp_maxit = 5000;
    MassMode mass_mode = MassMode::consistent;
    MaxVariant variant = MaxVariant::exact;
    double eps = 1e-9;       // width of max_eps for the regularized variant

    void validate() const {
        if (!(fp_tol > 0.0)) throw std::invalid_argument("SolverConfig: fp_tol must be > 0");
        if (fp_maxit < 1) throw std::invalid_argument("SolverConfig: fp_maxit must be >= 1");
        if (variant == MaxVariant::regularized && !(eps > 0.0))
            throw std::invalid_argument("SolverConfig: regularized variant needs eps > 0");
    }
};

/// Contraction diagnostics for the per-slab fixed point. The iteration map
/// has Lipschitz constant at most tau_m (beta/delta)(1 + L_Phi); the
/// practical indicator tau_m beta/delta is what separates the convergent and
/// divergent regimes in the benchmark runs.
struct ContractionReport {
    double practical = 0.0;   // max_m tau_m beta/delta
    double sufficient = 0.0;  // max_m tau_m (beta/delta)(1 + L_Phi), L_Phi = 1
    int level = 0;            // 0 ok, 1 warn (practical >= 1), 2 refuse (practical >= 2)
    std::string message;
};

inline ContractionReport check_contraction(const ModelParams& params, const TemporalMesh& tmesh) {
    ContractionReport rep;
    rep.practical = tmesh.tau_max * params.beta / params.delta;
    rep.sufficient = 2.0 * rep.practical;  // L2 operator bound of Phi_h gives L_Phi <= 1
    char buf[160];
    if (rep.practical >= 2.0) {
        rep.level = 2;
        std::snprintf(buf, sizeof buf,
                      "contraction margin tau*beta/delta = %.4g >= 2: fixed point will diverge",
                      rep.practical);
    } else if (rep.practical >= 1.0) {
        rep.level = 1;
        std::snprintf(buf, sizeof buf,
                      "contraction margin tau*beta/delta = %.4g in [1,2): convergence not guaranteed",
                      rep.practical);
    } else {
        rep.level = 0;
        std::snprintf(buf, sizeof buf, "contraction margin tau*beta/delta = %.4g", rep.practical);
    }
    rep.message = buf;
    return rep;
}

/// Factorizations and matrices shared by every slab of one solve.
struct ForwardSystem {
    ModelParams params;
    Grids grids;
    SolverConfig config;
    QuadratureConfig quad;
    GaussRule xrule;
    TriMat M_free;                 // consistent mass, all nodes
    std::optional<TriLU> M_lu;
    std::vector<double> lumped;    // lumped mass diagonal, all nodes
    TriMat A;                      // alpha K + beta M on interior nodes
    std::optional<TriLU> A_lu;

    static ForwardSystem build(const ModelParams& params, const Grids& grids, const SolverConfig& config,
                               const QuadratureConfig& quad = {}) {
        params.validate();
        config.validate();
        quad.validate();
        ForwardSystem ws;
        ws.params = params;
        ws.grids = grids;
        ws.config = config;
        ws.quad = quad;
        ws.xrule = gauss_rule_01(quad.q_space);
        const auto& mesh = *grids.space;
        ws.M_free = assemble_mass(mesh, Kind::free, MassMode::consistent);
        ws.M_lu.emplace(ws.M_free);
        const TriMat Ml = assemble_mass(mesh, Kind::free, MassMode::lumped);
        ws.lumped = Ml.di;
        const TriMat K = assemble_stiffness(mesh, Kind::dirichlet);
        const TriMat Mi = assemble_mass(mesh, Kind::dirichlet, MassMode::consistent);
        ws.A = scaled(K, params.alpha) + scaled(Mi, params.beta);
        ws.A_lu.emplace(ws.A);
        return ws;
    }

    /// Solves (alpha K + beta M) phi = beta (d, psi) + load over interior dofs.
    std::vector<double> elliptic(std::span<const double> load_dir, std::span<const double> d_free) const {
        std::vector<double> md(d_free.size());
        M_free.matvec(d_free, md);
        std::vector<double> rhs = slice_interior(md);
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = params.beta * rhs[i] + load_dir[i];
        return A_lu->solve(rhs);
    }

    double mass_norm_free(std::span<const double> v) const { return mass_norm(M_free, v); }
};

struct StepResult {
    std::vector<double> phi;  // interior dofs
    std::vector<double> d;    // all nodes
    int iterations = 0;
};

namespace detail {

inline void throw_diverged(int slab1, double margin, int iters) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "fixed point did not converge on slab %d after %d iterations (margin %.4g)", slab1,
                  iters, margin);
    throw NonConvergence(NonConvergence::Reason::fixed_point_diverged, slab1, margin, buf);
}

/// One slab of the coupled system: phi solves the elliptic equation for the
/// current d iterate, d is updated through the mass-projected max load
/// (consistent) or the nodal max (lumped).
inline StepResult step_fixed_point_impl(const ForwardSystem& ws, std::span<const double> d_prev, int m,
                                        std::span<const double> load_dir) {
    const auto& mesh = *ws.grids.space;
    const double tau = ws.grids.time->lengths[m];
    const double margin = tau * ws.params.beta / ws.params.delta;
    const double td = tau / ws.params.delta;
    const int nfree = mesh.free_dofs();
    const int nel = mesh.elements();
    const bool lumped = ws.config.mass_mode == MassMode::lumped;

    std::vector<double> d_k(d_prev.begin(), d_prev.end());
    std::vector<double> d_next(nfree), rhs(nfree), diff(nfree), tmp(nfree), phi;
    QuadValues w = QuadValues::zero(nel, ws.quad.q_space);

    std::vector<double> md_prev;
    if (!lumped) {
        md_prev.resize(nfree);
        ws.M_free.matvec(d_prev, md_prev);
    }

    double inc0 = -1.0;
    for (int k = 1; k <= ws.config.fp_maxit; ++k) {
        phi = ws.elliptic(load_dir, d_k);
        if (!lumped) {
            w = driver_raw_at_quadrature(phi, d_k, ws.params, mesh, ws.xrule);
            apply_max_variant(w, ws.config.variant, ws.config.eps);
            rhs = load_vector_from_quad(mesh, w, ws.xrule);
            for (int i = 0; i < nfree; ++i) rhs[i] = md_prev[i] + td * rhs[i];
            ws.M_lu->solve(rhs, d_next);
        } else {
            for (int i = 0; i < nfree; ++i) {
                const double ph = (i == 0 || i == nfree - 1) ? 0.0 : phi[i - 1];
                const double wi = -ws.params.beta * (d_k[i] - ph) - ws.params.r;
                const double v =
                    ws.config.variant == MaxVariant::exact ? max_plus(wi) : max_eps(wi, ws.config.eps);
                d_next[i] = d_prev[i] + td * v;
            }
        }
        for (int i = 0; i < nfree; ++i) diff[i] = d_next[i] - d_k[i];
        ws.M_free.matvec(diff, tmp);
        double inc2 = 0.0;
        for (int i = 0; i < nfree; ++i) inc2 += diff[i] * tmp[i];
        const double inc = std::sqrt(std::max(0.0, inc2));
        std::swap(d_k, d_next);
        if (!std::isfinite(inc)) throw_diverged(m + 1, margin, k);
        if (inc <= ws.config.fp_tol) {
            phi = ws.elliptic(load_dir, d_k);
            return {std::move(phi), std::move(d_k), k};
        }
        if (k == 1)
            inc0 = inc;
        else if (k > 8 && inc > 1e6 * (inc0 + 1e-300))
            throw_diverged(m + 1, margin, k);
    }
    throw_diverged(m + 1, margin, ws.config.fp_maxit);
    return {};
}

/// Lumped fast path: for fixed phi the nodal relation
///   d = d_prev + (tau/delta) max(-beta (d - phi) - r)
/// is solved exactly: d = d_prev where omega <= 0, else
///   (d_prev + (beta/delta) tau phi - (tau/delta) r) / (1 + (beta/delta) tau)
/// with omega = -beta (d_prev - phi) - r. Only the outer phi loop iterates.
inline double closed_form_update(double d_prev, double phi, double tau, const ModelParams& p) {
    const double omega = -p.beta * (d_prev - phi) - p.r;
    if (omega <= 0.0) return d_prev;
    const double bt = (p.beta / p.delta) * tau;
    return (d_prev + bt * phi - (tau / p.delta) * p.r) / (1.0 + bt);
}

inline StepResult step_closed_form_impl(const ForwardSystem& ws, std::span<const double> d_prev, int m,
                                        std::span<const double> load_dir) {
    if (ws.config.mass_mode != MassMode::lumped)
        throw std::invalid_argument("step_closed_form: requires lumped mass mode");
    if (ws.config.variant != MaxVariant::exact)
        throw std::invalid_argument("step_closed_form: requires the exact max variant");
    const auto& mesh = *ws.grids.space;
    const double tau = ws.grids.time->lengths[m];
    const double margin = tau * ws.params.beta / ws.params.delta;
    const int nfree = mesh.free_dofs();

    std::vector<double> d_k(d_prev.begin(), d_prev.end());
    std::vector<double> d_next(nfree), diff(nfree), tmp(nfree), phi;
    double inc0 = -1.0;
    for (int k = 1; k <= ws.config.fp_maxit; ++k) {
        phi = ws.elliptic(load_dir, d_k);
        for (int i = 0; i < nfree; ++i) {
            const double ph = (i == 0 || i == nfree - 1) ? 0.0 : phi[i - 1];
            d_next[i] = closed_form_update(d_prev[i], ph, tau, ws.params);
        }
        for (int i = 0; i < nfree; ++i) diff[i] = d_next[i] - d_k[i];
        ws.M_free.matvec(diff, tmp);
        double inc2 = 0.0;
        for (int i = 0; i < nfree; ++i) inc2 += diff[i] * tmp[i];
        const double inc = std::sqrt(std::max(0.0, inc2));
        std::swap(d_k, d_next);
        if (!std::isfinite(inc)) throw_diverged(m + 1, margin, k);
        if (inc <= ws.config.fp_tol) {
            phi = ws.elliptic(load_dir, d_k);
            return {std::move(phi), std::move(d_k), k};
        }
        if (k == 1)
            inc0 = inc;
        else if (k > 8 && inc > 1e6 * (inc0 + 1e-300))
            throw_diverged(m + 1, margin, k);
    }
    throw_diverged(m + 1, margin, ws.config.fp_maxit);
    return {};
}

}  // namespace detail

// -- single-slab entry points ------------------------------------------------

inline std::vector<double> elliptic_solve(std::span<const double> load_dir,
                                          std::span<const double> d_free, const ModelParams& params,
                                          const Grids& grids, const QuadratureConfig& quad = {}) {
    return ForwardSystem::build(params, grids, SolverConfig{}, quad).elliptic(load_dir, d_free);
}

inline StepResult step_fixed_point(std::span<const double> d_prev, int m,
                                   std::span<const double> load_dir, const ModelParams& params,
                                   const Grids& grids, const SolverConfig& config,
                                   const QuadratureConfig& quad = {}) {
    return detail::step_fixed_point_impl(ForwardSystem::build(params, grids, config, quad), d_prev, m,
                                         load_dir);
}

inline StepResult step_closed_form(std::span<const double> d_prev, int m,
                                   std::span<const double> load_dir, const ModelParams& params,
                                   const Grids& grids, const SolverConfig& config,
                                   const QuadratureConfig& quad = {}) {
    return detail::step_closed_form_impl(ForwardSystem::build(params, grids, config, quad), d_prev, m,
                                         load_dir);
}

// -- full trajectory ----------------------------------------------------------

enum class Stepper { fixed_point, closed_form };

struct ForwardSolution {
    SpaceTimeField phi;  // dirichlet
    SpaceTimeField d;    // free
    std::vector<double> d0;
    std::vector<int> fp_iterations;
    double contraction_margin = 0.0;
};

namespace detail {

template <class LoadProvider>
ForwardSolution solve_forward_generic(LoadProvider&& slab_load, const SpatialFn& d0,
                                      const ModelParams& params, const Grids& grids,
                                      const SolverConfig& config, const QuadratureConfig& quad,
                                      Stepper stepper) {
    const auto rep = check_contraction(params, *grids.time);
    if (rep.level >= 2)
        throw NonConvergence(NonConvergence::Reason::margin_refused, 0, rep.practical, rep.message);

    const ForwardSystem ws = ForwardSystem::build(params, grids, config, quad);
    ForwardSolution sol;
    sol.phi = SpaceTimeField::zeros(Kind::dirichlet, grids);
    sol.d = SpaceTimeField::zeros(Kind::free, grids);
    sol.contraction_margin = rep.practical;
    sol.d0 = l2_project_space(d0, *grids.space, Kind::free, quad);
    sol.fp_iterations.resize(grids.time->slabs());

    std::vector<double> d_prev = sol.d0;
    for (int m = 0; m < grids.time->slabs(); ++m) {
        const std::vector<double> load = slab_load(m);
        StepResult step = stepper == Stepper::fixed_point
                              ? detail::step_fixed_point_impl(ws, d_prev, m, load)
                              : detail::step_closed_form_impl(ws, d_prev, m, load);
        std::copy(step.phi.begin(), step.phi.end(), sol.phi.row(m).begin());
        std::copy(step.d.begin(), step.d.end(), sol.d.row(m).begin());
        sol.fp_iterations[m] = step.iterations;
        d_prev = std::move(step.d);
    }
    return sol;
}

}  // namespace detail

/// Control given as a dG(0) x P1 field; the load of slab m is the slab value.
inline ForwardSolution solve_forward(const SpaceTimeField& l, const SpatialFn& d0,
                                     const ModelParams& params, const Grids& grids,
                                     const SolverConfig& config, const QuadratureConfig& quad = {},
                                     Stepper stepper = Stepper::fixed_point) {
    if (!l.grids.same_as(grids)) throw std::invalid_argument("solve_forward: control on wrong grids");
    const TriMat M_free = assemble_mass(*grids.space, Kind::free, MassMode::consistent);
    auto slab_load = [&](int m) {
        std::vector<double> full;
        if (l.kind == Kind::free) {
            full = M_free.matvec(l.row(m));
        } else {
            const auto padded = pad_boundary(l.row(m));
            full = M_free.matvec(padded);
        }
        return slice_interior(full);
    };
    return detail::solve_forward_generic(slab_load, d0, params, grids, config, quad, stepper);
}

/// How an analytic control enters the discrete system. nodal_interpolant
/// discretizes l into the dG(0) x P1 space first (right slab endpoints, mesh
/// nodes) and is the treatment behind the benchmark tables; slab_average
/// assembles the exact load of P_tau l instead.
enum class ControlTreatment { nodal_interpolant, slab_average };

/// Analytic control.
inline ForwardSolution solve_forward(const SpaceTimeFn& l, const SpatialFn& d0,
                                     const ModelParams& params, const Grids& grids,
                                     const SolverConfig& config, const QuadratureConfig& quad = {},
                                     Stepper stepper = Stepper::fixed_point,
                                     ControlTreatment treatment = ControlTreatment::nodal_interpolant) {
    if (treatment == ControlTreatment::nodal_interpolant) {
        const SpaceTimeField lh = nodal_interpolant(l, Kind::free, grids);
        return solve_forward(lh, d0, params, grids, config, quad, stepper);
    }
    auto slab_load = [&](int m) {
        return time_average_load(l, *grids.time, m, *grids.space, Kind::dirichlet, quad);
    };
    return detail::solve_forward_generic(slab_load, d0, params, grids, config, quad, stepper);
}

}  // namespace dgdamage
