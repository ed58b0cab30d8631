#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "dgdamage/adjoint.hpp"
#include "dgdamage/cases.hpp"
#include "dgdamage/control.hpp"
#include "dgdamage/forward.hpp"

namespace dgdamage {

/// How the analytic reference control is represented in the discrete
/// control space for the shifted regularizer: Pi = I_tau composed with
/// nodal spatial interpolation (matches the benchmark tables) or with the
/// spatial L2 projection.
enum class ReferenceProjection { nodal_interpolation, l2_projection };

/// Data defining one instance of the discrete optimal control problem:
/// tracking toward the desired states plus the shifted L_sigma regularizer
/// (alpha_l/2) ||l - Pi l_ref||^2.
struct ControlProblemSpec {
    ModelParams params;
    DesiredStates desired;
    SpatialFn d0;
    SpaceTimeFn l_ref;  // may be empty: regularize toward zero
    ControlNorm norm = ControlNorm::seminorm;
    ReferenceProjection projection = ReferenceProjection::nodal_interpolation;

    static ControlProblemSpec from_case(const ManufacturedCase& c) {
        ControlProblemSpec s;
        s.params = c.params;
        s.desired = DesiredStates{c.phi_exact, c.d_exact};
        s.d0 = c.d0;
        s.l_ref = c.l_exact;
        s.norm = c.norm_variant;
        return s;
    }
};

/// Discrete objective and its exact adjoint gradient. The optimization
/// always runs the regularized state solver so that objective and gradient
/// are mutually consistent. Tracking terms are evaluated through the
/// precomputed quadrature data (quadratic expansion in the slab values), so
/// repeated objective evaluations never touch the analytic desired states.
class ControlProblem : public DescentProblem {
public:
    ControlProblem(const ControlProblemSpec& spec, const Grids& grids, SolverConfig scfg,
                   OptimizerConfig ocfg, QuadratureConfig quad = {})
        : spec_(spec), grids_(grids), scfg_(scfg), ocfg_(ocfg), quad_(quad) {
        ocfg_.validate();
        scfg_.variant = MaxVariant::regularized;
        scfg_.eps = ocfg_.epsilon;
        scfg_.validate();
        tracking_ = precompute_tracking(spec_.desired, grids_, quad_);
        M_free_ = assemble_mass(*grids_.space, Kind::free, MassMode::consistent);
        l_ref_proj_ = SpaceTimeField::zeros(Kind::free, grids_);
        if (spec_.l_ref) {
            if (spec_.projection == ReferenceProjection::nodal_interpolation) {
                l_ref_proj_ = nodal_interpolant(spec_.l_ref, Kind::free, grids_);
            } else {
                for (int m = 0; m < grids_.time->slabs(); ++m) {
                    const double tm = grids_.time->points[m + 1];
                    const auto row = l2_project_space([&](double x) { return spec_.l_ref(tm, x); },
                                                      *grids_.space, Kind::free, quad_);
                    std::copy(row.begin(), row.end(), l_ref_proj_.row(m).begin());
                }
            }
        }
    }

    double value(const SpaceTimeField& l) override {
        return tracking_value(forward_for(l)) + regularizer(l);
    }

    SpaceTimeField gradient(const SpaceTimeField& l, double& value_out) override {
        const ForwardSolution& fwd = forward_for(l);
        value_out = tracking_value(fwd) + regularizer(l);
        const AdjointSolution adj = solve_adjoint(fwd, tracking_, spec_.params, scfg_, quad_);
        return riesz_gradient(adj.z, l, l_ref_proj_, spec_.norm, ocfg_.alpha_l);
    }

    double inner(const SpaceTimeField& a, const SpaceTimeField& b) const override {
        return lsigma_inner(a, b, spec_.norm);
    }

    const SpaceTimeField& reference_projection() const { return l_ref_proj_; }
    const Grids& grids() const { return grids_; }
    const SolverConfig& solver_config() const { return scfg_; }
    const OptimizerConfig& optimizer_config() const { return ocfg_; }
    const ControlProblemSpec& spec() const { return spec_; }

    const ForwardSolution& forward_for(const SpaceTimeField& l) {
        if (!cache_ || cache_->first != l.coeffs) {
            ForwardSolution fwd = solve_forward(l, spec_.d0, spec_.params, grids_, scfg_, quad_);
            cache_.emplace(l.coeffs, std::move(fwd));
        }
        return cache_->second;
    }

    double tracking_value(const ForwardSolution& fwd) const {
        const auto& tau = grids_.time->lengths;
        double acc = 0.0;
        for (int m = 0; m < grids_.time->slabs(); ++m) {
            const auto phi = fwd.phi.row(m);
            const auto padded = pad_boundary(phi);
            const auto mphi = M_free_.matvec(padded);
            double qphi = 0.0, fphi = 0.0;
            for (std::size_t i = 0; i < phi.size(); ++i) {
                qphi += phi[i] * mphi[i + 1];
                fphi += tracking_.Fphi[m][i] * phi[i];
            }
            acc += 0.5 * (tau[m] * qphi - 2.0 * fphi + tracking_.Cphi[m]);

            const auto d = fwd.d.row(m);
            const auto md = M_free_.matvec(d);
            double qd = 0.0, fd = 0.0;
            for (std::size_t i = 0; i < d.size(); ++i) {
                qd += d[i] * md[i];
                fd += tracking_.Fd[m][i] * d[i];
            }
            acc += 0.5 * (tau[m] * qd - 2.0 * fd + tracking_.Cd[m]);
        }
        return acc;
    }

    double regularizer(const SpaceTimeField& l) const {
        const SpaceTimeField shifted = axpy(l, -1.0, l_ref_proj_);
        return 0.5 * ocfg_.alpha_l * lsigma_inner(shifted, shifted, spec_.norm);
    }

private:
    ControlProblemSpec spec_;
    Grids grids_;
    SolverConfig scfg_;
    OptimizerConfig ocfg_;
    QuadratureConfig quad_;
    TrackingData tracking_;
    TriMat M_free_;
    SpaceTimeField l_ref_proj_;
    std::optional<std::pair<std::vector<double>, ForwardSolution>> cache_;
};

/// Discrete objective value at a control (convenience wrapper; builds the
/// problem data each call).
inline double objective(const SpaceTimeField& l, const ManufacturedCase& c, const Grids& grids,
                        const SolverConfig& scfg, const OptimizerConfig& ocfg,
                        const QuadratureConfig& quad = {}) {
    ControlProblem prob(ControlProblemSpec::from_case(c), grids, scfg, ocfg, quad);
    return prob.value(l);
}

}  // namespace dgdamage
