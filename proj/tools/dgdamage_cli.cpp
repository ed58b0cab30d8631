// Command-line front end: solver, optimizer and benchmark runs with CSV
// output.
//
// Exit codes: 0 success, 2 usage error, 3 solver non-convergence,
// 4 verification check above tolerance.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dgdamage/dgdamage.hpp"

using namespace dgdamage;

namespace {

struct CommonSolverOpts {
    double fp_tol = 1e-12;
    int fp_maxit = 5000;
    std::string mass_mode = "consistent";
    std::string variant = "exact";
    double eps = 1e-9;
    std::string stepper = "fixed-point";
    std::string control = "nodal";

    void attach(CLI::App* cmd) {
        cmd->add_option("--fp-tol", fp_tol, "fixed-point tolerance (mass-weighted norm)");
        cmd->add_option("--fp-maxit", fp_maxit, "fixed-point iteration cap");
        cmd->add_option("--mass-mode", mass_mode, "consistent|lumped")
            ->check(CLI::IsMember({"consistent", "lumped"}));
        cmd->add_option("--variant", variant, "exact|regularized max operator")
            ->check(CLI::IsMember({"exact", "regularized"}));
        cmd->add_option("--eps", eps, "width of max_eps for the regularized variant");
        cmd->add_option("--stepper", stepper, "fixed-point|closed-form")
            ->check(CLI::IsMember({"fixed-point", "closed-form"}));
        cmd->add_option("--control-treatment", control,
                        "analytic control enters as nodal dG(0)xP1 data or as exact slab-average loads")
            ->check(CLI::IsMember({"nodal", "average"}));
    }

    SolverConfig solver_config() const {
        SolverConfig scfg;
        scfg.fp_tol = fp_tol;
        scfg.fp_maxit = fp_maxit;
        scfg.mass_mode = mass_mode == "lumped" ? MassMode::lumped : MassMode::consistent;
        scfg.variant = variant == "regularized" ? MaxVariant::regularized : MaxVariant::exact;
        scfg.eps = eps;
        return scfg;
    }
    Stepper stepper_kind() const {
        return stepper == "closed-form" ? Stepper::closed_form : Stepper::fixed_point;
    }
    ControlTreatment treatment() const {
        return control == "average" ? ControlTreatment::slab_average
                                    : ControlTreatment::nodal_interpolant;
    }
};

struct OptimOpts {
    double alpha_l = 10.0;
    double eps = 1e-9;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    double s0 = 1.0;
    double grad_tol_abs = 1e-10;
    double grad_tol_rel = 1e-6;
    int maxit = 500;

    void attach(CLI::App* cmd) {
        cmd->add_option("--alpha-l", alpha_l, "control regularization weight");
        cmd->add_option("--opt-eps", eps, "max_eps width used by the optimizer");
        cmd->add_option("--armijo-c", armijo_c, "sufficient decrease constant");
        cmd->add_option("--backtrack", backtrack, "step shrink factor");
        cmd->add_option("--s0", s0, "initial step length");
        cmd->add_option("--grad-tol-abs", grad_tol_abs, "absolute gradient tolerance");
        cmd->add_option("--grad-tol-rel", grad_tol_rel, "relative gradient tolerance");
        cmd->add_option("--opt-maxit", maxit, "descent iteration cap");
    }

    OptimizerConfig config() const {
        OptimizerConfig ocfg;
        ocfg.alpha_l = alpha_l;
        ocfg.epsilon = eps;
        ocfg.armijo_c = armijo_c;
        ocfg.backtrack = backtrack;
        ocfg.s0 = s0;
        ocfg.grad_tol_abs = grad_tol_abs;
        ocfg.grad_tol_rel = grad_tol_rel;
        ocfg.maxit = maxit;
        return ocfg;
    }
};

RefineMode parse_mode(const std::string& s) {
    return s == "refine-time" ? RefineMode::refine_time : RefineMode::refine_space;
}

void write_table(const ConvergenceTable& table, const std::string& out) {
    print_table(table, std::cout);
    if (!out.empty()) {
        emit_csv(table, out);
        std::cerr << "wrote " << out << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dG(0)cG(1) solver and adjoint optimizer for the coupled "
                 "elliptic-PDE / nonsmooth-ODE damage system"};
    app.require_subcommand(1);

    // solve ------------------------------------------------------------
    auto* solve = app.add_subcommand("solve", "solve the state system for one benchmark case");
    int case_id = 1;
    int M = 512, N = 512, jobs = 1, samples = 10000;
    std::string out, mode_str = "refine-space", metric_str, error_vs = "analytic";
    double tol = 0.0;
    std::vector<int> list;
    CommonSolverOpts sopts;
    OptimOpts oopts;

    solve->add_option("--case", case_id, "benchmark case id")->required()->check(CLI::IsMember({1, 2}));
    solve->add_option("--M", M, "number of time slabs")->required();
    solve->add_option("--N", N, "number of spatial elements")->required();
    solve->add_option("--out", out, "CSV output path (one-row state table)");
    sopts.attach(solve);

    // eoc-state ---------------------------------------------------------
    auto* eoc_state = app.add_subcommand("eoc-state", "state convergence study");
    CommonSolverOpts sopts_es;
    int ref_factor = 4;
    eoc_state->add_option("--case", case_id, "benchmark case id")
        ->required()
        ->check(CLI::IsMember({1, 2}));
    eoc_state->add_option("--mode", mode_str, "refine-time|refine-space")
        ->required()
        ->check(CLI::IsMember({"refine-time", "refine-space"}));
    eoc_state->add_option("--M", M, "fixed slab count (refine-space) ");
    eoc_state->add_option("--N", N, "fixed element count (refine-time)");
    eoc_state->add_option("--M-list", list, "slab counts (refine-time)")->delimiter(',');
    eoc_state->add_option("--N-list", list, "element counts (refine-space)")->delimiter(',');
    eoc_state->add_option("--metric", metric_str, "exact|reference error target (default exact)")
        ->check(CLI::IsMember({"exact", "reference"}));
    eoc_state->add_option("--ref-factor", ref_factor, "reference mesh refinement factor");
    eoc_state->add_option("--jobs", jobs, "concurrent levels");
    eoc_state->add_option("--out", out, "CSV output path");
    sopts_es.attach(eoc_state);

    // optimize ----------------------------------------------------------
    auto* optimize = app.add_subcommand("optimize", "adjoint gradient descent for one level");
    CommonSolverOpts sopts_op;
    optimize->add_option("--case", case_id, "benchmark case id")
        ->required()
        ->check(CLI::IsMember({1, 2}));
    optimize->add_option("--M", M, "number of time slabs")->required();
    optimize->add_option("--N", N, "number of spatial elements")->required();
    sopts_op.attach(optimize);
    oopts.attach(optimize);

    // eoc-control ---------------------------------------------------------
    auto* eoc_control = app.add_subcommand("eoc-control", "control convergence study");
    CommonSolverOpts sopts_ec;
    OptimOpts oopts_ec;
    eoc_control->add_option("--case", case_id, "benchmark case id")
        ->required()
        ->check(CLI::IsMember({1, 2}));
    eoc_control->add_option("--mode", mode_str, "refine-time|refine-space")
        ->required()
        ->check(CLI::IsMember({"refine-time", "refine-space"}));
    eoc_control->add_option("--M", M, "fixed slab count (refine-space)");
    eoc_control->add_option("--N", N, "fixed element count (refine-time)");
    eoc_control->add_option("--M-list", list, "slab counts (refine-time)")->delimiter(',');
    eoc_control->add_option("--N-list", list, "element counts (refine-space)")->delimiter(',');
    eoc_control->add_option("--error-vs", error_vs, "analytic|projection control error target")
        ->check(CLI::IsMember({"analytic", "projection"}));
    eoc_control->add_option("--jobs", jobs, "concurrent levels");
    eoc_control->add_option("--out", out, "CSV output path");
    sopts_ec.attach(eoc_control);
    oopts_ec.attach(eoc_control);

    // gradcheck -----------------------------------------------------------
    auto* gradcheck = app.add_subcommand("gradcheck", "adjoint gradient vs central finite differences");
    GradCheckConfig gcfg;
    double gc_tol = 1e-5;
    gradcheck->add_option("--M", gcfg.M, "time slabs");
    gradcheck->add_option("--N", gcfg.N, "spatial elements");
    gradcheck->add_option("--eps", gcfg.eps, "max_eps width");
    gradcheck->add_option("--fd-step", gcfg.fd_step, "central difference step");
    gradcheck->add_option("--dofs", gcfg.n_dofs, "random coefficient directions");
    gradcheck->add_option("--dirs", gcfg.n_dirs, "random dense directions");
    gradcheck->add_option("--seed", gcfg.seed, "sampling seed");
    gradcheck->add_option("--tol", gc_tol, "acceptance threshold on the relative error");

    // residual-check --------------------------------------------------------
    auto* residual = app.add_subcommand("residual-check", "manufactured-solution strong-form residuals");
    unsigned rc_seed = 12345;
    tol = 1e-9;
    residual->add_option("--case", case_id, "benchmark case id")
        ->required()
        ->check(CLI::IsMember({1, 2}));
    residual->add_option("--samples", samples, "number of sample points");
    residual->add_option("--seed", rc_seed, "sampling seed");
    residual->add_option("--tol", tol, "acceptance threshold");

    // flat key=value configuration under a [subcommand] section; command-line
    // flags override file values, unknown keys are rejected
    app.set_config("--config", "", "key=value configuration file with a [subcommand] section");
    app.allow_config_extras(false);
    for (CLI::App* sub : {solve, eoc_state, optimize, eoc_control, gradcheck, residual})
        sub->configurable(true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*solve) {
            const ManufacturedCase c = case_by_id(case_id);
            const Grids grids = make_grids(c.params.T, M, c.xa, c.xb, N);
            const auto rep = check_contraction(c.params, *grids.time);
            if (rep.level > 0) std::cerr << "warning: " << rep.message << "\n";
            const ForwardSolution fwd = solve_forward(c.l_exact, c.d0, c.params, grids,
                                                      sopts.solver_config(), QuadratureConfig{},
                                                      sopts.stepper_kind(), sopts.treatment());
            int max_it = 0;
            long total_it = 0;
            for (int v : fwd.fp_iterations) {
                max_it = std::max(max_it, v);
                total_it += v;
            }
            const double err_phi = error_l2l2(fwd.phi, c.phi_exact);
            const double err_d = error_l2l2(fwd.d, c.d_exact);
            std::printf("case %d  M=%d N=%d  (tau=%.6e h=%.6e)\n", case_id, M, N, c.params.T / M,
                        (c.xb - c.xa) / N);
            std::printf("err_phi = %.6e\nerr_d   = %.6e\n", err_phi, err_d);
            std::printf("fixed-point iterations: max %d, mean %.1f, margin %.4g\n", max_it,
                        double(total_it) / fwd.fp_iterations.size(), fwd.contraction_margin);
            if (!out.empty()) {
                ConvergenceTable t;
                t.label = c.label;
                t.fixed_desc = "single solve";
                ConvergenceTable::Row row;
                row.tau = c.params.T / M;
                row.h = (c.xb - c.xa) / N;
                row.err_phi = err_phi;
                row.err_d = err_d;
                t.rows.push_back(row);
                emit_csv(t, out);
                std::cerr << "wrote " << out << "\n";
            }
        } else if (*eoc_state) {
            const ManufacturedCase c = case_by_id(case_id);
            const RefineMode mode = parse_mode(mode_str);
            if (list.empty()) throw CLI::ValidationError("eoc-state", "refinement list is empty");
            const int fixed = mode == RefineMode::refine_time ? N : M;
            const StateErrorMetric metric =
                metric_str == "reference" ? StateErrorMetric::vs_reference : StateErrorMetric::vs_exact;
            const auto table = run_state_eoc(c, mode, fixed, list, sopts_es.solver_config(),
                                             QuadratureConfig{}, jobs, metric, ref_factor);
            write_table(table, out);
        } else if (*optimize) {
            const ManufacturedCase c = case_by_id(case_id);
            const Grids grids = make_grids(c.params.T, M, c.xa, c.xb, N);
            ControlProblem prob(ControlProblemSpec::from_case(c), grids, sopts_op.solver_config(),
                                oopts.config());
            const OptimResult res =
                armijo_descent(prob, SpaceTimeField::zeros(Kind::free, grids), oopts.config());
            std::printf("   it     objective      |grad|_Lsigma   step\n");
            for (std::size_t k = 0; k < res.history.size(); ++k)
                std::printf("%5zu  %14.6e  %14.6e  %.3e\n", k, res.history[k].objective,
                            res.history[k].grad_norm, res.history[k].step);
            std::printf("converged: %s\n", res.converged ? "yes" : "no");
            std::printf("control error vs analytic optimum:  %.6e\n", error_l2l2(res.l, c.l_exact));
            std::printf("control error vs its projection:    %.6e\n",
                        error_l2l2_fields(res.l, prob.reference_projection()));
        } else if (*eoc_control) {
            const ManufacturedCase c = case_by_id(case_id);
            const RefineMode mode = parse_mode(mode_str);
            if (list.empty()) throw CLI::ValidationError("eoc-control", "refinement list is empty");
            const int fixed = mode == RefineMode::refine_time ? N : M;
            const ControlErrorMetric metric = error_vs == "projection"
                                                  ? ControlErrorMetric::vs_projection
                                                  : ControlErrorMetric::vs_analytic;
            const auto table = run_control_eoc(c, mode, fixed, list, sopts_ec.solver_config(),
                                               oopts_ec.config(), QuadratureConfig{}, metric, jobs);
            write_table(table, out);
        } else if (*gradcheck) {
            const GradCheckResult res = run_gradcheck(gcfg);
            std::printf("max relative error over %d checks: %.6e (tolerance %.1e)\n", res.checks,
                        res.max_rel, gc_tol);
            std::printf("trajectory driver range: [%.4f, %.4f]\n", res.driver_min, res.driver_max);
            if (!(res.max_rel <= gc_tol)) {
                std::cerr << "gradcheck FAILED\n";
                return 4;
            }
        } else if (*residual) {
            const ManufacturedCase c = case_by_id(case_id);
            const double worst = residual_check(c, samples, rc_seed);
            std::printf("max strong-form residual over %d samples: %.6e (tolerance %.1e)\n", samples,
                        worst, tol);
            if (!(worst <= tol)) {
                std::cerr << "residual-check FAILED\n";
                return 4;
            }
        }
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const NonConvergence& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    } catch (const LineSearchFailure& e) {
        std::cerr << "optimizer failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
