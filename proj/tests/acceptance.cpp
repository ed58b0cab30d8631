// Acceptance suite: reproduces the benchmark tables and the solver/optimizer
// guarantees end to end, one pass/fail line per criterion. Returns the number
// of failed criteria.
//
//   acceptance [--jobs K] [--only N]

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "dgdamage/dgdamage.hpp"

using namespace dgdamage;

namespace {

int g_jobs = 2;
int g_failures = 0;

void report(int id, bool ok, const std::string& detail) {
    std::printf("[%s] C%-2d %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

double rel_dev(double value, double ref) { return std::abs(value - ref) / std::abs(ref); }

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// ---------------------------------------------------------------------------
// C1  case-1 spatial table (tau = 2^-9, h = 2^-3..2^-7), errors within 15%,
//     EOC within 0.2. The tabulated spatial errors are measured against a
//     fine-space discrete reference at the same time partition: the
//     reference table's fine-h entries lie below the temporal error floor of
//     any dG(0) solution, so they cannot be errors against the exact
//     solution.
void criterion1() {
    const auto c = case_one();
    SolverConfig scfg;
    const auto table = run_state_eoc(c, RefineMode::refine_space, 512, {8, 16, 32, 64, 128}, scfg, {},
                                     g_jobs, StateErrorMetric::vs_reference, 4);
    const double tab_phi[] = {9.53e-2, 2.73e-2, 6.96e-3, 1.70e-3, 4.30e-4};
    const double tab_d[] = {8.62e-2, 2.81e-2, 8.02e-3, 2.35e-3, 7.46e-4};
    const double tab_eoc_phi[] = {1.80, 1.97, 2.03, 1.98};
    const double tab_eoc_d[] = {1.61, 1.81, 1.77, 1.65};
    double max_err_dev = 0.0, max_eoc_dev = 0.0;
    bool ok = true;
    for (int k = 0; k < 5; ++k) {
        const auto& row = table.rows[k];
        if (row.not_conv) {
            ok = false;
            continue;
        }
        max_err_dev = std::max({max_err_dev, rel_dev(row.err_phi, tab_phi[k]),
                                rel_dev(row.err_d, tab_d[k])});
        if (k > 0)
            max_eoc_dev = std::max({max_eoc_dev, std::abs(row.eoc_phi - tab_eoc_phi[k - 1]),
                                    std::abs(row.eoc_d - tab_eoc_d[k - 1])});
    }
    ok = ok && max_err_dev <= 0.15 && max_eoc_dev <= 0.2;
    report(1, ok,
           fmt("case-1 spatial table: max error deviation %.1f%% (tol 15%%), max EOC deviation %.3f "
               "(tol 0.2)",
               100.0 * max_err_dev, max_eoc_dev));
}

// ---------------------------------------------------------------------------
// C2  case-1 temporal table (h = 2^-9, tau = 2^-9..2^-11): ||e_phi|| within
//     15% of (7.61e-4, 3.62e-4, 1.64e-4), EOC_phi within 0.2 of (1.06, 1.14).
void criterion2() {
    const auto c = case_one();
    SolverConfig scfg;
    const auto table =
        run_state_eoc(c, RefineMode::refine_time, 512, {512, 1024, 2048}, scfg, {}, g_jobs);
    const double tab_phi[] = {7.61e-4, 3.62e-4, 1.64e-4};
    const double tab_eoc[] = {1.06, 1.14};
    double max_err_dev = 0.0, max_eoc_dev = 0.0;
    bool ok = true;
    for (int k = 0; k < 3; ++k) {
        const auto& row = table.rows[k];
        if (row.not_conv) {
            ok = false;
            continue;
        }
        max_err_dev = std::max(max_err_dev, rel_dev(row.err_phi, tab_phi[k]));
        if (k > 0) max_eoc_dev = std::max(max_eoc_dev, std::abs(row.eoc_phi - tab_eoc[k - 1]));
    }
    ok = ok && max_err_dev <= 0.15 && max_eoc_dev <= 0.2;
    report(2, ok,
           fmt("case-1 temporal table: max error deviation %.1f%% (tol 15%%), max EOC deviation %.3f "
               "(tol 0.2)",
               100.0 * max_err_dev, max_eoc_dev));
}

// ---------------------------------------------------------------------------
// C3  case-2 tables: spatial EOCs within 0.25 of (2.17, 1.90, 2.04) for phi
//     and (2.21, 1.89, 2.08) for d; temporal EOC_d at h = 2^-10 within 0.15
//     of (0.94, 0.97, 1.04).
void criterion3() {
    const auto c = case_two();
    SolverConfig scfg;
    const auto spatial =
        run_state_eoc(c, RefineMode::refine_space, 512, {8, 16, 32, 64}, scfg, {}, g_jobs);
    const double tab_eoc_phi[] = {2.17, 1.90, 2.04};
    const double tab_eoc_d[] = {2.21, 1.89, 2.08};
    double dev_space = 0.0;
    for (int k = 1; k < 4; ++k) {
        dev_space = std::max({dev_space, std::abs(spatial.rows[k].eoc_phi - tab_eoc_phi[k - 1]),
                              std::abs(spatial.rows[k].eoc_d - tab_eoc_d[k - 1])});
    }
    const auto temporal =
        run_state_eoc(c, RefineMode::refine_time, 1024, {32, 64, 128, 256}, scfg, {}, g_jobs);
    const double tab_eoc_t[] = {0.94, 0.97, 1.04};
    double dev_time = 0.0;
    for (int k = 1; k < 4; ++k)
        dev_time = std::max(dev_time, std::abs(temporal.rows[k].eoc_d - tab_eoc_t[k - 1]));
    const bool ok = dev_space <= 0.25 && dev_time <= 0.15;
    report(3, ok,
           fmt("case-2 tables: spatial EOC deviation %.3f (tol 0.25), temporal EOC_d deviation %.3f "
               "(tol 0.15)",
               dev_space, dev_time));
}

// ---------------------------------------------------------------------------
// C4  non-convergence boundary of case 1: tau = 2^-7 and 2^-8 fail through
//     the NonConvergence path, tau = 2^-9 converges; failed sweep rows carry
//     the sentinel and the sweep continues.
void criterion4() {
    const auto c = case_one();
    SolverConfig scfg;
    bool refused_127 = false, diverged_128 = false, converged_129 = false;
    try {
        solve_forward(c.l_exact, c.d0, c.params, make_grids(1.0, 128, 0.0, 1.0, 64), scfg);
    } catch (const NonConvergence&) {
        refused_127 = true;
    }
    try {
        solve_forward(c.l_exact, c.d0, c.params, make_grids(1.0, 256, 0.0, 1.0, 64), scfg);
    } catch (const NonConvergence& e) {
        diverged_128 = e.reason == NonConvergence::Reason::fixed_point_diverged;
    }
    try {
        solve_forward(c.l_exact, c.d0, c.params, make_grids(1.0, 512, 0.0, 1.0, 64), scfg);
        converged_129 = true;
    } catch (const NonConvergence&) {
    }
    // sweep keeps sentinel rows and continues
    const auto table =
        run_state_eoc(c, RefineMode::refine_time, 64, {128, 256, 512}, scfg, {}, g_jobs);
    const bool sentinel_ok = table.rows[0].not_conv && table.rows[1].not_conv &&
                             !table.rows[2].not_conv && table.rows[2].err_phi > 0.0;
    const bool ok = refused_127 && diverged_128 && converged_129 && sentinel_ok;
    report(4, ok,
           fmt("non-convergence boundary: tau=2^-7 %s, tau=2^-8 %s, tau=2^-9 %s, sweep sentinel %s",
               refused_127 ? "fails" : "MISSED", diverged_128 ? "diverges" : "MISSED",
               converged_129 ? "converges" : "FAILED", sentinel_ok ? "kept" : "LOST"));
}

// ---------------------------------------------------------------------------
// C5  case-2 control EOC. Temporal study at the full reference grid
//     h = 2^-13: EOC within 0.25 of 0.95. (At the coarser h = 2^-11 the
//     rate is not observable: the spatial representation error of the exact
//     control, about 1.6e-4 there, overlaps the whole temporal error range;
//     the coarse-grid EOCs are printed for reference but not asserted.)
//     Spatial study at tau = 2^-9, h = 2^-3..2^-6: EOC within 0.3 of 1.7.
void criterion5() {
    const auto c = case_two();
    SolverConfig scfg;
    OptimizerConfig ocfg;
    const auto coarse = run_control_eoc(c, RefineMode::refine_time, 2048, {32, 64, 128}, scfg, ocfg, {},
                                      ControlErrorMetric::vs_analytic, g_jobs);
    std::printf("       C5 info: h=2^-11 temporal EOCs %.2f %.2f (saturated, not asserted)\n",
                coarse.rows[1].eoc_l, coarse.rows[2].eoc_l);
    const auto temporal = run_control_eoc(c, RefineMode::refine_time, 8192, {32, 64, 128}, scfg, ocfg,
                                          {}, ControlErrorMetric::vs_analytic, g_jobs);
    double dev_time = 0.0;
    bool ok = true;
    for (int k = 1; k < 3; ++k) {
        if (temporal.rows[k].not_conv) {
            ok = false;
            continue;
        }
        dev_time = std::max(dev_time, std::abs(temporal.rows[k].eoc_l - 0.95));
    }
    const auto spatial = run_control_eoc(c, RefineMode::refine_space, 512, {8, 16, 32, 64}, scfg, ocfg,
                                         {}, ControlErrorMetric::vs_analytic, g_jobs);
    double dev_space = 0.0;
    for (int k = 1; k < 4; ++k) {
        if (spatial.rows[k].not_conv) {
            ok = false;
            continue;
        }
        dev_space = std::max(dev_space, std::abs(spatial.rows[k].eoc_l - 1.7));
    }
    ok = ok && dev_time <= 0.25 && dev_space <= 0.3;
    report(5, ok,
           fmt("case-2 control EOC: temporal deviation from 0.95 is %.3f (tol 0.25, h=2^-13), spatial "
               "deviation from 1.7 is %.3f (tol 0.3)",
               dev_time, dev_space));
}

// ---------------------------------------------------------------------------
// C6  case-1 control table (tau = 2^-9, h = 2^-3..2^-5): errors within 20% of
//     (6.89, 1.87, 4.78e-1), EOC within 0.25 of (1.87, 1.97).
void criterion6() {
    const auto c = case_one();
    SolverConfig scfg;
    OptimizerConfig ocfg;
    const auto table = run_control_eoc(c, RefineMode::refine_space, 512, {8, 16, 32}, scfg, ocfg, {},
                                       ControlErrorMetric::vs_analytic, g_jobs);
    const double tab_err[] = {6.89, 1.87, 4.78e-1};
    const double tab_eoc[] = {1.87, 1.97};
    double max_err_dev = 0.0, max_eoc_dev = 0.0;
    bool ok = true;
    for (int k = 0; k < 3; ++k) {
        if (table.rows[k].not_conv) {
            ok = false;
            continue;
        }
        max_err_dev = std::max(max_err_dev, rel_dev(table.rows[k].err_l, tab_err[k]));
        if (k > 0) max_eoc_dev = std::max(max_eoc_dev, std::abs(table.rows[k].eoc_l - tab_eoc[k - 1]));
    }
    ok = ok && max_err_dev <= 0.20 && max_eoc_dev <= 0.25;
    report(6, ok,
           fmt("case-1 control table: max error deviation %.1f%% (tol 20%%), max EOC deviation %.3f "
               "(tol 0.25)",
               100.0 * max_err_dev, max_eoc_dev));
}

// ---------------------------------------------------------------------------
// C7  gradient exactness: adjoint gradient vs central finite differences
//     (step 1e-5) at eps = 1e-3 on a 4-slab, 8-element mesh, relative error
//     <= 1e-5 over 20 coefficient directions and 10 dense directions.
void criterion7() {
    GradCheckConfig cfg;  // M=4, N=8, eps=1e-3, fd_step=1e-5, 20 dofs, 10 dirs
    const auto res = run_gradcheck(cfg);
    const bool ok = res.max_rel <= 1e-5 && res.checks >= 30 && res.driver_min < 0.0 &&
                    res.driver_max > 0.0;
    report(7, ok,
           fmt("adjoint gradient vs finite differences: max relative error %.2e over %d checks "
               "(tol 1e-5), driver range [%.3f, %.3f]",
               res.max_rel, res.checks, res.driver_min, res.driver_max));
}

// ---------------------------------------------------------------------------
// C8  oracle equivalence at (tau, h) = (2^-9, 2^-6): the lumped closed-form
//     and fixed-point steppers agree to 10 fp_tol in Linf(L2); an independent
//     damped Picard iteration driven to 1e-14 from multiple starts agrees
//     with the production solver to 1e-10.
void criterion8() {
    const auto c = case_one();
    const Grids g = make_grids(1.0, 512, 0.0, 1.0, 64);

    SolverConfig lumped;
    lumped.mass_mode = MassMode::lumped;
    const auto fp = solve_forward(c.l_exact, c.d0, c.params, g, lumped, {}, Stepper::fixed_point);
    const auto cf = solve_forward(c.l_exact, c.d0, c.params, g, lumped, {}, Stepper::closed_form);
    const double dist = std::max(error_linf_l2_fields(fp.d, cf.d), error_linf_l2_fields(fp.phi, cf.phi));
    const bool steppers_ok = dist <= 10.0 * lumped.fp_tol;

    // independent oracle for the consistent-mode slab map: damped Picard to
    // 1e-14 from several starts
    SolverConfig scfg;
    const auto prod = solve_forward(c.l_exact, c.d0, c.params, g, scfg);
    const auto l_field = nodal_interpolant(c.l_exact, Kind::free, g);
    const TriMat M = assemble_mass(*g.space, Kind::free, MassMode::consistent);
    const TriLU M_lu(M);
    const TriMat K = assemble_stiffness(*g.space, Kind::dirichlet);
    const TriMat Mi = assemble_mass(*g.space, Kind::dirichlet, MassMode::consistent);
    const TriLU A_lu(scaled(K, c.params.alpha) + scaled(Mi, c.params.beta));
    const GaussRule rule = gauss_rule_01(5);

    auto oracle_step = [&](int m, std::span<const double> d_prev, std::vector<double> start) {
        const double tau = g.time->lengths[m];
        const auto load = slice_interior(M.matvec(l_field.row(m)));
        const auto md_prev = M.matvec(d_prev);
        std::vector<double> d = std::move(start);
        const double theta = 0.6;
        for (int k = 0; k < 200000; ++k) {
            std::vector<double> rhs = slice_interior(M.matvec(d));
            for (auto i = 0u; i < rhs.size(); ++i) rhs[i] = c.params.beta * rhs[i] + load[i];
            const auto phi = A_lu.solve(rhs);
            auto w = driver_raw_at_quadrature(phi, d, c.params, *g.space, rule);
            for (auto& v : w.v) v = max_plus(v);
            auto b = load_vector_from_quad(*g.space, w, rule);
            for (auto i = 0u; i < b.size(); ++i) b[i] = md_prev[i] + (tau / c.params.delta) * b[i];
            const auto d_plain = M_lu.solve(b);
            double inc = 0.0;
            std::vector<double> next(d.size());
            for (auto i = 0u; i < d.size(); ++i) {
                next[i] = (1.0 - theta) * d[i] + theta * d_plain[i];
                inc = std::max(inc, std::abs(next[i] - d[i]));
            }
            d = std::move(next);
            if (inc <= 1e-14) break;
        }
        return d;
    };

    double worst = 0.0;
    for (int m : {0, 127, 255, 383, 511}) {
        const std::vector<double> d_prev =
            m == 0 ? prod.d0 : std::vector<double>(prod.d.row(m - 1).begin(), prod.d.row(m - 1).end());
        std::vector<std::vector<double>> starts;
        starts.push_back(d_prev);
        starts.emplace_back(d_prev.size(), 0.0);
        auto bumped = d_prev;
        for (auto& v : bumped) v += 0.05;
        starts.push_back(bumped);
        std::vector<double> first;
        for (auto& s : starts) {
            const auto fixed = oracle_step(m, d_prev, s);
            if (first.empty()) first = fixed;
            std::vector<double> dv(fixed.size());
            for (auto i = 0u; i < fixed.size(); ++i) dv[i] = fixed[i] - prod.d.row(m)[i];
            worst = std::max(worst, mass_norm(M, dv));
            for (auto i = 0u; i < fixed.size(); ++i) dv[i] = fixed[i] - first[i];
            worst = std::max(worst, mass_norm(M, dv));
        }
    }
    const bool oracle_ok = worst <= 1e-10;
    const bool ok = steppers_ok && oracle_ok;
    report(8, ok,
           fmt("oracle equivalence: closed-form vs fixed-point %.2e (tol %.0e); Picard oracle vs "
               "production %.2e (tol 1e-10)",
               dist, 10.0 * lumped.fp_tol, worst));
}

// ---------------------------------------------------------------------------
// C9  manufactured-solution residuals below 1e-9 over 10^4 samples.
void criterion9() {
    const double r1 = residual_check(case_one(), 10000);
    const double r2 = residual_check(case_two(), 10000);
    const bool ok = r1 < 1e-9 && r2 < 1e-9;
    report(9, ok, fmt("manufactured residuals: case 1 %.2e, case 2 %.2e (tol 1e-9)", r1, r2));
}

// ---------------------------------------------------------------------------
// C10 nonsmooth-operator properties over more than 10^6 sampled points:
//     1-Lipschitz bound, ordering max(v-r) <= max(v) <= |v|, and
//     0 <= max - max_eps <= eps/2.
void criterion10() {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> wide(-100.0, 100.0), pos(1e-9, 50.0);
    long checked = 0;
    bool ok = true;
    for (int k = 0; k < 600000; ++k) {
        const double a = wide(rng), b = wide(rng), r = pos(rng);
        ok = ok && std::abs(max_plus(a) - max_plus(b)) <= std::abs(a - b);
        ok = ok && max_plus(a - r) <= max_plus(a) && max_plus(a) <= std::abs(a);
        checked += 2;
    }
    for (double eps : {1e-3, 1e-6, 1e-9}) {
        std::uniform_real_distribution<double> band(-2.0 * eps, 2.0 * eps);
        for (int k = 0; k < 150000; ++k) {
            const double x = band(rng);
            const double diff = max_plus(x) - max_eps(x, eps);
            ok = ok && diff >= 0.0 && diff <= 0.5 * eps * (1.0 + 1e-12);
            const double p = max_eps_prime(x, eps);
            ok = ok && p >= 0.0 && p <= 1.0;
            ++checked;
        }
        for (int k = 0; k < 50000; ++k) {
            const double x = wide(rng);
            const double diff = max_plus(x) - max_eps(x, eps);
            ok = ok && diff >= 0.0 && diff <= 0.5 * eps + 1e-15 * std::abs(x);
            ++checked;
        }
    }
    report(10, ok, fmt("nonsmooth operator properties hold over %ld sampled checks", checked));
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--jobs") && i + 1 < argc) g_jobs = std::atoi(argv[++i]);
        else if (!std::strcmp(argv[i], "--only") && i + 1 < argc) only = std::atoi(argv[++i]);
        else {
            std::fprintf(stderr, "usage: acceptance [--jobs K] [--only N]\n");
            return 64;
        }
    }
    using Fn = void (*)();
    const Fn criteria[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                           criterion6, criterion7, criterion8, criterion9, criterion10};
    for (int id = 1; id <= 10; ++id) {
        if (only != 0 && only != id) continue;
        try {
            criteria[id - 1]();
        } catch (const std::exception& e) {
            report(id, false, fmt("unexpected exception: %s", e.what()));
        }
    }
    if (g_failures == 0)
        std::printf("acceptance: all criteria passed\n");
    else
        std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return g_failures;
}
