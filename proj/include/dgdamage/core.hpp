#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace dgdamage {

/// Physical constants of the coupled PDE-ODE system and the time horizon.
struct ModelParams {
    double alpha = 1.0;   // diffusion coefficient
    double beta = 1.0;    // penalty/coupling coefficient
    double delta = 1.0;   // viscosity
    double r = 1.0;       // activation threshold
    double T = 1.0;       // final time

    void validate() const {
        if (!(alpha > 0.0 && beta > 0.0 && delta > 0.0 && r > 0.0 && T > 0.0))
            throw std::invalid_argument("ModelParams: all of alpha, beta, delta, r, T must be > 0");
    }
};

/// Degree-of-freedom layout of a spatial finite element function.
/// dirichlet: zero boundary values, coefficients over interior nodes.
/// free: coefficients over all nodes.
enum class Kind { dirichlet, free };

enum class MassMode { consistent, lumped };

/// Gauss points used for integrals against analytic functions.
struct QuadratureConfig {
    int q_time = 5;
    int q_space = 5;

    void validate() const {
        if (q_time < 2 || q_space < 2)
            throw std::invalid_argument("QuadratureConfig: q_time and q_space must be >= 2");
    }
};

/// Thrown when a per-slab fixed-point iteration fails, or when the
/// contraction diagnostic refuses the run outright (margin >= 2).
class NonConvergence : public std::runtime_error {
public:
    enum class Reason { margin_refused, fixed_point_diverged };

    NonConvergence(Reason reason, int slab, double margin, const std::string& what_arg)
        : std::runtime_error(what_arg), reason(reason), slab(slab), margin(margin) {}

    Reason reason;
    int slab;       // 1-based slab index; 0 when the whole run was refused
    double margin;  // max_m tau_m * beta / delta at the failure
};

class LineSearchFailure : public std::runtime_error {
public:
    explicit LineSearchFailure(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

}  // namespace dgdamage
