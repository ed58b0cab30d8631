#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dgdamage {

/// Gauss-Legendre rule on the reference interval [0,1].
struct GaussRule {
    std::vector<double> node;    // abscissae in (0,1)
    std::vector<double> weight;  // weights summing to 1
};

/// Nodes/weights by Newton iteration on the Legendre polynomial; exact for
/// polynomials of degree 2n-1.
inline GaussRule gauss_rule_01(int n) {
    if (n < 1) throw std::invalid_argument("gauss_rule_01: n must be >= 1");
    GaussRule rule;
    rule.node.resize(n);
    rule.weight.resize(n);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // initial guess on [-1,1]
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // evaluate P_n and P_n' by recurrence
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        // map [-1,1] -> [0,1]
        rule.node[i] = 0.5 * (1.0 - x);
        rule.node[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weight[i] = 0.5 * w;
        rule.weight[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

}  // namespace dgdamage
