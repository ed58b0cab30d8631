#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace dgdamage {

/// Symmetric-structure tridiagonal matrix. All 1D P1 operators here
/// (mass, stiffness, weighted mass, temporal control forms) have this shape.
struct TriMat {
    std::vector<double> lo;  // sub-diagonal, size n-1
    std::vector<double> di;  // diagonal, size n
    std::vector<double> up;  // super-diagonal, size n-1

    int n() const { return static_cast<int>(di.size()); }

    static TriMat zero(int n) {
        TriMat m;
        m.lo.assign(n > 0 ? n - 1 : 0, 0.0);
        m.di.assign(n, 0.0);
        m.up.assign(n > 0 ? n - 1 : 0, 0.0);
        return m;
    }

    void matvec(std::span<const double> x, std::span<double> y) const {
        const int N = n();
        assert(static_cast<int>(x.size()) == N && static_cast<int>(y.size()) == N);
        for (int i = 0; i < N; ++i) {
            double s = di[i] * x[i];
            if (i > 0) s += lo[i - 1] * x[i - 1];
            if (i + 1 < N) s += up[i] * x[i + 1];
            y[i] = s;
        }
    }

    std::vector<double> matvec(std::span<const double> x) const {
        std::vector<double> y(x.size());
        matvec(x, y);
        return y;
    }
};

inline TriMat operator+(const TriMat& a, const TriMat& b) {
    if (a.n() != b.n()) throw std::invalid_argument("TriMat: dimension mismatch");
    TriMat c = a;
    for (std::size_t i = 0; i < c.lo.size(); ++i) c.lo[i] += b.lo[i];
    for (std::size_t i = 0; i < c.di.size(); ++i) c.di[i] += b.di[i];
    for (std::size_t i = 0; i < c.up.size(); ++i) c.up[i] += b.up[i];
    return c;
}

inline TriMat scaled(const TriMat& a, double s) {
    TriMat c = a;
    for (auto& v : c.lo) v *= s;
    for (auto& v : c.di) v *= s;
    for (auto& v : c.up) v *= s;
    return c;
}

/// LU factorization of a tridiagonal matrix, no pivoting. Valid for the
/// positive definite systems assembled in this library.
struct TriLU {
    std::vector<double> d;   // pivots
    std::vector<double> l;   // multipliers
    std::vector<double> u;   // copy of super-diagonal

    explicit TriLU(const TriMat& m) {
        const int n = m.n();
        d.resize(n);
        l.resize(n > 0 ? n - 1 : 0);
        u = m.up;
        if (n == 0) return;
        d[0] = m.di[0];
        for (int i = 1; i < n; ++i) {
            if (d[i - 1] == 0.0) throw std::runtime_error("TriLU: zero pivot");
            l[i - 1] = m.lo[i - 1] / d[i - 1];
            d[i] = m.di[i] - l[i - 1] * m.up[i - 1];
        }
        if (d[n - 1] == 0.0) throw std::runtime_error("TriLU: zero pivot");
    }

    void solve(std::span<const double> b, std::span<double> x) const {
        const int n = static_cast<int>(d.size());
        assert(static_cast<int>(b.size()) == n && static_cast<int>(x.size()) == n);
        if (n == 0) return;
        x[0] = b[0];
        for (int i = 1; i < n; ++i) x[i] = b[i] - l[i - 1] * x[i - 1];
        x[n - 1] /= d[n - 1];
        for (int i = n - 2; i >= 0; --i) x[i] = (x[i] - u[i] * x[i + 1]) / d[i];
    }

    std::vector<double> solve(std::span<const double> b) const {
        std::vector<double> x(b.size());
        solve(b, x);
        return x;
    }
};

}  // namespace dgdamage
