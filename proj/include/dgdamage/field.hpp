#pragma once

#include <algorithm>
#include <cassert>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "dgdamage/core.hpp"
#include "dgdamage/fem.hpp"
#include "dgdamage/mesh.hpp"

namespace dgdamage {

/// dG(0)-in-time x P1-in-space coefficient array: row m holds the nodal
/// values on slab I_{m+1}. Realizes V^{0,1} (dirichlet) and X^{0,1} (free).
struct SpaceTimeField {
    Kind kind = Kind::free;
    Grids grids;
    std::vector<double> coeffs;  // slabs x dofs, row-major

    int slabs() const { return grids.time->slabs(); }
    int dofs() const { return grids.space->dofs(kind); }

    std::span<double> row(int m) {
        return {coeffs.data() + static_cast<std::size_t>(m) * dofs(), static_cast<std::size_t>(dofs())};
    }
    std::span<const double> row(int m) const {
        return {coeffs.data() + static_cast<std::size_t>(m) * dofs(), static_cast<std::size_t>(dofs())};
    }

    /// P1 evaluation on slab m; dirichlet fields are exactly 0 at the
    /// boundary nodes.
    double eval(int m, double x) const {
        const auto& mesh = *grids.space;
        const int e = mesh.locate(x);
        const double theta = (x - mesh.nodes[e]) / mesh.element_length(e);
        const auto nodal = [&](int i) -> double {
            if (kind == Kind::free) return row(m)[i];
            if (i == 0 || i == mesh.free_dofs() - 1) return 0.0;
            return row(m)[i - 1];
        };
        return (1.0 - theta) * nodal(e) + theta * nodal(e + 1);
    }

    static SpaceTimeField zeros(Kind kind, const Grids& grids) {
        SpaceTimeField f;
        f.kind = kind;
        f.grids = grids;
        f.coeffs.assign(static_cast<std::size_t>(f.slabs()) * f.dofs(), 0.0);
        return f;
    }

    bool same_layout(const SpaceTimeField& o) const {
        return kind == o.kind && grids.same_as(o.grids) && coeffs.size() == o.coeffs.size();
    }
};

inline void check_same_layout(const SpaceTimeField& a, const SpaceTimeField& b) {
    if (!a.same_layout(b)) throw std::invalid_argument("SpaceTimeField: layout mismatch");
}

inline SpaceTimeField axpy(const SpaceTimeField& x, double s, const SpaceTimeField& y) {
    check_same_layout(x, y);
    SpaceTimeField out = x;
    for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] += s * y.coeffs[i];
    return out;
}

/// Jump [u]_m = u_{m+1} - u_m at node t_m, m = 0..M-1 (1-based slab values).
/// At m = 0 the ghost value is 0, the dirichlet-in-time convention of
/// H^1_{{0}} matching the lift below.
inline std::vector<double> jump(const SpaceTimeField& u, int m) {
    if (m < 0 || m >= u.slabs()) throw std::out_of_range("jump: index out of range");
    std::vector<double> j(u.row(m).begin(), u.row(m).end());
    if (m >= 1) {
        auto prev = u.row(m - 1);
        for (std::size_t i = 0; i < j.size(); ++i) j[i] -= prev[i];
    }
    return j;
}

/// Continuous piecewise-linear-in-time lift of a dG(0) field: ramps from 0
/// to u_1 over I_1, then interpolates consecutive slab values.
struct LiftedControl {
    const SpaceTimeField* u;

    /// Nodal coefficient vector of the lift at time t in [0, T].
    std::vector<double> value(double t) const {
        const auto& tm = *u->grids.time;
        std::vector<double> out(u->dofs(), 0.0);
        if (t <= 0.0) return out;
        int m = 0;
        while (m + 1 < tm.slabs() && t > tm.points[m + 1]) ++m;
        const double theta = (t - tm.points[m]) / tm.lengths[m];
        auto cur = u->row(m);
        if (m == 0) {
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = theta * cur[i];
        } else {
            auto prev = u->row(m - 1);
            for (std::size_t i = 0; i < out.size(); ++i)
                out[i] = prev[i] + theta * (cur[i] - prev[i]);
        }
        return out;
    }
};

inline LiftedControl lift_control(const SpaceTimeField& u) { return LiftedControl{&u}; }

/// dG(0) x P1 representation of an analytic space-time function by nodal
/// evaluation: slab m takes the values at the right endpoint t_m (the
/// interpolation I_tau) and the mesh nodes. This is how analytic data enters
/// the discrete computations in the benchmark runs.
inline SpaceTimeField nodal_interpolant(const SpaceTimeFn& f, Kind kind, const Grids& grids) {
    SpaceTimeField out = SpaceTimeField::zeros(kind, grids);
    const auto& mesh = *grids.space;
    const int offset = kind == Kind::free ? 0 : 1;
    for (int m = 0; m < out.slabs(); ++m) {
        const double tm = grids.time->points[m + 1];
        auto row = out.row(m);
        for (int j = 0; j < out.dofs(); ++j) row[j] = f(tm, mesh.nodes[j + offset]);
    }
    return out;
}

/// (t, x) evaluator of a dG(0) x P1 field; slabs are the half-open
/// intervals (t_{m-1}, t_m]. Owns a copy of the field.
inline SpaceTimeFn field_evaluator(SpaceTimeField f) {
    auto held = std::make_shared<const SpaceTimeField>(std::move(f));
    return [held](double t, double x) {
        const auto& pts = held->grids.time->points;
        auto it = std::lower_bound(pts.begin(), pts.end(), t);
        int m = static_cast<int>(it - pts.begin()) - 1;
        if (m < 0) m = 0;
        if (m >= held->slabs()) m = held->slabs() - 1;
        return held->eval(m, x);
    };
}

/// ||d/dt lift||^2_{L2(I;L2)} = sum_m tau_m^{-1} ||[u]_{m-1}||^2 — identity (i)
/// of the lift construction.
inline double lift_dt_norm_sq(const SpaceTimeField& u, const TriMat& mass_free) {
    double s = 0.0;
    for (int m = 0; m < u.slabs(); ++m) {
        const auto jm = jump(u, m);
        const double nrm = mass_norm(mass_free, jm);
        s += nrm * nrm / u.grids.time->lengths[m];
    }
    return s;
}

/// ||lift - u||^2_{L2(I;L2)} = (1/3) sum_m tau_m ||[u]_{m-1}||^2 — identity (ii).
inline double lift_distance_sq(const SpaceTimeField& u, const TriMat& mass_free) {
    double s = 0.0;
    for (int m = 0; m < u.slabs(); ++m) {
        const auto jm = jump(u, m);
        const double nrm = mass_norm(mass_free, jm);
        s += u.grids.time->lengths[m] * nrm * nrm / 3.0;
    }
    return s;
}

}  // namespace dgdamage
