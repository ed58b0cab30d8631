#pragma once

#include <algorithm>
#include <cassert>
#include <memory>
#include <stdexcept>
#include <vector>

#include "dgdamage/core.hpp"

namespace dgdamage {

/// Partition 0 = t_0 < t_1 < ... < t_M = T with slabs I_m = (t_{m-1}, t_m].
struct TemporalMesh {
    std::vector<double> points;   // size M+1
    std::vector<double> lengths;  // tau_m = points[m] - points[m-1], size M
    double tau_max = 0.0;

    int slabs() const { return static_cast<int>(lengths.size()); }
    double T() const { return points.back(); }
};

inline TemporalMesh build_temporal_mesh(double T, int M) {
    if (M < 1) throw std::invalid_argument("build_temporal_mesh: M must be >= 1");
    if (!(T > 0.0)) throw std::invalid_argument("build_temporal_mesh: T must be > 0");
    TemporalMesh mesh;
    mesh.points.resize(M + 1);
    for (int m = 0; m <= M; ++m) mesh.points[m] = (T * m) / M;
    mesh.points[0] = 0.0;
    mesh.points[M] = T;
    mesh.lengths.resize(M);
    for (int m = 0; m < M; ++m) mesh.lengths[m] = mesh.points[m + 1] - mesh.points[m];
    mesh.tau_max = *std::max_element(mesh.lengths.begin(), mesh.lengths.end());
    return mesh;
}

/// Nodes a = x_0 < x_1 < ... < x_N = b of a 1D interval mesh.
struct SpatialMesh1D {
    double a = 0.0, b = 1.0;
    std::vector<double> nodes;  // size N+1
    double h_max = 0.0;

    int elements() const { return static_cast<int>(nodes.size()) - 1; }
    int free_dofs() const { return static_cast<int>(nodes.size()); }
    int dirichlet_dofs() const { return static_cast<int>(nodes.size()) - 2; }
    int dofs(Kind kind) const { return kind == Kind::free ? free_dofs() : dirichlet_dofs(); }
    double element_length(int e) const { return nodes[e + 1] - nodes[e]; }

    /// Element containing x (clamped to [a,b]).
    int locate(double x) const {
        if (x <= nodes.front()) return 0;
        if (x >= nodes.back()) return elements() - 1;
        auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
        return static_cast<int>(it - nodes.begin()) - 1;
    }
};

inline SpatialMesh1D build_spatial_mesh(double a, double b, int N) {
    if (N < 2) throw std::invalid_argument("build_spatial_mesh: N must be >= 2");
    if (!(a < b)) throw std::invalid_argument("build_spatial_mesh: need a < b");
    SpatialMesh1D mesh;
    mesh.a = a;
    mesh.b = b;
    mesh.nodes.resize(N + 1);
    for (int i = 0; i <= N; ++i) mesh.nodes[i] = a + ((b - a) * i) / N;
    mesh.nodes[0] = a;
    mesh.nodes[N] = b;
    mesh.h_max = 0.0;
    for (int e = 0; e < N; ++e) mesh.h_max = std::max(mesh.h_max, mesh.element_length(e));
    return mesh;
}

/// Immutable mesh pair shared by all fields of one discretization level.
struct Grids {
    std::shared_ptr<const TemporalMesh> time;
    std::shared_ptr<const SpatialMesh1D> space;

    bool same_as(const Grids& o) const { return time == o.time && space == o.space; }
};

inline Grids make_grids(double T, int M, double a, double b, int N) {
    return Grids{std::make_shared<const TemporalMesh>(build_temporal_mesh(T, M)),
                 std::make_shared<const SpatialMesh1D>(build_spatial_mesh(a, b, N))};
}

}  // namespace dgdamage
