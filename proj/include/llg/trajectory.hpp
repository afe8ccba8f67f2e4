#pragma once

#include <string>
#include <vector>

#include "llg/field3.hpp"
#include "llg/grid.hpp"

namespace llg {

// nt+1 vector-field snapshots at times 0, dt, ..., T on one grid.
struct Trajectory {
    Grid grid;
    std::vector<Field3> snaps;

    Trajectory() = default;
    explicit Trajectory(const Grid& g) : grid(g), snaps(g.nt + 1, Field3(g)) {}

    int n_snaps() const { return static_cast<int>(snaps.size()); }
    Field3& at(int n) { return snaps[n]; }
    const Field3& at(int n) const { return snaps[n]; }
    const Field3& back() const { return snaps.back(); }

    void validate() const;
};

// Scalar-valued analogue, used for box bounds.
struct ScalarTrajectory {
    Grid grid;
    std::vector<ScalarField> snaps;

    ScalarTrajectory() = default;
    ScalarTrajectory(const Grid& g, double fill)
        : grid(g), snaps(g.nt + 1, ScalarField(g, fill)) {}
};

Trajectory constant_trajectory(const Grid& g, const Field3& f);
Trajectory zero_trajectory(const Grid& g);

// Elementwise combinations (grids must agree).
Trajectory t_add(const Trajectory& a, const Trajectory& b);
Trajectory t_sub(const Trajectory& a, const Trajectory& b);
Trajectory t_scaled(const Trajectory& a, double s);
void t_axpy(Trajectory& y, double alpha, const Trajectory& x);

// Trapezoidal space-time inner product sum_n w_n <a_n, b_n>_{L2}.
double inner_spacetime(const Trajectory& a, const Trajectory& b);
double norm_spacetime_l2(const Trajectory& a);

// Space-time norms (L2L2, L2H1, L4L4, L6L6, LinfH2Proxy).
double trajectory_norm(const Trajectory& f, NormKind kind);

// Space-time norms of the gradient: ||grad f||_{L^p(0,T;L^p)} for p in {2,4,6}.
double trajectory_grad_norm(const Trajectory& f, int p);

// Binary "LLGF" container and CSV export.
void write_trajectory(const Trajectory& t, const std::string& path);
Trajectory read_trajectory(const std::string& path);
void write_trajectory_csv(const Trajectory& t, const std::string& path);

}  // namespace llg
