#pragma once

#include <iosfwd>

#include "llg/trajectory.hpp"

namespace llg {

// Thrown when a march blows up; carries the offending time step.
struct SolverFailure : std::runtime_error {
    int step;
    explicit SolverFailure(const std::string& msg, int step_)
        : std::runtime_error(msg), step(step_) {}
};

enum class Scheme { projection, penalized };

struct StateProblem {
    Grid grid;
    Field3 m0;          // unit initial data
    Trajectory u;       // control, nt+1 snapshots
    Scheme scheme = Scheme::projection;
    double penalty_k = 100.0;  // penalized scheme only
    bool quiet = false;        // suppress warn-only diagnostics

    void validate() const;
};

struct EnergyReport {
    double lhs_weak = 0.0;        // 0.5*||m_t||^2_{L2L2} + sup_t ||grad m(t)||^2_{L2}
    double rhs_weak = 0.0;        // ||grad m0||^2_{L2} + 2*||u||^2_{L2L2}
    double slack = 0.0;           // rhs - lhs (signed; never thrown on)
    double penalty_violation = 0.0;  // (k/2) * sup_t int (|m|^2-1)^2
    double grad_l4l4 = 0.0;          // ||grad m||^4_{L4(0,T;L4)}
    double regularity_bound_exponent = 0.0;  // 1 + ||lap m0||^4 + grad_l4l4^2 + ||u||^4_{L2H1}
    bool regularity_indicator = false;       // grad_l4l4 finite
};

// Right-hand side of the heat-form state system:
//   |grad m|^2 m + m x lap m + m x u - m x (m x u).
Field3 effective_rhs(const Field3& m, const Field3& u, const Grid& g);

// One semi-implicit step: lap m implicit, everything else explicit, then
// nodewise projection back onto the unit sphere.
Field3 step_projection(const Field3& m, const Field3& u, double dt, const Grid& g);

// One step of the penalty relaxation
//   m_t - m x m_t = 2 lap m - 2k(|m|^2-1)m + 2u,
// advanced by the closed-form skew inversion with the bare 2*lap m implicit.
Field3 step_penalized(const Field3& m, const Field3& u, double dt, double k, const Grid& g);

Trajectory solve_state(const StateProblem& p);

EnergyReport energy_report(const Trajectory& m, const Trajectory& u, const Field3& m0,
                           double penalty_k);

// int_0^T int (|m|^2 - 1)^2 dx dt, the penalty-scaling diagnostic.
double unit_violation_spacetime(const Trajectory& m);

// Discrete exchange energies 0.5*||grad m(t_n)||^2 for every snapshot.
std::vector<double> exchange_energy_series(const Trajectory& m);

// Warn-only validation of the initial data (unit length, discrete normal
// difference at the boundary).  Returns the warning text, empty if clean.
std::string validate_initial_data(const Field3& m0, const Grid& g);

}  // namespace llg
