#pragma once

#include <cstdint>
#include <vector>

#include "llg/sensitivity.hpp"

namespace llg {

// Control trajectory with componentwise box bounds and the admissibility
// cost cap R.
struct Control {
    Trajectory u;
    ScalarTrajectory a;  // lower bound, applied to each component
    ScalarTrajectory b;  // upper bound
    double cost_cap_R = 1e30;

    void validate() const;
};

struct CostBreakdown {
    double j_track_grad = 0.0;  // 1/4 ||grad(m - m_d)||^4_{L4L4}
    double j_terminal = 0.0;    // 1/2 ||m(T) - m_omega||^2_{L2}
    double j_ctrl_l2 = 0.0;     // 1/2 ||u||^2_{L2L2}
    double j_ctrl_grad = 0.0;   // 1/2 ||grad u||^2_{L2L2}
    double total = 0.0;
};

struct SecondOrderSample {
    int id = 0;
    double value = 0.0;       // I''(u)[h,h]
    double h_norm_sq = 0.0;   // ||h||^2_{L2(0,T;H1)}
    double threshold = 0.0;   // delta * h_norm_sq
    bool satisfied = false;
};

struct OptimalityReport {
    double fooc_residual = 0.0;
    double grad_norm_l2 = 0.0;
    double grad_norm_h1 = 0.0;
    double global_product = 0.0;
    double user_C = 1.0;
    bool global_condition_holds = false;
    bool in_box = false;
    bool cost_leq_R_half = false;
    double target_grad_l6l6 = 0.0;  // ||grad m_d||_{L6(0,T;L6)}, costate requirement
    CostBreakdown cost;
    EnergyReport energy;
    std::vector<SecondOrderSample> second_order;
};

CostBreakdown cost(const Trajectory& m, const Trajectory& u, const TargetData& targets);

// L2 gradient representative u - lap u + (phi x m) + m x (phi x m), and its
// H1 Riesz lift solving (I - lap) g_h1 = g_l2.
struct ReducedGradient {
    Trajectory g_l2;
    Trajectory g_h1;
};
ReducedGradient reduced_gradient(const Trajectory& u, const Trajectory& m, const Trajectory& phi);

Trajectory project_box(const Trajectory& u, const ScalarTrajectory& a, const ScalarTrajectory& b);

// Projected-gradient stationarity measure
//   r(s) = || project_box(u - s*g) - u ||_{L2L2} / s.
double fooc_residual(const Control& c, const Trajectory& g_l2, double step = 1.0);

// Sign clipping on the active sets: h >= 0 where u = a, h <= 0 where u = b,
// with activity tolerance active_tol_scale * (b - a) pointwise.
Trajectory critical_cone_project(const Trajectory& h, const Control& c,
                                 double active_tol_scale = 1e-8);

// Quadratic form I''(u)[h,h]: solves for the tangent z and the costate
// derivative phi', then assembles the seven space-time integrals.
double second_order_form(const Trajectory& base_m, const Trajectory& base_u,
                         const TargetData& targets, const Trajectory& phi, const Trajectory& h,
                         bool quiet = true);

// The seven-integral sum with all ingredients supplied.
double second_order_form_assemble(const Trajectory& base_m, const Trajectory& phi,
                                  const Trajectory& z, const Trajectory& phi_d,
                                  const Trajectory& h);

struct GlobalConditionReport {
    double state_h2_linf = 0.0;   // ||m||_{Linf(0,T;H2 proxy)}
    double control_l2h1 = 0.0;    // ||u||_{L2(0,T;H1)}
    double phi_l2l2 = 0.0;        // ||phi||_{L2L2}
    double product = 0.0;         // (1 + state + control) * phi
    double user_C = 1.0;
    bool holds = false;           // user_C * product <= 1/2
};
GlobalConditionReport global_condition_report(const Trajectory& m, const Trajectory& u,
                                              const Trajectory& phi, double user_C);

struct OptimizeProblem {
    Grid grid;
    Field3 m0;
    Control control0;
    TargetData targets;
    Scheme scheme = Scheme::projection;
    double penalty_k = 100.0;
};

struct OptimizeOptions {
    double tol = 1e-3;
    int max_iters = 200;
    bool use_h1_direction = true;
    double armijo_c1 = 1e-4;
    double initial_step = 1.0;
    int max_halvings = 40;
    double user_C = 1.0;
    int second_order_directions = 0;
    double second_order_delta = 0.0;
    uint64_t seed = 0;
    int threads = 1;
    bool quiet = false;
};

struct IterRecord {
    int iter = 0;
    double cost = 0.0;
    double fooc = 0.0;
    double step = 0.0;
};

struct OptimizeResult {
    Control control;
    Trajectory state;
    Trajectory adjoint;
    OptimalityReport report;
    std::vector<IterRecord> history;
    int iterations = 0;
    bool converged = false;
    bool line_search_failed = false;
};

OptimizeResult optimize(const OptimizeProblem& p, const OptimizeOptions& opts);

// Full audit of a (state, control, adjoint) triple against the targets;
// shared by the optimizer exit path and the audit command.
OptimalityReport make_optimality_report(const Trajectory& m, const Control& c,
                                        const Trajectory& phi, const TargetData& targets,
                                        double penalty_k, const OptimizeOptions& opts);

}  // namespace llg
