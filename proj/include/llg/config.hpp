#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "llg/optimize.hpp"

#include "json.hpp"

namespace llg {

// Parsed and schema-validated run configuration.  Unknown keys anywhere in
// the document are rejected by name.
struct RunConfig {
    nlohmann::json raw;

    Grid grid;
    Scheme scheme = Scheme::projection;
    double penalty_k = 100.0;

    std::string m0_spec = "constant:0,0,1";
    std::string u_spec = "zero";
    std::string md_spec = "self";
    std::string momega_spec = "md_end";
    double box_a = -1e9;
    double box_b = 1e9;
    double cost_cap_R = 1e9;

    double opt_tol = 1e-3;
    int opt_max_iters = 200;
    bool opt_use_h1 = true;
    double opt_armijo_c1 = 1e-4;
    double opt_initial_step = 1.0;
    int second_order_directions = 0;
    double second_order_delta = 0.0;
    double user_C = 1.0;

    std::vector<double> gradcheck_epsilons = {1e-2, 1e-3, 1e-4};
    double gradcheck_tolerance = 0.05;

    int refine_levels = 3;
    double refine_epsilon = 1e-3;

    std::string out_dir = "out";
    std::string state_path;
    std::string control_path;
    std::string adjoint_path;
    bool write_csv = false;

    uint64_t seed = 0;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// Assembled problem data (presets evaluated; "relax:"/"self" targets run an
// internal forward solve with the generating control).
struct ProblemData {
    Grid grid;
    Field3 m0;
    Trajectory u0;
    TargetData targets;
    Control control;
};

ProblemData build_problem(const RunConfig& cfg, bool quiet);

// Preset evaluation on an explicit grid (used by the refinement study, which
// rebuilds the same analytic problem on finer grids).
Field3 make_initial_field(const std::string& spec, const Grid& g);
Trajectory make_control_trajectory(const std::string& spec, const Grid& g);

OptimizeOptions optimize_options(const RunConfig& cfg);

}  // namespace llg
