#pragma once

#include <optional>
#include <string>

#include "llg/config.hpp"

namespace llg {

struct CliOptions {
    std::string config_path;
    std::string out_dir_override;
    std::optional<uint64_t> seed;
    std::optional<double> tol;
    int threads = 1;
    bool quiet = false;
};

// Applies CLI overrides (--out, --seed, --tol, --quiet) on top of the file.
RunConfig load_effective_config(const CliOptions& cli);

// Each command returns the process exit code for the success path (0);
// validation problems throw std::invalid_argument (exit 2) and numerical
// failures throw SolverFailure / std::runtime_error (exit 3).
int cmd_simulate(const CliOptions& cli);
int cmd_optimize(const CliOptions& cli);
int cmd_gradcheck(const CliOptions& cli);
int cmd_audit(const CliOptions& cli);
int cmd_refine(const CliOptions& cli);

// Report serialization (stable key names).
nlohmann::json energy_to_json(const EnergyReport& e);
nlohmann::json cost_to_json(const CostBreakdown& c);
nlohmann::json report_to_json(const OptimalityReport& r);

}  // namespace llg
