#include <iostream>

#include "CLI11.hpp"
#include "llg/commands.hpp"
#include "llg/state.hpp"

// Exit codes: 0 success, 2 validation error, 3 numerical failure.

int main(int argc, char** argv) {
    CLI::App app{"Optimal control toolkit for 2D magnetization dynamics"};
    app.require_subcommand(1);
    app.fallthrough();

    llg::CliOptions cli;
    app.add_option("--config", cli.config_path, "Path to the run configuration (JSON)")
        ->required();
    app.add_option("--out", cli.out_dir_override, "Output directory (overrides paths.out_dir)");
    uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Seed for randomized checks");
    double tol = 0.0;
    auto* tol_opt = app.add_option("--tol", tol, "Optimizer/check tolerance override");
    app.add_option("--threads", cli.threads, "Worker threads for batched audits")
        ->check(CLI::PositiveNumber);
    app.add_flag("--quiet", cli.quiet, "Suppress progress output and warnings");

    app.add_subcommand("simulate", "Run the forward solver and write the energy report");
    app.add_subcommand("optimize", "Run the projected-gradient optimizer");
    app.add_subcommand("gradcheck", "Cross-check the adjoint gradient against finite differences");
    app.add_subcommand("audit", "Audit a (state, control, adjoint) file triple");
    app.add_subcommand("refine", "Run the problem on refined grids and report observed orders");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*seed_opt) cli.seed = seed;
    if (*tol_opt) cli.tol = tol;

    try {
        if (app.got_subcommand("simulate")) return llg::cmd_simulate(cli);
        if (app.got_subcommand("optimize")) return llg::cmd_optimize(cli);
        if (app.got_subcommand("gradcheck")) return llg::cmd_gradcheck(cli);
        if (app.got_subcommand("audit")) return llg::cmd_audit(cli);
        if (app.got_subcommand("refine")) return llg::cmd_refine(cli);
    } catch (const llg::SolverFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
