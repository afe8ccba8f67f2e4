#include "llg/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "llg/presets.hpp"

namespace llg {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void write_json_atomic(const json& j, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::invalid_argument("cannot open " + tmp);
        out << j.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

void write_manifest(const RunConfig& cfg, const std::string& command, double wall_seconds,
                    const std::vector<std::string>& outputs, const json& summary) {
    json m;
    m["command"] = command;
    m["version"] = kVersion;
    m["format_version"] = 1;
    m["config"] = cfg.raw;
    m["seed"] = cfg.seed;
    m["wall_seconds"] = wall_seconds;
    m["outputs"] = outputs;
    m["summary"] = summary;
    write_json_atomic(m, cfg.out_dir + "/manifest.json");
}

std::string out_path(const RunConfig& cfg, const char* name) { return cfg.out_dir + "/" + name; }

void ensure_out_dir(const RunConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw std::invalid_argument("cannot create output directory " + cfg.out_dir);
}

StateProblem make_state_problem(const RunConfig& cfg, const ProblemData& pd, bool quiet) {
    StateProblem sp;
    sp.grid = cfg.grid;
    sp.m0 = pd.m0;
    sp.u = pd.control.u;
    sp.scheme = cfg.scheme;
    sp.penalty_k = cfg.penalty_k;
    sp.quiet = quiet;
    return sp;
}

}  // namespace

RunConfig load_effective_config(const CliOptions& cli) {
    RunConfig cfg = load_config(cli.config_path);
    if (!cli.out_dir_override.empty()) cfg.out_dir = cli.out_dir_override;
    if (cli.seed) cfg.seed = *cli.seed;
    if (cli.tol) {
        cfg.opt_tol = *cli.tol;
        cfg.gradcheck_tolerance = *cli.tol;
    }
    return cfg;
}

json energy_to_json(const EnergyReport& e) {
    return json{{"lhs_weak", e.lhs_weak},
                {"rhs_weak", e.rhs_weak},
                {"slack", e.slack},
                {"penalty_violation", e.penalty_violation},
                {"grad_L4L4", e.grad_l4l4},
                {"regularity_bound_exponent", e.regularity_bound_exponent},
                {"regularity_indicator", e.regularity_indicator}};
}

json cost_to_json(const CostBreakdown& c) {
    return json{{"j_track_grad", c.j_track_grad},
                {"j_terminal", c.j_terminal},
                {"j_ctrl_l2", c.j_ctrl_l2},
                {"j_ctrl_grad", c.j_ctrl_grad},
                {"total", c.total}};
}

json report_to_json(const OptimalityReport& r) {
    json second = json::array();
    for (const SecondOrderSample& s : r.second_order)
        second.push_back(json{{"id", s.id},
                              {"value", s.value},
                              {"h_norm_sq", s.h_norm_sq},
                              {"threshold", s.threshold},
                              {"satisfied", s.satisfied}});
    return json{{"fooc_residual", r.fooc_residual},
                {"grad_norm_l2", r.grad_norm_l2},
                {"grad_norm_h1", r.grad_norm_h1},
                {"global_product", r.global_product},
                {"user_C", r.user_C},
                {"global_condition_holds", r.global_condition_holds},
                {"in_box", r.in_box},
                {"cost_leq_R_half", r.cost_leq_R_half},
                {"target_grad_l6l6", r.target_grad_l6l6},
                {"cost", cost_to_json(r.cost)},
                {"energy", energy_to_json(r.energy)},
                {"second_order", second}};
}

int cmd_simulate(const CliOptions& cli) {
    Stopwatch sw;
    const RunConfig cfg = load_effective_config(cli);
    ensure_out_dir(cfg);
    const ProblemData pd = build_problem(cfg, cli.quiet);

    const Trajectory m = solve_state(make_state_problem(cfg, pd, cli.quiet));
    const EnergyReport energy = energy_report(m, pd.control.u, pd.m0, cfg.penalty_k);

    std::vector<std::string> outputs;
    write_trajectory(m, out_path(cfg, "state.llgf"));
    outputs.push_back(out_path(cfg, "state.llgf"));
    if (cfg.write_csv) {
        write_trajectory_csv(m, out_path(cfg, "state.csv"));
        outputs.push_back(out_path(cfg, "state.csv"));
    }
    write_json_atomic(energy_to_json(energy), out_path(cfg, "energy.json"));
    outputs.push_back(out_path(cfg, "energy.json"));

    if (!cli.quiet)
        std::cout << "simulate: slack = " << energy.slack
                  << ", grad_L4L4 = " << energy.grad_l4l4
                  << ", penalty_violation = " << energy.penalty_violation << "\n";
    write_manifest(cfg, "simulate", sw.seconds(), outputs, energy_to_json(energy));
    return 0;
}

int cmd_optimize(const CliOptions& cli) {
    Stopwatch sw;
    const RunConfig cfg = load_effective_config(cli);
    ensure_out_dir(cfg);
    const ProblemData pd = build_problem(cfg, cli.quiet);

    OptimizeProblem op;
    op.grid = cfg.grid;
    op.m0 = pd.m0;
    op.control0 = pd.control;
    op.targets = pd.targets;
    op.scheme = cfg.scheme;
    op.penalty_k = cfg.penalty_k;

    OptimizeOptions opts = optimize_options(cfg);
    opts.threads = cli.threads;
    opts.quiet = cli.quiet;

    const OptimizeResult res = optimize(op, opts);

    std::vector<std::string> outputs;
    write_trajectory(res.control.u, out_path(cfg, "control.llgf"));
    write_trajectory(res.state, out_path(cfg, "state.llgf"));
    write_trajectory(res.adjoint, out_path(cfg, "adjoint.llgf"));
    outputs = {out_path(cfg, "control.llgf"), out_path(cfg, "state.llgf"),
               out_path(cfg, "adjoint.llgf")};
    write_json_atomic(report_to_json(res.report), out_path(cfg, "report.json"));
    outputs.push_back(out_path(cfg, "report.json"));

    {
        std::ofstream hist(out_path(cfg, "history.csv"), std::ios::trunc);
        hist << "iter,cost,fooc_residual,step\n";
        for (const IterRecord& r : res.history)
            hist << r.iter << "," << r.cost << "," << r.fooc << "," << r.step << "\n";
        outputs.push_back(out_path(cfg, "history.csv"));
    }

    if (!cli.quiet) {
        std::cout << "optimize: " << res.iterations << " iterations, converged = "
                  << (res.converged ? "yes" : "no") << ", cost = " << res.report.cost.total
                  << ", fooc_residual = " << res.report.fooc_residual << "\n";
        if (res.line_search_failed) std::cout << "optimize: line search stalled; best iterate kept\n";
    }
    json summary{{"iterations", res.iterations},
                 {"converged", res.converged},
                 {"line_search_failed", res.line_search_failed},
                 {"final_cost", res.report.cost.total},
                 {"fooc_residual", res.report.fooc_residual}};
    write_manifest(cfg, "optimize", sw.seconds(), outputs, summary);
    return 0;
}

int cmd_gradcheck(const CliOptions& cli) {
    Stopwatch sw;
    const RunConfig cfg = load_effective_config(cli);
    ensure_out_dir(cfg);
    const ProblemData pd = build_problem(cfg, cli.quiet);

    StateProblem sp = make_state_problem(cfg, pd, true);
    const Trajectory m = solve_state(sp);
    const Trajectory phi = solve_adjoint(m, pd.control.u, pd.targets, true);
    const ReducedGradient grad = reduced_gradient(pd.control.u, m, phi);

    std::mt19937_64 rng(cfg.seed);
    const Trajectory h = random_smooth_trajectory(cfg.grid, rng, 1.0);
    const double adjoint_value = inner_spacetime(grad.g_l2, h);

    auto reduced_cost = [&](const Trajectory& u) {
        sp.u = u;
        const Trajectory mu = solve_state(sp);
        return cost(mu, u, pd.targets).total;
    };

    json rows = json::array();
    double best_rel = 1e300;
    if (!cli.quiet)
        std::cout << "eps            fd_value           adjoint_value      rel_err\n";
    for (double eps : cfg.gradcheck_epsilons) {
        if (eps < 1e-10 && !cli.quiet)
            std::cerr << "[warn] gradcheck: eps = " << eps
                      << " is below 1e-10; finite differences are dominated by roundoff\n";
        Trajectory up = pd.control.u;
        t_axpy(up, eps, h);
        Trajectory um = pd.control.u;
        t_axpy(um, -eps, h);
        const double fd = (reduced_cost(up) - reduced_cost(um)) / (2.0 * eps);
        const double rel = std::abs(fd - adjoint_value) / std::max(std::abs(fd), 1e-14);
        best_rel = std::min(best_rel, rel);
        rows.push_back(json{{"eps", eps}, {"fd_value", fd}, {"adjoint_value", adjoint_value},
                            {"rel_err", rel}});
        if (!cli.quiet)
            std::cout << std::scientific << eps << "   " << fd << "   " << adjoint_value << "   "
                      << rel << "\n";
    }
    const bool pass = best_rel <= cfg.gradcheck_tolerance;
    if (!cli.quiet)
        std::cout << (pass ? "PASS" : "FAIL") << " (best rel_err = " << best_rel
                  << ", tolerance = " << cfg.gradcheck_tolerance << ")\n";

    json doc{{"rows", rows}, {"best_rel_err", best_rel},
             {"tolerance", cfg.gradcheck_tolerance}, {"pass", pass}};
    write_json_atomic(doc, out_path(cfg, "gradcheck.json"));
    write_manifest(cfg, "gradcheck", sw.seconds(), {out_path(cfg, "gradcheck.json")}, doc);
    return pass ? 0 : 1;
}

int cmd_audit(const CliOptions& cli) {
    Stopwatch sw;
    const RunConfig cfg = load_effective_config(cli);
    ensure_out_dir(cfg);
    if (cfg.state_path.empty() || cfg.control_path.empty() || cfg.adjoint_path.empty())
        throw std::invalid_argument("audit: paths.state, paths.control and paths.adjoint are required");

    const Trajectory m = read_trajectory(cfg.state_path);
    const Trajectory u = read_trajectory(cfg.control_path);
    const Trajectory phi = read_trajectory(cfg.adjoint_path);
    if (!m.grid.same_space(u.grid) || !m.grid.same_space(phi.grid) ||
        m.n_snaps() != u.n_snaps() || m.n_snaps() != phi.n_snaps())
        throw std::invalid_argument("audit: state/control/adjoint files are dimensionally inconsistent");
    if (!m.grid.same_space(cfg.grid) || m.grid.nt != cfg.grid.nt)
        throw std::invalid_argument("audit: file grid does not match the config grid");

    const ProblemData pd = build_problem(cfg, cli.quiet);
    Control c = pd.control;
    c.u = u;

    OptimizeOptions opts = optimize_options(cfg);
    opts.threads = cli.threads;
    const OptimalityReport rep = make_optimality_report(m, c, phi, pd.targets, cfg.penalty_k, opts);

    write_json_atomic(report_to_json(rep), out_path(cfg, "audit.json"));
    if (!cli.quiet)
        std::cout << "audit: fooc_residual = " << rep.fooc_residual << ", in_box = "
                  << (rep.in_box ? "true" : "false") << ", global_product = " << rep.global_product
                  << "\n";
    write_manifest(cfg, "audit", sw.seconds(), {out_path(cfg, "audit.json")},
                   report_to_json(rep));
    return 0;
}

int cmd_refine(const CliOptions& cli) {
    Stopwatch sw;
    const RunConfig cfg = load_effective_config(cli);
    ensure_out_dir(cfg);

    const int levels = cfg.refine_levels;
    std::vector<Grid> grids;
    for (int l = 0; l < levels; ++l) {
        const int scale = 1 << l;
        grids.emplace_back((cfg.grid.nx - 1) * scale + 1, (cfg.grid.ny - 1) * scale + 1,
                           cfg.grid.Lx, cfg.grid.Ly, cfg.grid.dt / (scale * scale),
                           cfg.grid.nt * scale * scale);
    }

    std::vector<Field3> endpoints;
    std::vector<double> grad_mismatch(levels), duality(levels), dts(levels);

    for (int l = 0; l < levels; ++l) {
        RunConfig lc = cfg;
        lc.grid = grids[l];
        const ProblemData pd = build_problem(lc, true);

        StateProblem sp = make_state_problem(lc, pd, true);
        const Trajectory m = solve_state(sp);
        endpoints.push_back(m.back());
        dts[l] = grids[l].dt;

        const Trajectory phi = solve_adjoint(m, pd.control.u, pd.targets, true);
        const ReducedGradient grad = reduced_gradient(pd.control.u, m, phi);

        std::mt19937_64 rng(cfg.seed);  // same coefficients on every level
        const Trajectory h = random_smooth_trajectory(grids[l], rng, 1.0);
        const double adjoint_value = inner_spacetime(grad.g_l2, h);
        auto reduced_cost = [&](const Trajectory& u) {
            sp.u = u;
            return cost(solve_state(sp), u, pd.targets).total;
        };
        Trajectory up = pd.control.u;
        t_axpy(up, cfg.refine_epsilon, h);
        Trajectory um = pd.control.u;
        t_axpy(um, -cfg.refine_epsilon, h);
        const double fd = (reduced_cost(up) - reduced_cost(um)) / (2.0 * cfg.refine_epsilon);
        grad_mismatch[l] = std::abs(fd - adjoint_value) / std::max(std::abs(fd), 1e-14);

        const Trajectory f = deriv_rhs(m, h);
        const Trajectory z = solve_linearized(m, pd.control.u, f, Field3(grids[l]), true);
        duality[l] = duality_check(m, pd.control.u, pd.targets, z, f, phi).rel_residual;
    }

    // State endpoint error against the finest level, restricted to each
    // coarser grid by nodal injection.
    std::vector<double> state_err(levels - 1);
    for (int l = 0; l < levels - 1; ++l) {
        const int stride = 1 << (levels - 1 - l);
        Field3 diff(grids[l]);
        for (int iy = 0; iy < grids[l].ny; ++iy)
            for (int ix = 0; ix < grids[l].nx; ++ix) {
                const Vec3 a = endpoints[l].at(ix, iy);
                const Vec3 b = endpoints[levels - 1].at(ix * stride, iy * stride);
                diff.set(ix, iy, a - b);
            }
        state_err[l] = field_norm(diff, grids[l], NormKind::L2);
    }

    auto order_in_dt = [&](double e_coarse, double e_fine, double dt_coarse, double dt_fine) {
        if (!(e_coarse > 0.0) || !(e_fine > 0.0)) return 0.0;
        return std::log(e_coarse / e_fine) / std::log(dt_coarse / dt_fine);
    };

    json table = json::array();
    if (!cli.quiet) std::cout << "level  h              dt             state_err      grad_mismatch  duality_resid\n";
    for (int l = 0; l < levels; ++l) {
        json row{{"level", l},        {"h", grids[l].hx},
                 {"dt", dts[l]},      {"grad_mismatch", grad_mismatch[l]},
                 {"duality", duality[l]}};
        if (l < levels - 1) row["state_err"] = state_err[l];
        table.push_back(row);
        if (!cli.quiet) {
            std::cout << l << "      " << std::scientific << grids[l].hx << "   " << dts[l] << "   ";
            if (l < levels - 1)
                std::cout << state_err[l];
            else
                std::cout << "(reference) ";
            std::cout << "   " << grad_mismatch[l] << "   " << duality[l] << "\n";
        }
    }

    json orders;
    if (levels >= 3)
        orders["state_order_dt"] = order_in_dt(state_err[0], state_err[1], dts[0], dts[1]);
    orders["grad_order_dt"] =
        order_in_dt(grad_mismatch[0], grad_mismatch[levels - 1], dts[0], dts[levels - 1]);
    orders["duality_order_dt"] =
        order_in_dt(duality[0], duality[levels - 1], dts[0], dts[levels - 1]);
    if (!cli.quiet) std::cout << "observed orders (in dt): " << orders.dump() << "\n";

    json doc{{"table", table}, {"orders", orders}};
    write_json_atomic(doc, out_path(cfg, "refine.json"));
    write_manifest(cfg, "refine", sw.seconds(), {out_path(cfg, "refine.json")}, doc);
    return 0;
}

}  // namespace llg
