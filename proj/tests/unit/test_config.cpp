#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "llg/commands.hpp"

using namespace llg;
using nlohmann::json;

namespace {

json minimal_config() {
    return json{{"grid", {{"nx", 9}, {"ny", 9}, {"Lx", 1.0}, {"Ly", 1.0}}},
                {"time", {{"dt", 0.001}, {"T", 0.01}}}};
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string write_config(const TempDir& dir, const json& j, const std::string& name = "cfg.json") {
    const std::string p = dir.file(name);
    std::ofstream out(p);
    out << j.dump(2);
    return p;
}

}  // namespace

TEST_CASE("config: minimal parse and derived grid") {
    RunConfig cfg = parse_config(minimal_config());
    CHECK(cfg.grid.nx == 9);
    CHECK(cfg.grid.nt == 10);
    CHECK(cfg.grid.T == doctest::Approx(0.01));
    CHECK(cfg.scheme == Scheme::projection);
}

TEST_CASE("config: unknown keys are rejected by name") {
    json j = minimal_config();
    j["gird"] = json{{"nx", 4}};
    CHECK_THROWS_WITH_AS((void)parse_config(j), doctest::Contains("gird"), std::invalid_argument);

    json j2 = minimal_config();
    j2["grid"]["nz"] = 4;
    CHECK_THROWS_WITH_AS((void)parse_config(j2), doctest::Contains("nz"), std::invalid_argument);
}

TEST_CASE("config: validation failures") {
    json j = minimal_config();
    j["time"]["T"] = 0.0105;  // not a multiple of dt
    CHECK_THROWS_AS((void)parse_config(j), std::invalid_argument);

    json j2 = minimal_config();
    j2["problem"] = json{{"a", 1.0}, {"b", -1.0}};
    CHECK_THROWS_AS((void)parse_config(j2), std::invalid_argument);

    json j3 = minimal_config();
    j3["scheme"] = json{{"type", "magic"}};
    CHECK_THROWS_AS((void)parse_config(j3), std::invalid_argument);

    json j4 = minimal_config();
    j4["optimizer"] = json{{"direction", "h2"}};
    CHECK_THROWS_AS((void)parse_config(j4), std::invalid_argument);
}

TEST_CASE("config: presets assemble a consistent problem") {
    json j = minimal_config();
    j["problem"] = json{{"m0", "constant:0,0,2"}, {"u", "relax:0.3"}, {"m_d", "relax:0.3"},
                        {"m_omega", "md_end"},    {"a", -1.0},       {"b", 1.0},
                        {"R", 5.0}};
    RunConfig cfg = parse_config(j);
    ProblemData pd = build_problem(cfg, true);

    CHECK(max_unit_violation(pd.m0) <= 1e-12);  // constants get normalized
    CHECK(pd.u0.snaps[3].c[2].v[10] == doctest::Approx(0.3));
    // the relax target is the forward solve under the same control
    StateProblem sp;
    sp.grid = cfg.grid;
    sp.m0 = pd.m0;
    sp.u = pd.u0;
    sp.quiet = true;
    Trajectory m = solve_state(sp);
    CHECK(norm_spacetime_l2(t_sub(m, pd.targets.m_d)) == 0.0);
    double dn = 0.0;
    for (int k = 0; k < 3; ++k) {
        Field3 diff = sub(pd.targets.m_omega, pd.targets.m_d.back());
        dn += field_norm(diff, cfg.grid, NormKind::L2);
    }
    CHECK(dn == 0.0);

    json jb = minimal_config();
    jb["problem"] = json{{"m0", "nonsense:1"}};
    RunConfig bad = parse_config(jb);
    CHECK_THROWS_AS((void)build_problem(bad, true), std::invalid_argument);
}

TEST_CASE("simulate command writes state, energy report and manifest") {
    TempDir dir("llg_cfg_test_sim");
    json j = minimal_config();
    j["problem"] = json{{"m0", "cosine:0.4"}, {"u", "zero"}, {"m_d", "self"},
                        {"m_omega", "md_end"}, {"a", -2.0}, {"b", 2.0}, {"R", 10.0}};
    j["paths"] = json{{"out_dir", dir.file("out")}};
    CliOptions cli;
    cli.config_path = write_config(dir, j);
    cli.quiet = true;
    CHECK(cmd_simulate(cli) == 0);

    Trajectory m = read_trajectory(dir.file("out") + "/state.llgf");
    CHECK(m.n_snaps() == 11);
    CHECK(max_unit_violation(m.back()) <= 1e-12);

    std::ifstream in(dir.file("out") + "/energy.json");
    json energy;
    in >> energy;
    CHECK(energy.contains("lhs_weak"));
    CHECK(energy.contains("slack"));
    CHECK(energy["regularity_indicator"].get<bool>());

    std::ifstream mi(dir.file("out") + "/manifest.json");
    json manifest;
    mi >> manifest;
    CHECK(manifest["command"] == "simulate");
    CHECK(manifest["config"]["grid"]["nx"] == 9);
}

TEST_CASE("audit rejects dimensionally inconsistent file triples") {
    TempDir dir("llg_cfg_test_audit");
    json j = minimal_config();
    j["paths"] = json{{"out_dir", dir.file("out")},
                      {"state", dir.file("m.llgf")},
                      {"control", dir.file("u.llgf")},
                      {"adjoint", dir.file("phi.llgf")}};
    CliOptions cli;
    cli.config_path = write_config(dir, j);
    cli.quiet = true;

    Grid g(9, 9, 1.0, 1.0, 1e-3, 10);
    Grid g2(7, 7, 1.0, 1.0, 1e-3, 10);
    write_trajectory(constant_trajectory(g, uniform_field(g, {0, 0, 1})), dir.file("m.llgf"));
    write_trajectory(zero_trajectory(g2), dir.file("u.llgf"));  // wrong grid
    write_trajectory(zero_trajectory(g), dir.file("phi.llgf"));
    CHECK_THROWS_WITH_AS((void)cmd_audit(cli), doctest::Contains("inconsistent"),
                         std::invalid_argument);
}

TEST_CASE("gradcheck passes at 5% on a generic desk problem") {
    TempDir dir("llg_cfg_test_gc_generic");
    json j{{"grid", {{"nx", 33}, {"ny", 33}, {"Lx", 1.0}, {"Ly", 1.0}}},
           {"time", {{"dt", 0.001}, {"T", 0.08}}},
           {"problem",
            {{"m0", "cosine:0.5"},
             {"u", "mode:0.3,-0.2,0.5"},
             {"m_d", "constant:0,0,1"},
             {"m_omega", "constant:0,0,1"},
             {"a", -2.0},
             {"b", 2.0},
             {"R", 10.0}}},
           {"gradcheck", {{"epsilons", {1e-3}}, {"tolerance", 0.05}}},
           {"paths", {{"out_dir", dir.file("out")}}},
           {"seed", 21}};
    CliOptions cli;
    cli.config_path = write_config(dir, j);
    cli.quiet = true;
    CHECK(cmd_gradcheck(cli) == 0);
}

TEST_CASE("penalized simulate reports a positive penalty violation") {
    TempDir dir("llg_cfg_test_pen");
    json j = minimal_config();
    j["time"] = json{{"dt", 0.0005}, {"T", 0.01}};
    j["scheme"] = json{{"type", "penalized"}, {"penalty_k", 100.0}};
    j["problem"] = json{{"m0", "cosine:0.4"}, {"u", "mode:0.3,0,0.5"}, {"m_d", "self"},
                        {"m_omega", "md_end"}, {"a", -2.0}, {"b", 2.0}, {"R", 10.0}};
    j["paths"] = json{{"out_dir", dir.file("out")}};
    CliOptions cli;
    cli.config_path = write_config(dir, j);
    cli.quiet = true;
    CHECK(cmd_simulate(cli) == 0);

    std::ifstream in(dir.file("out") + "/energy.json");
    json energy;
    in >> energy;
    CHECK(energy["penalty_violation"].get<double>() > 0.0);
}

TEST_CASE("refine on the macrospin preset observes first order in dt") {
    TempDir dir("llg_cfg_test_refine");
    json j{{"grid", {{"nx", 5}, {"ny", 5}, {"Lx", 1.0}, {"Ly", 1.0}}},
           {"time", {{"dt", 0.004}, {"T", 0.4}}},
           {"problem",
            {{"m0", "constant:1,0,0"},
             {"u", "constant:0,0,0.5"},
             {"m_d", "constant:0,0,1"},
             {"m_omega", "constant:0,0,1"},
             {"a", -2.0},
             {"b", 2.0},
             {"R", 10.0}}},
           {"refine", {{"levels", 3}, {"epsilon", 1e-3}}},
           {"paths", {{"out_dir", dir.file("out")}}},
           {"seed", 3}};
    CliOptions cli;
    cli.config_path = write_config(dir, j);
    cli.quiet = true;
    CHECK(cmd_refine(cli) == 0);

    std::ifstream in(dir.file("out") + "/refine.json");
    json doc;
    in >> doc;
    const double order = doc["orders"]["state_order_dt"].get<double>();
    CHECK(order >= 0.8);
    CHECK(order <= 1.2);
}

TEST_CASE("gradcheck on a tracking-zero problem is exact to 1e-8") {
    TempDir dir("llg_cfg_test_gc");
    json j = minimal_config();
    j["grid"] = json{{"nx", 9}, {"ny", 9}, {"Lx", 1.0}, {"Ly", 1.0}};
    j["time"] = json{{"dt", 0.0005}, {"T", 0.01}};
    j["problem"] = json{{"m0", "cosine:0.3"}, {"u", "constant:0.1,0,0.2"}, {"m_d", "self"},
                        {"m_omega", "md_end"}, {"a", -3.0}, {"b", 3.0}, {"R", 10.0}};
    j["gradcheck"] = json{{"epsilons", {1e-4, 1e-5}}, {"tolerance", 1e-8}};
    j["paths"] = json{{"out_dir", dir.file("out")}};
    j["seed"] = 7;
    CliOptions cli;
    cli.config_path = write_config(dir, j);
    cli.quiet = true;
    CHECK(cmd_gradcheck(cli) == 0);

    std::ifstream in(dir.file("out") + "/gradcheck.json");
    json doc;
    in >> doc;
    CHECK(doc["pass"].get<bool>());
    CHECK(doc["best_rel_err"].get<double>() <= 1e-8);
}
