#include "llg/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "llg/presets.hpp"

namespace llg {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw std::invalid_argument("config: block '" + where + "' must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok)
            throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
    }
}

double get_num(const json& j, const char* key, std::optional<double> fallback = {}) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw std::invalid_argument(std::string("config: missing key '") + key + "'");
    }
    if (!j[key].is_number())
        throw std::invalid_argument(std::string("config: key '") + key + "' must be a number");
    return j[key].get<double>();
}

std::vector<double> parse_reals(const std::string& body, const std::string& spec) {
    std::vector<double> vals;
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            size_t used = 0;
            vals.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw std::invalid_argument("config: cannot parse number '" + tok + "' in spec '" +
                                        spec + "'");
        }
    }
    return vals;
}

struct SpecParts {
    std::string kind;
    std::string body;
};

SpecParts split_spec(const std::string& spec) {
    const size_t pos = spec.find(':');
    if (pos == std::string::npos) return {spec, ""};
    return {spec.substr(0, pos), spec.substr(pos + 1)};
}

Vec3 parse_vec3(const std::string& body, const std::string& spec) {
    const std::vector<double> v = parse_reals(body, spec);
    if (v.size() != 3)
        throw std::invalid_argument("config: spec '" + spec + "' needs three components");
    return {v[0], v[1], v[2]};
}

double parse_one(const std::string& body, const std::string& spec) {
    const std::vector<double> v = parse_reals(body, spec);
    if (v.size() != 1) throw std::invalid_argument("config: spec '" + spec + "' needs one number");
    return v[0];
}

}  // namespace

RunConfig parse_config(const json& j) {
    check_keys(j, "config root",
               {"grid", "time", "scheme", "problem", "optimizer", "gradcheck", "refine", "paths",
                "seed"});
    RunConfig cfg;
    cfg.raw = j;

    if (!j.contains("grid") || !j.contains("time"))
        throw std::invalid_argument("config: 'grid' and 'time' blocks are required");
    const json& jg = j["grid"];
    check_keys(jg, "grid", {"nx", "ny", "Lx", "Ly"});
    const json& jt = j["time"];
    check_keys(jt, "time", {"dt", "T"});
    const double dt = get_num(jt, "dt");
    const double T = get_num(jt, "T");
    if (!(dt > 0.0) || !(T > 0.0))
        throw std::invalid_argument("config: dt and T must be positive");
    const long long nt = std::llround(T / dt);
    if (nt < 1 || std::abs(nt * dt - T) > 1e-9 * std::max(1.0, T))
        throw std::invalid_argument("config: T must be an integer multiple of dt");
    cfg.grid = Grid(static_cast<int>(get_num(jg, "nx")), static_cast<int>(get_num(jg, "ny")),
                    get_num(jg, "Lx"), get_num(jg, "Ly"), dt, static_cast<int>(nt));

    if (j.contains("scheme")) {
        const json& js = j["scheme"];
        check_keys(js, "scheme", {"type", "penalty_k"});
        const std::string type = js.value("type", "projection");
        if (type == "projection")
            cfg.scheme = Scheme::projection;
        else if (type == "penalized")
            cfg.scheme = Scheme::penalized;
        else
            throw std::invalid_argument("config: scheme.type must be 'projection' or 'penalized'");
        cfg.penalty_k = get_num(js, "penalty_k", 100.0);
    }

    if (j.contains("problem")) {
        const json& jp = j["problem"];
        check_keys(jp, "problem", {"m0", "u", "m_d", "m_omega", "a", "b", "R"});
        cfg.m0_spec = jp.value("m0", cfg.m0_spec);
        cfg.u_spec = jp.value("u", cfg.u_spec);
        cfg.md_spec = jp.value("m_d", cfg.md_spec);
        cfg.momega_spec = jp.value("m_omega", cfg.momega_spec);
        cfg.box_a = get_num(jp, "a", cfg.box_a);
        cfg.box_b = get_num(jp, "b", cfg.box_b);
        cfg.cost_cap_R = get_num(jp, "R", cfg.cost_cap_R);
        if (!(cfg.box_a <= cfg.box_b))
            throw std::invalid_argument("config: problem.a must not exceed problem.b");
    }

    if (j.contains("optimizer")) {
        const json& jo = j["optimizer"];
        check_keys(jo, "optimizer",
                   {"tol", "max_iters", "direction", "armijo_c1", "initial_step",
                    "second_order_directions", "second_order_delta", "user_C"});
        cfg.opt_tol = get_num(jo, "tol", cfg.opt_tol);
        cfg.opt_max_iters = static_cast<int>(get_num(jo, "max_iters", cfg.opt_max_iters));
        const std::string dir = jo.value("direction", "h1");
        if (dir == "h1")
            cfg.opt_use_h1 = true;
        else if (dir == "l2")
            cfg.opt_use_h1 = false;
        else
            throw std::invalid_argument("config: optimizer.direction must be 'l2' or 'h1'");
        cfg.opt_armijo_c1 = get_num(jo, "armijo_c1", cfg.opt_armijo_c1);
        cfg.opt_initial_step = get_num(jo, "initial_step", cfg.opt_initial_step);
        cfg.second_order_directions =
            static_cast<int>(get_num(jo, "second_order_directions", cfg.second_order_directions));
        cfg.second_order_delta = get_num(jo, "second_order_delta", cfg.second_order_delta);
        cfg.user_C = get_num(jo, "user_C", cfg.user_C);
    }

    if (j.contains("gradcheck")) {
        const json& jc = j["gradcheck"];
        check_keys(jc, "gradcheck", {"epsilons", "tolerance"});
        if (jc.contains("epsilons")) {
            if (!jc["epsilons"].is_array())
                throw std::invalid_argument("config: gradcheck.epsilons must be an array");
            cfg.gradcheck_epsilons = jc["epsilons"].get<std::vector<double>>();
            if (cfg.gradcheck_epsilons.empty())
                throw std::invalid_argument("config: gradcheck.epsilons must be non-empty");
        }
        cfg.gradcheck_tolerance = get_num(jc, "tolerance", cfg.gradcheck_tolerance);
    }

    if (j.contains("refine")) {
        const json& jr = j["refine"];
        check_keys(jr, "refine", {"levels", "epsilon"});
        cfg.refine_levels = static_cast<int>(get_num(jr, "levels", cfg.refine_levels));
        if (cfg.refine_levels < 2 || cfg.refine_levels > 4)
            throw std::invalid_argument("config: refine.levels must be between 2 and 4");
        cfg.refine_epsilon = get_num(jr, "epsilon", cfg.refine_epsilon);
    }

    if (j.contains("paths")) {
        const json& jp = j["paths"];
        check_keys(jp, "paths", {"out_dir", "state", "control", "adjoint", "write_csv"});
        cfg.out_dir = jp.value("out_dir", cfg.out_dir);
        cfg.state_path = jp.value("state", cfg.state_path);
        cfg.control_path = jp.value("control", cfg.control_path);
        cfg.adjoint_path = jp.value("adjoint", cfg.adjoint_path);
        if (jp.contains("write_csv")) {
            if (!jp["write_csv"].is_boolean())
                throw std::invalid_argument("config: paths.write_csv must be a boolean");
            cfg.write_csv = jp["write_csv"].get<bool>();
        }
    }

    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            throw std::invalid_argument("config: seed must be an integer");
        cfg.seed = j["seed"].get<uint64_t>();
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config: parse error in " + path + ": " + e.what());
    }
    return parse_config(j);
}

Field3 make_initial_field(const std::string& spec, const Grid& g) {
    const SpecParts p = split_spec(spec);
    if (p.kind == "constant") {
        const Vec3 v = parse_vec3(p.body, spec);
        if (!(norm(v) > 0.0))
            throw std::invalid_argument("config: constant initial data must be nonzero");
        return uniform_field(g, (1.0 / norm(v)) * v);
    }
    if (p.kind == "cosine") return preset_cosine_tilt(g, parse_one(p.body, spec));
    if (p.kind == "file") {
        const Trajectory t = read_trajectory(p.body);
        if (!t.grid.same_space(g))
            throw std::invalid_argument("config: initial-data file grid does not match config grid");
        return renormalize(t.snaps.front());
    }
    throw std::invalid_argument("config: unknown initial-data spec '" + spec + "'");
}

Trajectory make_control_trajectory(const std::string& spec, const Grid& g) {
    const SpecParts p = split_spec(spec);
    if (p.kind == "zero") return zero_trajectory(g);
    if (p.kind == "constant")
        return constant_trajectory(g, uniform_field(g, parse_vec3(p.body, spec)));
    if (p.kind == "relax") {
        const double beta = parse_one(p.body, spec);
        return constant_trajectory(g, uniform_field(g, {0.0, 0.0, beta}));
    }
    if (p.kind == "mode") return constant_trajectory(g, preset_mode(g, parse_vec3(p.body, spec)));
    if (p.kind == "file") {
        const Trajectory t = read_trajectory(p.body);
        if (!t.grid.same_space(g) || t.n_snaps() != g.nt + 1)
            throw std::invalid_argument("config: control file dimensions do not match config grid");
        return t;
    }
    throw std::invalid_argument("config: unknown control spec '" + spec + "'");
}

ProblemData build_problem(const RunConfig& cfg, bool quiet) {
    ProblemData pd;
    pd.grid = cfg.grid;
    pd.m0 = make_initial_field(cfg.m0_spec, cfg.grid);
    pd.u0 = make_control_trajectory(cfg.u_spec, cfg.grid);

    auto forward = [&](const Trajectory& u) {
        StateProblem sp;
        sp.grid = cfg.grid;
        sp.m0 = pd.m0;
        sp.u = u;
        sp.scheme = Scheme::projection;
        sp.quiet = quiet;
        return solve_state(sp);
    };

    const SpecParts md = split_spec(cfg.md_spec);
    if (md.kind == "self") {
        pd.targets.m_d = forward(pd.u0);
    } else if (md.kind == "relax") {
        pd.targets.m_d = forward(make_control_trajectory(cfg.md_spec, cfg.grid));
    } else if (md.kind == "constant") {
        const Vec3 v = parse_vec3(md.body, cfg.md_spec);
        pd.targets.m_d = constant_trajectory(cfg.grid, uniform_field(cfg.grid, v));
    } else if (md.kind == "cosine") {
        pd.targets.m_d =
            constant_trajectory(cfg.grid, preset_cosine_tilt(cfg.grid, parse_one(md.body, cfg.md_spec)));
    } else if (md.kind == "file") {
        pd.targets.m_d = read_trajectory(md.body);
        if (!pd.targets.m_d.grid.same_space(cfg.grid) || pd.targets.m_d.n_snaps() != cfg.grid.nt + 1)
            throw std::invalid_argument("config: m_d file dimensions do not match config grid");
    } else {
        throw std::invalid_argument("config: unknown m_d spec '" + cfg.md_spec + "'");
    }

    const SpecParts mo = split_spec(cfg.momega_spec);
    if (mo.kind == "md_end") {
        pd.targets.m_omega = pd.targets.m_d.back();
    } else if (mo.kind == "constant") {
        pd.targets.m_omega = uniform_field(cfg.grid, parse_vec3(mo.body, cfg.momega_spec));
    } else if (mo.kind == "cosine") {
        pd.targets.m_omega = preset_cosine_tilt(cfg.grid, parse_one(mo.body, cfg.momega_spec));
    } else if (mo.kind == "file") {
        const Trajectory t = read_trajectory(mo.body);
        if (!t.grid.same_space(cfg.grid))
            throw std::invalid_argument("config: m_omega file grid does not match config grid");
        pd.targets.m_omega = t.back();
    } else {
        throw std::invalid_argument("config: unknown m_omega spec '" + cfg.momega_spec + "'");
    }

    pd.control.u = pd.u0;
    pd.control.a = ScalarTrajectory(cfg.grid, cfg.box_a);
    pd.control.b = ScalarTrajectory(cfg.grid, cfg.box_b);
    pd.control.cost_cap_R = cfg.cost_cap_R;
    return pd;
}

OptimizeOptions optimize_options(const RunConfig& cfg) {
    OptimizeOptions o;
    o.tol = cfg.opt_tol;
    o.max_iters = cfg.opt_max_iters;
    o.use_h1_direction = cfg.opt_use_h1;
    o.armijo_c1 = cfg.opt_armijo_c1;
    o.initial_step = cfg.opt_initial_step;
    o.user_C = cfg.user_C;
    o.second_order_directions = cfg.second_order_directions;
    o.second_order_delta = cfg.second_order_delta;
    o.seed = cfg.seed;
    return o;
}

}  // namespace llg
