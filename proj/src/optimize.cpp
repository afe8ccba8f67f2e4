#include "llg/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iostream>
#include <random>

#include "llg/presets.hpp"

namespace llg {

namespace {

inline double time_weight(const Grid& g, int n) {
    return (n == 0 || n == g.nt) ? 0.5 * g.dt : g.dt;
}

}  // namespace

void Control::validate() const {
    u.validate();
    if (static_cast<int>(a.snaps.size()) != u.n_snaps() ||
        static_cast<int>(b.snaps.size()) != u.n_snaps())
        throw std::invalid_argument("Control: bound trajectories must match the control length");
    for (int n = 0; n < u.n_snaps(); ++n)
        for (size_t i = 0; i < a.snaps[n].v.size(); ++i)
            if (!(a.snaps[n].v[i] <= b.snaps[n].v[i]))
                throw std::invalid_argument("Control: lower bound exceeds upper bound");
    if (!(cost_cap_R > 0.0)) throw std::invalid_argument("Control: cost cap R must be positive");
}

CostBreakdown cost(const Trajectory& m, const Trajectory& u, const TargetData& targets) {
    m.validate();
    u.validate();
    const Grid& g = m.grid;
    if (!u.grid.same_space(g) || u.n_snaps() != m.n_snaps())
        throw std::invalid_argument("cost: state/control grid mismatch");
    targets.validate(g);

    CostBreakdown out;
    for (int n = 0; n < m.n_snaps(); ++n) {
        const double wt = time_weight(g, n);
        const ScalarField q = node_grad_sq(sub(m.snaps[n], targets.m_d.snaps[n]), g);
        double track = 0.0;
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix)
                track += node_weight(g, ix, iy) * q.at(ix, iy) * q.at(ix, iy);
        out.j_track_grad += 0.25 * wt * track;

        double ul2 = 0.0;
        for (int k = 0; k < 3; ++k) ul2 += inner(u.snaps[n].c[k], u.snaps[n].c[k], g);
        out.j_ctrl_l2 += 0.5 * wt * ul2;
        out.j_ctrl_grad += 0.5 * wt * integral(node_grad_sq(u.snaps[n], g), g);
    }
    const Field3 terminal = sub(m.back(), targets.m_omega);
    const double tn = field_norm(terminal, g, NormKind::L2);
    out.j_terminal = 0.5 * tn * tn;
    out.total = out.j_track_grad + out.j_terminal + out.j_ctrl_l2 + out.j_ctrl_grad;
    return out;
}

ReducedGradient reduced_gradient(const Trajectory& u, const Trajectory& m, const Trajectory& phi) {
    u.validate();
    m.validate();
    phi.validate();
    const Grid& g = u.grid;
    if (!m.grid.same_space(g) || m.n_snaps() != u.n_snaps() || phi.n_snaps() != u.n_snaps())
        throw std::invalid_argument("reduced_gradient: trajectory mismatch");

    ReducedGradient out{Trajectory(g), Trajectory(g)};
    for (int n = 0; n < u.n_snaps(); ++n) {
        const Field3 pm = cross(phi.snaps[n], m.snaps[n]);
        Field3 gl = sub(u.snaps[n], laplacian(u.snaps[n], g));
        axpy(gl, 1.0, pm);
        axpy(gl, 1.0, cross(m.snaps[n], pm));
        out.g_h1.snaps[n] = helmholtz_solve(gl, 1.0, g);
        out.g_l2.snaps[n] = std::move(gl);
    }
    return out;
}

Trajectory project_box(const Trajectory& u, const ScalarTrajectory& a, const ScalarTrajectory& b) {
    u.validate();
    if (static_cast<int>(a.snaps.size()) != u.n_snaps() ||
        static_cast<int>(b.snaps.size()) != u.n_snaps())
        throw std::invalid_argument("project_box: bound trajectories must match the control");
    Trajectory out = u;
    for (int n = 0; n < u.n_snaps(); ++n) {
        const ScalarField& lo = a.snaps[n];
        const ScalarField& hi = b.snaps[n];
        for (size_t i = 0; i < lo.v.size(); ++i) {
            if (!(lo.v[i] <= hi.v[i]))
                throw std::invalid_argument("project_box: lower bound exceeds upper bound");
            for (int k = 0; k < 3; ++k) {
                double& x = out.snaps[n].c[k].v[i];
                x = std::min(std::max(x, lo.v[i]), hi.v[i]);
            }
        }
    }
    return out;
}

double fooc_residual(const Control& c, const Trajectory& g_l2, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("fooc_residual: step must be positive");
    Trajectory trial = c.u;
    t_axpy(trial, -step, g_l2);
    trial = project_box(trial, c.a, c.b);
    return norm_spacetime_l2(t_sub(trial, c.u)) / step;
}

Trajectory critical_cone_project(const Trajectory& h, const Control& c, double active_tol_scale) {
    h.validate();
    if (h.n_snaps() != c.u.n_snaps())
        throw std::invalid_argument("critical_cone_project: trajectory mismatch");
    Trajectory out = h;
    for (int n = 0; n < h.n_snaps(); ++n) {
        const ScalarField& lo = c.a.snaps[n];
        const ScalarField& hi = c.b.snaps[n];
        for (size_t i = 0; i < lo.v.size(); ++i) {
            const double tol = active_tol_scale * (hi.v[i] - lo.v[i]);
            for (int k = 0; k < 3; ++k) {
                const double uv = c.u.snaps[n].c[k].v[i];
                double& hv = out.snaps[n].c[k].v[i];
                if (uv <= lo.v[i] + tol) hv = std::max(hv, 0.0);
                if (uv >= hi.v[i] - tol) hv = std::min(hv, 0.0);
            }
        }
    }
    return out;
}

double second_order_form(const Trajectory& base_m, const Trajectory& base_u,
                         const TargetData& targets, const Trajectory& phi, const Trajectory& h,
                         bool quiet) {
    const Trajectory z =
        solve_linearized(base_m, base_u, deriv_rhs(base_m, h), Field3(base_m.grid), quiet);
    const Trajectory phi_d =
        solve_costate_derivative(base_m, base_u, targets, phi, z, h, quiet);
    return second_order_form_assemble(base_m, phi, z, phi_d, h);
}

double second_order_form_assemble(const Trajectory& base_m, const Trajectory& phi,
                                  const Trajectory& z, const Trajectory& phi_d,
                                  const Trajectory& h) {
    const Grid& g = base_m.grid;
    double value = 0.0;
    for (int n = 0; n <= g.nt; ++n) {
        const double wt = time_weight(g, n);
        const Field3& hn = h.snaps[n];
        const Field3& mn = base_m.snaps[n];
        const Field3& pn = phi.snaps[n];
        const Field3& zn = z.snaps[n];
        const Field3& pdn = phi_d.snaps[n];

        double snap = 0.0;
        for (int k = 0; k < 3; ++k) snap += inner(hn.c[k], hn.c[k], g);
        snap += integral(node_grad_sq(hn, g), g);

        const Field3 pm = cross(pn, mn);
        const Field3 pz = cross(pn, zn);
        const Field3 pdm = cross(pdn, mn);
        Field3 sum = pdm;                       // phi' x m
        axpy(sum, 1.0, pz);                     // phi x z = phi x m'[h]
        axpy(sum, 1.0, cross(zn, pm));          // m'[h] x (phi x m)
        axpy(sum, 1.0, cross(mn, pdm));         // m x (phi' x m)
        axpy(sum, 1.0, cross(mn, pz));          // m x (phi x m'[h])
        for (int k = 0; k < 3; ++k) snap += inner(sum.c[k], hn.c[k], g);

        value += wt * snap;
    }
    return value;
}

GlobalConditionReport global_condition_report(const Trajectory& m, const Trajectory& u,
                                              const Trajectory& phi, double user_C) {
    GlobalConditionReport rep;
    rep.state_h2_linf = trajectory_norm(m, NormKind::LinfH2Proxy);
    rep.control_l2h1 = trajectory_norm(u, NormKind::L2H1);
    rep.phi_l2l2 = norm_spacetime_l2(phi);
    rep.product = (1.0 + rep.state_h2_linf + rep.control_l2h1) * rep.phi_l2l2;
    rep.user_C = user_C;
    rep.holds = user_C * rep.product <= 0.5;
    return rep;
}

namespace {

bool inside_box(const Trajectory& u, const ScalarTrajectory& a, const ScalarTrajectory& b) {
    for (int n = 0; n < u.n_snaps(); ++n)
        for (size_t i = 0; i < a.snaps[n].v.size(); ++i)
            for (int k = 0; k < 3; ++k) {
                const double x = u.snaps[n].c[k].v[i];
                if (x < a.snaps[n].v[i] || x > b.snaps[n].v[i]) return false;
            }
    return true;
}

}  // namespace

OptimalityReport make_optimality_report(const Trajectory& m, const Control& c,
                                        const Trajectory& phi, const TargetData& targets,
                                        double penalty_k, const OptimizeOptions& opts) {
    OptimalityReport rep;
    const ReducedGradient grad = reduced_gradient(c.u, m, phi);
    rep.fooc_residual = fooc_residual(c, grad.g_l2, 1.0);
    rep.grad_norm_l2 = norm_spacetime_l2(grad.g_l2);
    rep.grad_norm_h1 = trajectory_norm(grad.g_h1, NormKind::L2H1);
    const GlobalConditionReport glob = global_condition_report(m, c.u, phi, opts.user_C);
    rep.global_product = glob.product;
    rep.user_C = opts.user_C;
    rep.global_condition_holds = glob.holds;
    rep.in_box = inside_box(c.u, c.a, c.b);
    rep.cost = cost(m, c.u, targets);
    rep.cost_leq_R_half = rep.cost.total <= 0.5 * c.cost_cap_R;
    rep.target_grad_l6l6 = trajectory_grad_norm(targets.m_d, 6);
    rep.energy = energy_report(m, c.u, m.snaps[0], penalty_k);

    if (opts.second_order_directions > 0) {
        std::mt19937_64 rng(opts.seed);
        std::vector<Trajectory> dirs;
        dirs.reserve(opts.second_order_directions);
        for (int i = 0; i < opts.second_order_directions; ++i)
            dirs.push_back(critical_cone_project(random_smooth_trajectory(m.grid, rng, 1.0), c));

        std::vector<SecondOrderSample> samples(dirs.size());
        auto eval = [&](int i) {
            SecondOrderSample s;
            s.id = i;
            s.value = second_order_form(m, c.u, targets, phi, dirs[i], true);
            const double hn = trajectory_norm(dirs[i], NormKind::L2H1);
            s.h_norm_sq = hn * hn;
            s.threshold = opts.second_order_delta * s.h_norm_sq;
            s.satisfied = s.value >= s.threshold;
            return s;
        };
        if (opts.threads > 1) {
            std::vector<std::future<SecondOrderSample>> futs;
            for (int i = 0; i < static_cast<int>(dirs.size()); ++i)
                futs.push_back(std::async(std::launch::async, eval, i));
            for (size_t i = 0; i < futs.size(); ++i) samples[i] = futs[i].get();
        } else {
            for (int i = 0; i < static_cast<int>(dirs.size()); ++i) samples[i] = eval(i);
        }
        rep.second_order = std::move(samples);
    }
    return rep;
}

OptimizeResult optimize(const OptimizeProblem& p, const OptimizeOptions& opts) {
    p.control0.validate();
    p.targets.validate(p.grid);

    OptimizeResult res;
    Control c = p.control0;
    c.u = project_box(c.u, c.a, c.b);

    StateProblem sp;
    sp.grid = p.grid;
    sp.m0 = p.m0;
    sp.scheme = p.scheme;
    sp.penalty_k = p.penalty_k;
    sp.quiet = true;
    auto forward = [&](const Trajectory& u) {
        sp.u = u;
        return solve_state(sp);
    };

    Trajectory m = forward(c.u);
    CostBreakdown cb = cost(m, c.u, p.targets);
    Trajectory phi = solve_adjoint(m, c.u, p.targets, true);
    double step = opts.initial_step;

    for (int iter = 0; iter < opts.max_iters; ++iter) {
        const ReducedGradient grad = reduced_gradient(c.u, m, phi);
        const double r = fooc_residual(c, grad.g_l2, 1.0);
        res.history.push_back({iter, cb.total, r, step});
        if (r <= opts.tol) {
            res.converged = true;
            break;
        }

        const Trajectory& dir = opts.use_h1_direction ? grad.g_h1 : grad.g_l2;
        bool accepted = false;
        double s = step;
        for (int halving = 0; halving <= opts.max_halvings; ++halving) {
            Trajectory trial = c.u;
            t_axpy(trial, -s, dir);
            trial = project_box(trial, c.a, c.b);
            const Trajectory du = t_sub(trial, c.u);
            const double pred = inner_spacetime(grad.g_l2, du);
            if (pred < 0.0) {
                Trajectory m_trial = forward(trial);
                const CostBreakdown cb_trial = cost(m_trial, trial, p.targets);
                if (cb_trial.total <= cb.total + opts.armijo_c1 * pred) {
                    c.u = std::move(trial);
                    m = std::move(m_trial);
                    cb = cb_trial;
                    phi = solve_adjoint(m, c.u, p.targets, true);
                    step = 2.0 * s;
                    accepted = true;
                    break;
                }
            }
            s *= 0.5;
        }
        res.iterations = iter + 1;
        if (!accepted) {
            res.line_search_failed = true;
            if (!opts.quiet)
                std::cerr << "[warn] optimize: line search failed after " << opts.max_halvings
                          << " halvings at iteration " << iter << "; returning best iterate\n";
            break;
        }
    }

    if (res.history.empty() || res.history.back().cost != cb.total) {
        const ReducedGradient grad = reduced_gradient(c.u, m, phi);
        res.history.push_back({res.iterations, cb.total, fooc_residual(c, grad.g_l2, 1.0), step});
    }

    res.report = make_optimality_report(m, c, phi, p.targets, p.penalty_k, opts);
    res.control = std::move(c);
    res.state = std::move(m);
    res.adjoint = std::move(phi);
    return res;
}

}  // namespace llg
