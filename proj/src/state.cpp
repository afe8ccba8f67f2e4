#include "llg/state.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

namespace llg {

namespace {

bool any_component_exceeds(const Field3& f, double cap) {
    for (int k = 0; k < 3; ++k)
        for (double v : f.c[k].v)
            if (!(std::abs(v) <= cap)) return true;
    return false;
}

void warn_cfl(const Grid& g, const char* solver, bool quiet) {
    const double h = g.min_h();
    if (!quiet && g.dt > 0.25 * h * h)
        std::cerr << "[warn] " << solver << ": dt = " << g.dt << " exceeds h^2/4 = "
                  << 0.25 * h * h << "; explicit cross terms may lose accuracy\n";
}

}  // namespace

void StateProblem::validate() const {
    grid.validate();
    require_match(m0, grid, "StateProblem");
    u.validate();
    if (!u.grid.same_space(grid) || u.n_snaps() != grid.nt + 1)
        throw std::invalid_argument("StateProblem: control trajectory must have nt+1 snapshots on the grid");
    if (max_unit_violation(m0) > 1e-12)
        throw std::invalid_argument("StateProblem: initial data is not a unit field");
    if (scheme == Scheme::penalized && !(penalty_k > 0.0))
        throw std::invalid_argument("StateProblem: penalty_k must be positive");
}

std::string validate_initial_data(const Field3& m0, const Grid& g) {
    std::ostringstream msg;
    const double uv = max_unit_violation(m0);
    if (uv > 1e-12) msg << "initial data off the unit sphere by " << uv << "; ";
    // One-sided normal difference at the boundary.  Analytic Neumann data
    // sampled on the grid carries an O(h) residual here, so this stays
    // warn-only.
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
        for (int iy = 0; iy < g.ny; ++iy) {
            worst = std::max(worst, std::abs(m0.c[k].at(1, iy) - m0.c[k].at(0, iy)) / g.hx);
            worst = std::max(worst,
                             std::abs(m0.c[k].at(g.nx - 1, iy) - m0.c[k].at(g.nx - 2, iy)) / g.hx);
        }
        for (int ix = 0; ix < g.nx; ++ix) {
            worst = std::max(worst, std::abs(m0.c[k].at(ix, 1) - m0.c[k].at(ix, 0)) / g.hy);
            worst = std::max(worst,
                             std::abs(m0.c[k].at(ix, g.ny - 1) - m0.c[k].at(ix, g.ny - 2)) / g.hy);
        }
    }
    if (worst > 1e-8)
        msg << "boundary-normal difference of initial data is " << worst
            << " (> 1e-8); zero-flux boundary data only holds to discretization order";
    return msg.str();
}

Field3 effective_rhs(const Field3& m, const Field3& u, const Grid& g) {
    require_match(m, g, "effective_rhs");
    require_match(u, g, "effective_rhs");
    const ScalarField gsq = node_grad_sq(m, g);
    const Field3 lap = laplacian(m, g);
    Field3 out = cross(m, lap);           // m x lap m
    const Field3 mu = cross(m, u);        // m x u
    const Field3 mmu = cross(m, mu);      // m x (m x u)
    for (int k = 0; k < 3; ++k)
        for (size_t i = 0; i < out.c[k].v.size(); ++i)
            out.c[k].v[i] += gsq.v[i] * m.c[k].v[i] + mu.c[k].v[i] - mmu.c[k].v[i];
    return out;
}

Field3 step_projection(const Field3& m, const Field3& u, double dt, const Grid& g) {
    Field3 b = m;
    axpy(b, dt, effective_rhs(m, u, g));
    return renormalize(helmholtz_solve(b, dt, g));
}

Field3 step_penalized(const Field3& m, const Field3& u, double dt, double k, const Grid& g) {
    require_match(m, g, "step_penalized");
    require_match(u, g, "step_penalized");
    const Field3 lap = laplacian(m, g);
    Field3 r = scaled(lap, 2.0);
    const ScalarField m2 = dot(m, m);
    for (int c = 0; c < 3; ++c)
        for (size_t i = 0; i < r.c[c].v.size(); ++i)
            r.c[c].v[i] += -2.0 * k * (m2.v[i] - 1.0) * m.c[c].v[i] + 2.0 * u.c[c].v[i];
    Field3 v = skew_solve(m, r);
    // Keep the bare diffusion implicit: m_t = 2 lap m + (v - 2 lap m).
    Field3 b = m;
    axpy(b, dt, v);
    axpy(b, -2.0 * dt, lap);
    return helmholtz_solve(b, 2.0 * dt, g);
}

Trajectory solve_state(const StateProblem& p) {
    p.validate();
    const Grid& g = p.grid;
    warn_cfl(g, "solve_state", p.quiet);
    if (!p.quiet) {
        const std::string w = validate_initial_data(p.m0, g);
        if (!w.empty()) std::cerr << "[warn] solve_state: " << w << "\n";
    }

    Trajectory m(g);
    m.snaps[0] = (p.scheme == Scheme::projection) ? renormalize(p.m0) : p.m0;
    for (int n = 0; n < g.nt; ++n) {
        m.snaps[n + 1] = (p.scheme == Scheme::projection)
                             ? step_projection(m.snaps[n], p.u.snaps[n], g.dt, g)
                             : step_penalized(m.snaps[n], p.u.snaps[n], g.dt, p.penalty_k, g);
        if (any_component_exceeds(m.snaps[n + 1], 1e3))
            throw SolverFailure("solve_state: magnetization exceeded 1e3 at time step " +
                                    std::to_string(n + 1) + " (t = " + std::to_string((n + 1) * g.dt) + ")",
                                n + 1);
    }
    return m;
}

double unit_violation_spacetime(const Trajectory& m) {
    m.validate();
    const Grid& g = m.grid;
    double total = 0.0;
    for (int n = 0; n < m.n_snaps(); ++n) {
        const ScalarField m2 = dot(m.snaps[n], m.snaps[n]);
        double snap = 0.0;
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix) {
                const double d = m2.at(ix, iy) - 1.0;
                snap += node_weight(g, ix, iy) * d * d;
            }
        total += ((n == 0 || n == g.nt) ? 0.5 * g.dt : g.dt) * snap;
    }
    return total;
}

std::vector<double> exchange_energy_series(const Trajectory& m) {
    std::vector<double> e;
    e.reserve(m.n_snaps());
    for (const Field3& snap : m.snaps)
        e.push_back(0.5 * integral(node_grad_sq(snap, m.grid), m.grid));
    return e;
}

EnergyReport energy_report(const Trajectory& m, const Trajectory& u, const Field3& m0,
                           double penalty_k) {
    m.validate();
    u.validate();
    const Grid& g = m.grid;
    if (!u.grid.same_space(g) || u.n_snaps() != m.n_snaps())
        throw std::invalid_argument("energy_report: state/control dimension mismatch");
    require_match(m0, g, "energy_report");

    EnergyReport rep;

    // 0.5 * int ||m_t||^2 with the piecewise-constant discrete derivative.
    double mt2 = 0.0;
    for (int n = 0; n < g.nt; ++n) {
        const Field3 d = sub(m.snaps[n + 1], m.snaps[n]);
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += inner(d.c[k], d.c[k], g);
        mt2 += s / g.dt;
    }
    double sup_grad = 0.0;
    for (const Field3& snap : m.snaps)
        sup_grad = std::max(sup_grad, integral(node_grad_sq(snap, g), g));
    rep.lhs_weak = 0.5 * mt2 + sup_grad;

    const double u_l2l2 = norm_spacetime_l2(u);
    rep.rhs_weak = integral(node_grad_sq(m0, g), g) + 2.0 * u_l2l2 * u_l2l2;
    rep.slack = rep.rhs_weak - rep.lhs_weak;

    double sup_pen = 0.0;
    for (const Field3& snap : m.snaps) {
        const ScalarField m2 = dot(snap, snap);
        double s = 0.0;
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix) {
                const double d = m2.at(ix, iy) - 1.0;
                s += node_weight(g, ix, iy) * d * d;
            }
        sup_pen = std::max(sup_pen, s);
    }
    rep.penalty_violation = 0.5 * penalty_k * sup_pen;

    const double g4 = trajectory_grad_norm(m, 4);
    rep.grad_l4l4 = g4 * g4 * g4 * g4;

    const double lap0 = field_norm(laplacian(m0, g), g, NormKind::L2);
    const double u_h1 = trajectory_norm(u, NormKind::L2H1);
    rep.regularity_bound_exponent =
        1.0 + lap0 * lap0 * lap0 * lap0 + rep.grad_l4l4 * rep.grad_l4l4 + u_h1 * u_h1 * u_h1 * u_h1;
    rep.regularity_indicator = std::isfinite(rep.grad_l4l4);
    return rep;
}

}  // namespace llg
