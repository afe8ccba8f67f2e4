#include "llg/sensitivity.hpp"

#include <cmath>
#include <iostream>

namespace llg {

namespace {

void require_bases(const Trajectory& m, const Trajectory& u, const char* where) {
    m.validate();
    u.validate();
    if (!m.grid.same_space(u.grid) || m.n_snaps() != u.n_snaps())
        throw std::invalid_argument(std::string(where) + ": base state/control mismatch");
}

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
                  << 0.25 * h * h << "\n";
}

// div( face_avg(s) * grad w ), componentwise.
Field3 div_scalar_flux(const ScalarField& s, const Field3& w, const Grid& g) {
    const FaceFieldX sx = face_avg_x(s, g);
    const FaceFieldY sy = face_avg_y(s, g);
    Field3 out(g);
    for (int k = 0; k < 3; ++k) {
        Gradient2 gw = gradient(w.c[k], g);
        for (size_t i = 0; i < gw.gx.v.size(); ++i) gw.gx.v[i] *= sx.v[i];
        for (size_t i = 0; i < gw.gy.v.size(); ++i) gw.gy.v[i] *= sy.v[i];
        out.c[k] = divergence(gw.gx, gw.gy, g);
    }
    return out;
}

// 2 * sum_i d_i a x d_i b, assembled from face crosses averaged back to nodes.
Field3 twice_grad_cross(const Field3& a, const Field3& b, const Grid& g) {
    Gradient2 ga[3], gb[3];
    for (int k = 0; k < 3; ++k) {
        ga[k] = gradient(a.c[k], g);
        gb[k] = gradient(b.c[k], g);
    }
    Field3 out(g);
    // cross on x-faces
    {
        FaceFieldX cx[3] = {FaceFieldX(g), FaceFieldX(g), FaceFieldX(g)};
        for (size_t i = 0; i < cx[0].v.size(); ++i) {
            const Vec3 av{ga[0].gx.v[i], ga[1].gx.v[i], ga[2].gx.v[i]};
            const Vec3 bv{gb[0].gx.v[i], gb[1].gx.v[i], gb[2].gx.v[i]};
            const Vec3 cv = cross(av, bv);
            cx[0].v[i] = cv.x;
            cx[1].v[i] = cv.y;
            cx[2].v[i] = cv.z;
        }
        for (int k = 0; k < 3; ++k) {
            ScalarField n = node_avg_x(cx[k], g);
            for (size_t i = 0; i < n.v.size(); ++i) out.c[k].v[i] += 2.0 * n.v[i];
        }
    }
    // cross on y-faces
    {
        FaceFieldY cy[3] = {FaceFieldY(g), FaceFieldY(g), FaceFieldY(g)};
        for (size_t i = 0; i < cy[0].v.size(); ++i) {
            const Vec3 av{ga[0].gy.v[i], ga[1].gy.v[i], ga[2].gy.v[i]};
            const Vec3 bv{gb[0].gy.v[i], gb[1].gy.v[i], gb[2].gy.v[i]};
            const Vec3 cv = cross(av, bv);
            cy[0].v[i] = cv.x;
            cy[1].v[i] = cv.y;
            cy[2].v[i] = cv.z;
        }
        for (int k = 0; k < 3; ++k) {
            ScalarField n = node_avg_y(cy[k], g);
            for (size_t i = 0; i < n.v.size(); ++i) out.c[k].v[i] += 2.0 * n.v[i];
        }
    }
    return out;
}

// grad a . grad b evaluated on faces (both direction contributions at each
// face; the off-direction part is transferred through conservative node
// averaging).  Symmetric bilinear, and the exact polarization of the face
// coefficient used for the tracking forcing.
struct FaceDot {
    FaceFieldX qx;
    FaceFieldY qy;
};

FaceDot face_grad_dot(const Field3& a, const Field3& b, const Grid& g) {
    FaceFieldX px(g);
    FaceFieldY py(g);
    for (int k = 0; k < 3; ++k) {
        Gradient2 ga = gradient(a.c[k], g);
        Gradient2 gb = gradient(b.c[k], g);
        for (size_t i = 0; i < px.v.size(); ++i) px.v[i] += ga.gx.v[i] * gb.gx.v[i];
        for (size_t i = 0; i < py.v.size(); ++i) py.v[i] += ga.gy.v[i] * gb.gy.v[i];
    }
    FaceDot out{px, py};
    const FaceFieldX cross_x = face_avg_x(node_avg_y(py, g), g);
    const FaceFieldY cross_y = face_avg_y(node_avg_x(px, g), g);
    for (size_t i = 0; i < out.qx.v.size(); ++i) out.qx.v[i] += cross_x.v[i];
    for (size_t i = 0; i < out.qy.v.size(); ++i) out.qy.v[i] += cross_y.v[i];
    return out;
}

// div( q * grad w ) with a face-valued coefficient q.
Field3 div_face_coeff_grad(const FaceDot& q, const Field3& w, const Grid& g) {
    Field3 out(g);
    for (int k = 0; k < 3; ++k) {
        Gradient2 gw = gradient(w.c[k], g);
        for (size_t i = 0; i < gw.gx.v.size(); ++i) gw.gx.v[i] *= q.qx.v[i];
        for (size_t i = 0; i < gw.gy.v.size(); ++i) gw.gy.v[i] *= q.qy.v[i];
        out.c[k] = divergence(gw.gx, gw.gy, g);
    }
    return out;
}

// Explicit part of the tangent right-hand side (everything except the bare
// lap z, which the march treats implicitly).
Field3 tangent_explicit(const Field3& m, const Field3& u, const Field3& z, const Grid& g) {
    const ScalarField gdot = node_grad_dot(m, z, g);
    const ScalarField gsq = node_grad_sq(m, g);
    const Field3 lap_m = laplacian(m, g);
    const Field3 lap_z = laplacian(z, g);
    const Field3 mu = cross(m, u);

    Field3 out = cross(z, lap_m);
    axpy(out, 1.0, cross(m, lap_z));
    axpy(out, 1.0, cross(z, u));
    axpy(out, -1.0, cross(z, mu));
    axpy(out, -1.0, cross(m, cross(z, u)));
    for (int k = 0; k < 3; ++k)
        for (size_t i = 0; i < out.c[k].v.size(); ++i)
            out.c[k].v[i] += 2.0 * gdot.v[i] * m.c[k].v[i] + gsq.v[i] * z.c[k].v[i];
    return out;
}

// Explicit part of the backward costate operator in reversed time
// (coefficients frozen at the base snapshot):
//   |grad m|^2 p - 2 div((m.p) grad m) + lap p x m + 2 sum_i d_i p x d_i m
//       - p x u + (p x m) x u + p x (m x u).
// The p x lap m + lap m x p pair from expanding lap(p x m) cancels exactly
// and is omitted.
Field3 costate_explicit(const Field3& m, const Field3& u, const Field3& p, const Grid& g) {
    const ScalarField gsq = node_grad_sq(m, g);
    const Field3 lap_p = laplacian(p, g);
    const Field3 pm = cross(p, m);

    Field3 out = cross(lap_p, m);
    axpy(out, 1.0, twice_grad_cross(p, m, g));
    axpy(out, -2.0, div_scalar_flux(dot(m, p), m, g));
    axpy(out, -1.0, cross(p, u));
    axpy(out, 1.0, cross(pm, u));
    axpy(out, 1.0, cross(p, cross(m, u)));
    for (int k = 0; k < 3; ++k)
        for (size_t i = 0; i < out.c[k].v.size(); ++i)
            out.c[k].v[i] += gsq.v[i] * p.c[k].v[i];
    return out;
}

using ForcingFn = std::function<Field3(int)>;  // snapshot index -> forcing field

// Shared backward IMEX march for the costate operator with terminal data and
// right-hand side g (the equation reads p_t + lap p + coupling = g).
Trajectory backward_costate_march(const Trajectory& base_m, const Trajectory& base_u,
                                  const Field3& terminal, const ForcingFn& forcing,
                                  const char* name, bool quiet) {
    const Grid& g = base_m.grid;
    warn_cfl(g, name, quiet);
    Trajectory phi(g);
    phi.snaps[g.nt] = terminal;
    for (int n = g.nt - 1; n >= 0; --n) {
        const Field3& prev = phi.snaps[n + 1];
        Field3 b = prev;
        axpy(b, g.dt, costate_explicit(base_m.snaps[n + 1], base_u.snaps[n + 1], prev, g));
        axpy(b, -g.dt, forcing(n + 1));
        phi.snaps[n] = helmholtz_solve(b, g.dt, g);
        if (any_component_exceeds(phi.snaps[n], 1e3))
            throw SolverFailure(std::string(name) + ": costate exceeded 1e3 at time step " +
                                    std::to_string(n),
                                n);
    }
    return phi;
}

}  // namespace

void TargetData::validate(const Grid& g) const {
    m_d.validate();
    if (!m_d.grid.same_space(g) || m_d.n_snaps() != g.nt + 1)
        throw std::invalid_argument("TargetData: m_d must match the state grid");
    require_match(m_omega, g, "TargetData");
    for (const Field3& f : m_d.snaps)
        for (int k = 0; k < 3; ++k)
            for (double v : f.c[k].v)
                if (!std::isfinite(v)) throw std::invalid_argument("TargetData: non-finite m_d");
}

Field3 linearized_rhs_terms(const Field3& m, const Field3& u, const Field3& z, const Grid& g) {
    Field3 out = tangent_explicit(m, u, z, g);
    axpy(out, 1.0, laplacian(z, g));
    return out;
}

Trajectory deriv_rhs(const Trajectory& base_m, const Trajectory& h) {
    require_bases(base_m, h, "deriv_rhs");
    Trajectory f(base_m.grid);
    for (int n = 0; n < base_m.n_snaps(); ++n) {
        const Field3& m = base_m.snaps[n];
        const Field3 mh = cross(m, h.snaps[n]);
        f.snaps[n] = sub(mh, cross(m, mh));
    }
    return f;
}

Trajectory solve_linearized(const Trajectory& base_m, const Trajectory& base_u,
                            const Trajectory& forcing, const Field3& z0, bool quiet) {
    require_bases(base_m, base_u, "solve_linearized");
    forcing.validate();
    const Grid& g = base_m.grid;
    if (!forcing.grid.same_space(g) || forcing.n_snaps() != g.nt + 1)
        throw std::invalid_argument("solve_linearized: forcing trajectory mismatch");
    require_match(z0, g, "solve_linearized");
    for (const Field3& snap : base_m.snaps)
        if (max_unit_violation(snap) > 1e-12)
            throw std::invalid_argument("solve_linearized: base state is not nodewise unit");
    warn_cfl(g, "solve_linearized", quiet);

    Trajectory z(g);
    z.snaps[0] = z0;
    for (int n = 0; n < g.nt; ++n) {
        const Field3& m = base_m.snaps[n];
        const Field3& u = base_u.snaps[n];

        Field3 b = z.snaps[n];
        axpy(b, g.dt, tangent_explicit(m, u, z.snaps[n], g));
        axpy(b, g.dt, forcing.snaps[n]);
        const Field3 zstar = helmholtz_solve(b, g.dt, g);

        // Derivative of the projection step, using the recomputed
        // pre-normalization state of the forward march.
        Field3 bm = m;
        axpy(bm, g.dt, effective_rhs(m, u, g));
        const Field3 mstar = helmholtz_solve(bm, g.dt, g);

        Field3& zn = z.snaps[n + 1];
        zn = zstar;
        const size_t nn = zn.n_nodes();
        for (size_t i = 0; i < nn; ++i) {
            const Vec3 w{mstar.c[0].v[i], mstar.c[1].v[i], mstar.c[2].v[i]};
            const double len = norm(w);
            const Vec3 mhat = (1.0 / len) * w;
            const Vec3 zv{zstar.c[0].v[i], zstar.c[1].v[i], zstar.c[2].v[i]};
            const Vec3 proj = (1.0 / len) * (zv - dot(mhat, zv) * mhat);
            zn.c[0].v[i] = proj.x;
            zn.c[1].v[i] = proj.y;
            zn.c[2].v[i] = proj.z;
        }
        if (any_component_exceeds(zn, 1e3))
            throw SolverFailure("solve_linearized: tangent exceeded 1e3 at time step " +
                                    std::to_string(n + 1),
                                n + 1);
    }
    return z;
}

Field3 adjoint_forcing_field(const Field3& e, const Grid& g) {
    return div_face_coeff_grad(face_grad_dot(e, e, g), e, g);
}

Trajectory adjoint_forcing(const Trajectory& base_m, const Trajectory& m_d) {
    require_bases(base_m, m_d, "adjoint_forcing");
    Trajectory out(base_m.grid);
    for (int n = 0; n < base_m.n_snaps(); ++n)
        out.snaps[n] = adjoint_forcing_field(sub(base_m.snaps[n], m_d.snaps[n]), base_m.grid);
    return out;
}

void adjoint_forcing_flux(const Field3& e, const Grid& g, Gradient2 flux[3]) {
    const FaceDot q = face_grad_dot(e, e, g);
    for (int k = 0; k < 3; ++k) {
        Gradient2 ge = gradient(e.c[k], g);
        for (size_t i = 0; i < ge.gx.v.size(); ++i) ge.gx.v[i] *= q.qx.v[i];
        for (size_t i = 0; i < ge.gy.v.size(); ++i) ge.gy.v[i] *= q.qy.v[i];
        flux[k] = ge;
    }
}

Trajectory solve_adjoint(const Trajectory& base_m, const Trajectory& base_u,
                         const TargetData& targets, bool quiet) {
    require_bases(base_m, base_u, "solve_adjoint");
    const Grid& g = base_m.grid;
    targets.validate(g);
    // Costate solvability asks more of the target than the cost does: the
    // gradient of m_d must have a finite L6(0,T;L6) norm.
    if (!std::isfinite(trajectory_grad_norm(targets.m_d, 6)))
        throw std::invalid_argument("solve_adjoint: grad m_d has no finite L6(0,T;L6) norm");
    const Field3 terminal = sub(base_m.snaps[g.nt], targets.m_omega);
    auto forcing = [&](int n) {
        return adjoint_forcing_field(sub(base_m.snaps[n], targets.m_d.snaps[n]), g);
    };
    return backward_costate_march(base_m, base_u, terminal, forcing, "solve_adjoint", quiet);
}

Trajectory solve_costate_derivative(const Trajectory& base_m, const Trajectory& base_u,
                                    const TargetData& targets, const Trajectory& phi,
                                    const Trajectory& z, const Trajectory& h, bool quiet) {
    require_bases(base_m, base_u, "solve_costate_derivative");
    const Grid& g = base_m.grid;
    targets.validate(g);
    phi.validate();
    z.validate();
    h.validate();
    if (phi.n_snaps() != base_m.n_snaps() || z.n_snaps() != base_m.n_snaps() ||
        h.n_snaps() != base_m.n_snaps())
        throw std::invalid_argument("solve_costate_derivative: trajectory length mismatch");

    // Derivative of the costate equation in direction h.  Each term is the
    // exact linearization of the corresponding discretized term of the
    // costate march, so the result is the derivative of the discrete
    // control-to-costate map (given the exact tangent z).
    auto forcing = [&](int n) {
        const Field3& m = base_m.snaps[n];
        const Field3& u = base_u.snaps[n];
        const Field3& p = phi.snaps[n];
        const Field3& zn = z.snaps[n];
        const Field3& hn = h.snaps[n];
        const Field3 e = sub(m, targets.m_d.snaps[n]);

        const ScalarField gdot = node_grad_dot(m, zn, g);
        Field3 F(g);
        for (int k = 0; k < 3; ++k)
            for (size_t i = 0; i < F.c[k].v.size(); ++i)
                F.c[k].v[i] = -2.0 * gdot.v[i] * p.c[k].v[i];
        axpy(F, 2.0, div_scalar_flux(dot(zn, p), m, g));
        axpy(F, 2.0, div_scalar_flux(dot(m, p), zn, g));
        // -lap(p x z) - lap z x p, expanded like the operator's lap(p x m)
        // term; the p x lap z + lap z x p pair cancels.
        axpy(F, -1.0, cross(laplacian(p, g), zn));
        axpy(F, -1.0, twice_grad_cross(p, zn, g));
        axpy(F, 1.0, cross(p, hn));
        axpy(F, -1.0, cross(cross(p, zn), u));
        axpy(F, -1.0, cross(cross(p, m), hn));
        axpy(F, -1.0, cross(p, cross(zn, u)));
        axpy(F, -1.0, cross(p, cross(m, hn)));
        // Linearization of the tracking forcing div(|grad e|^2 grad e).
        FaceDot s = face_grad_dot(e, zn, g);
        for (double& v : s.qx.v) v *= 2.0;
        for (double& v : s.qy.v) v *= 2.0;
        axpy(F, 1.0, div_face_coeff_grad(s, e, g));
        axpy(F, 1.0, div_face_coeff_grad(face_grad_dot(e, e, g), zn, g));
        return F;
    };
    return backward_costate_march(base_m, base_u, z.snaps[g.nt], forcing,
                                  "solve_costate_derivative", quiet);
}

DualityCheck duality_check(const Trajectory& base_m, const Trajectory& base_u,
                           const TargetData& targets, const Trajectory& z,
                           const Trajectory& forcing, const Trajectory& phi) {
    require_bases(base_m, base_u, "duality_check");
    const Grid& g = base_m.grid;
    targets.validate(g);

    double lhs = 0.0;
    for (int n = 0; n <= g.nt; ++n) {
        const Field3& m = base_m.snaps[n];
        const Field3& u = base_u.snaps[n];

        // z_t through the tangent operator, phi_t through the costate
        // operator (phi_t = g_src - lap phi - coupling).
        Field3 zt = linearized_rhs_terms(m, u, z.snaps[n], g);
        axpy(zt, 1.0, forcing.snaps[n]);

        Field3 pt = adjoint_forcing_field(sub(m, targets.m_d.snaps[n]), g);
        axpy(pt, -1.0, laplacian(phi.snaps[n], g));
        axpy(pt, -1.0, costate_explicit(m, u, phi.snaps[n], g));

        double snap = 0.0;
        for (int k = 0; k < 3; ++k) {
            snap += inner(zt.c[k], phi.snaps[n].c[k], g);
            snap += inner(pt.c[k], z.snaps[n].c[k], g);
        }
        lhs += ((n == 0 || n == g.nt) ? 0.5 * g.dt : g.dt) * snap;
    }

    double rhs = 0.0;
    for (int k = 0; k < 3; ++k) {
        rhs += inner(z.snaps[g.nt].c[k], phi.snaps[g.nt].c[k], g);
        rhs -= inner(z.snaps[0].c[k], phi.snaps[0].c[k], g);
    }

    DualityCheck out;
    out.lhs = lhs;
    out.rhs = rhs;
    out.rel_residual = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-14});
    return out;
}

}  // namespace llg
