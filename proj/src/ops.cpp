#include "llg/ops.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace llg {

namespace {

inline double cx_weight(const Grid& g, int ix) { return (ix == 0 || ix == g.nx - 1) ? 0.5 : 1.0; }
inline double cy_weight(const Grid& g, int iy) { return (iy == 0 || iy == g.ny - 1) ? 0.5 : 1.0; }

// Kahan-compensated accumulator; keeps inner products reproducible and tight
// enough for the 1e-12-level adjointness checks on 64x64 grids.
struct Accum {
    double sum = 0.0;
    double c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

}  // namespace

Gradient2 gradient(const ScalarField& f, const Grid& g) {
    require_match(f, g, "gradient");
    Gradient2 out{FaceFieldX(g), FaceFieldY(g)};
    const double ihx = 1.0 / g.hx;
    const double ihy = 1.0 / g.hy;
    for (int iy = 0; iy < g.ny; ++iy)
        for (int fx = 0; fx < g.nx - 1; ++fx)
            out.gx.at(fx, iy) = (f.at(fx + 1, iy) - f.at(fx, iy)) * ihx;
    for (int fy = 0; fy < g.ny - 1; ++fy)
        for (int ix = 0; ix < g.nx; ++ix)
            out.gy.at(ix, fy) = (f.at(ix, fy + 1) - f.at(ix, fy)) * ihy;
    return out;
}

ScalarField divergence(const FaceFieldX& vx, const FaceFieldY& vy, const Grid& g) {
    if (!vx.matches(g) || !vy.matches(g))
        throw std::invalid_argument("divergence: face field dimensions do not match grid");
    ScalarField out(g);
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            const double right = (ix < g.nx - 1) ? vx.at(ix, iy) : 0.0;
            const double left = (ix > 0) ? vx.at(ix - 1, iy) : 0.0;
            const double top = (iy < g.ny - 1) ? vy.at(ix, iy) : 0.0;
            const double bottom = (iy > 0) ? vy.at(ix, iy - 1) : 0.0;
            // Boundary nodes own half-width control volumes.
            out.at(ix, iy) = (right - left) / (g.hx * cx_weight(g, ix)) +
                             (top - bottom) / (g.hy * cy_weight(g, iy));
        }
    }
    return out;
}

ScalarField laplacian(const ScalarField& f, const Grid& g) {
    Gradient2 gr = gradient(f, g);
    return divergence(gr.gx, gr.gy, g);
}

namespace {

// Plan cache for the 2D DCT-I used by helmholtz_solve.  REDFT00 modes
// cos(pi k i/(n-1)) are exact eigenvectors of the mirrored Neumann stencil,
// so the solve is direct.  Plans are created with FFTW_UNALIGNED so that any
// caller-owned buffer can be used; creation is serialized, execution is not.
struct DctPlan {
    fftw_plan plan = nullptr;
};

std::mutex g_plan_mutex;
std::map<std::pair<int, int>, DctPlan> g_plans;

fftw_plan dct2d_plan(int nx, int ny) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto key = std::make_pair(nx, ny);
    auto it = g_plans.find(key);
    if (it != g_plans.end()) return it->second.plan;
    std::vector<double> probe(static_cast<size_t>(nx) * ny, 0.0);
    fftw_plan p = fftw_plan_r2r_2d(ny, nx, probe.data(), probe.data(), FFTW_REDFT00,
                                   FFTW_REDFT00, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw std::runtime_error("helmholtz_solve: FFTW plan creation failed");
    g_plans[key] = DctPlan{p};
    return p;
}

}  // namespace

ScalarField helmholtz_solve(const ScalarField& b, double tau, const Grid& g) {
    require_match(b, g, "helmholtz_solve");
    if (!(tau > 0.0)) throw std::invalid_argument("helmholtz_solve: tau must be positive");

    fftw_plan plan = dct2d_plan(g.nx, g.ny);
    ScalarField x = b;
    fftw_execute_r2r(plan, x.v.data(), x.v.data());

    const double norm = 1.0 / (4.0 * (g.nx - 1) * (g.ny - 1));
    for (int ky = 0; ky < g.ny; ++ky) {
        const double sy = std::sin(0.5 * M_PI * ky / (g.ny - 1));
        const double ly = 4.0 / (g.hy * g.hy) * sy * sy;
        for (int kx = 0; kx < g.nx; ++kx) {
            const double sx = std::sin(0.5 * M_PI * kx / (g.nx - 1));
            const double lx = 4.0 / (g.hx * g.hx) * sx * sx;
            x.at(kx, ky) *= norm / (1.0 + tau * (lx + ly));
        }
    }
    fftw_execute_r2r(plan, x.v.data(), x.v.data());
    return x;
}

double node_weight(const Grid& g, int ix, int iy) {
    return g.hx * g.hy * cx_weight(g, ix) * cy_weight(g, iy);
}

double inner(const ScalarField& a, const ScalarField& b, const Grid& g) {
    require_match(a, g, "inner");
    require_match(b, g, "inner");
    Accum acc;
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix)
            acc.add(node_weight(g, ix, iy) * a.at(ix, iy) * b.at(ix, iy));
    return acc.sum;
}

double inner_faces(const Gradient2& a, const Gradient2& b, const Grid& g) {
    if (!a.gx.matches(g) || !b.gx.matches(g))
        throw std::invalid_argument("inner_faces: dimensions do not match grid");
    Accum acc;
    for (int iy = 0; iy < g.ny; ++iy) {
        const double wy = g.hx * g.hy * cy_weight(g, iy);
        for (int fx = 0; fx < g.nx - 1; ++fx)
            acc.add(wy * a.gx.at(fx, iy) * b.gx.at(fx, iy));
    }
    for (int fy = 0; fy < g.ny - 1; ++fy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            const double wx = g.hx * g.hy * cx_weight(g, ix);
            acc.add(wx * a.gy.at(ix, fy) * b.gy.at(ix, fy));
        }
    }
    return acc.sum;
}

double integral(const ScalarField& f, const Grid& g) {
    require_match(f, g, "integral");
    Accum acc;
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix)
            acc.add(node_weight(g, ix, iy) * f.at(ix, iy));
    return acc.sum;
}

ScalarField node_avg_x(const FaceFieldX& fx, const Grid& g) {
    if (!fx.matches(g)) throw std::invalid_argument("node_avg_x: dimension mismatch");
    ScalarField out(g);
    for (int iy = 0; iy < g.ny; ++iy) {
        out.at(0, iy) = fx.at(0, iy);
        for (int ix = 1; ix < g.nx - 1; ++ix)
            out.at(ix, iy) = 0.5 * (fx.at(ix - 1, iy) + fx.at(ix, iy));
        out.at(g.nx - 1, iy) = fx.at(g.nx - 2, iy);
    }
    return out;
}

ScalarField node_avg_y(const FaceFieldY& fy, const Grid& g) {
    if (!fy.matches(g)) throw std::invalid_argument("node_avg_y: dimension mismatch");
    ScalarField out(g);
    for (int ix = 0; ix < g.nx; ++ix) {
        out.at(ix, 0) = fy.at(ix, 0);
        for (int iy = 1; iy < g.ny - 1; ++iy)
            out.at(ix, iy) = 0.5 * (fy.at(ix, iy - 1) + fy.at(ix, iy));
        out.at(ix, g.ny - 1) = fy.at(ix, g.ny - 2);
    }
    return out;
}

FaceFieldX face_avg_x(const ScalarField& s, const Grid& g) {
    require_match(s, g, "face_avg_x");
    FaceFieldX out(g);
    for (int iy = 0; iy < g.ny; ++iy)
        for (int fx = 0; fx < g.nx - 1; ++fx)
            out.at(fx, iy) = 0.5 * (s.at(fx, iy) + s.at(fx + 1, iy));
    return out;
}

FaceFieldY face_avg_y(const ScalarField& s, const Grid& g) {
    require_match(s, g, "face_avg_y");
    FaceFieldY out(g);
    for (int fy = 0; fy < g.ny - 1; ++fy)
        for (int ix = 0; ix < g.nx; ++ix)
            out.at(ix, fy) = 0.5 * (s.at(ix, fy) + s.at(ix, fy + 1));
    return out;
}

NormKind parse_norm_kind(const std::string& name) {
    if (name == "L2") return NormKind::L2;
    if (name == "H1") return NormKind::H1;
    if (name == "L4") return NormKind::L4;
    if (name == "L6") return NormKind::L6;
    if (name == "Linf") return NormKind::Linf;
    if (name == "L2L2") return NormKind::L2L2;
    if (name == "L2H1") return NormKind::L2H1;
    if (name == "L4L4") return NormKind::L4L4;
    if (name == "L6L6") return NormKind::L6L6;
    if (name == "LinfH2Proxy") return NormKind::LinfH2Proxy;
    throw std::invalid_argument("unknown norm kind: " + name);
}

bool norm_kind_is_spatial(NormKind kind) {
    switch (kind) {
        case NormKind::L2:
        case NormKind::H1:
        case NormKind::L4:
        case NormKind::L6:
        case NormKind::Linf:
            return true;
        default:
            return false;
    }
}

double scalar_norm(const ScalarField& f, const Grid& g, NormKind kind) {
    require_match(f, g, "scalar_norm");
    switch (kind) {
        case NormKind::L2:
            return std::sqrt(std::max(0.0, inner(f, f, g)));
        case NormKind::H1: {
            Gradient2 gr = gradient(f, g);
            return std::sqrt(std::max(0.0, inner(f, f, g) + inner_faces(gr, gr, g)));
        }
        case NormKind::L4:
        case NormKind::L6: {
            const double p = (kind == NormKind::L4) ? 4.0 : 6.0;
            Accum acc;
            for (int iy = 0; iy < g.ny; ++iy)
                for (int ix = 0; ix < g.nx; ++ix)
                    acc.add(node_weight(g, ix, iy) * std::pow(std::abs(f.at(ix, iy)), p));
            return std::pow(acc.sum, 1.0 / p);
        }
        case NormKind::Linf: {
            double m = 0.0;
            for (double v : f.v) m = std::max(m, std::abs(v));
            return m;
        }
        default:
            throw std::invalid_argument("scalar_norm: space-time norm kind applied to a single field");
    }
}

}  // namespace llg
