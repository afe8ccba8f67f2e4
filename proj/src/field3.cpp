#include "llg/field3.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace llg {

void require_match(const Field3& f, const Grid& g, const char* where) {
    if (!f.matches(g))
        throw std::invalid_argument(std::string(where) + ": field dimensions do not match grid");
}

namespace {

void require_same_shape(const Field3& a, const Field3& b, const char* where) {
    if (a.c[0].nx != b.c[0].nx || a.c[0].ny != b.c[0].ny)
        throw std::invalid_argument(std::string(where) + ": grid mismatch between fields");
}

}  // namespace

Field3 cross(const Field3& a, const Field3& b) {
    require_same_shape(a, b, "cross");
    Field3 out;
    for (auto& comp : out.c) comp = ScalarField(a.c[0].nx, a.c[0].ny);
    const size_t n = a.n_nodes();
    for (size_t i = 0; i < n; ++i) {
        const double ax = a.c[0].v[i], ay = a.c[1].v[i], az = a.c[2].v[i];
        const double bx = b.c[0].v[i], by = b.c[1].v[i], bz = b.c[2].v[i];
        out.c[0].v[i] = ay * bz - az * by;
        out.c[1].v[i] = az * bx - ax * bz;
        out.c[2].v[i] = ax * by - ay * bx;
    }
    return out;
}

ScalarField dot(const Field3& a, const Field3& b) {
    require_same_shape(a, b, "dot");
    ScalarField out(a.c[0].nx, a.c[0].ny);
    const size_t n = a.n_nodes();
    for (size_t i = 0; i < n; ++i)
        out.v[i] = a.c[0].v[i] * b.c[0].v[i] + a.c[1].v[i] * b.c[1].v[i] + a.c[2].v[i] * b.c[2].v[i];
    return out;
}

Field3 add(const Field3& a, const Field3& b) {
    require_same_shape(a, b, "add");
    Field3 out = a;
    for (int k = 0; k < 3; ++k)
        for (size_t i = 0; i < out.c[k].v.size(); ++i) out.c[k].v[i] += b.c[k].v[i];
    return out;
}

Field3 sub(const Field3& a, const Field3& b) {
    require_same_shape(a, b, "sub");
    Field3 out = a;
    for (int k = 0; k < 3; ++k)
        for (size_t i = 0; i < out.c[k].v.size(); ++i) out.c[k].v[i] -= b.c[k].v[i];
    return out;
}

Field3 scaled(const Field3& a, double s) {
    Field3 out = a;
    for (int k = 0; k < 3; ++k)
        for (double& x : out.c[k].v) x *= s;
    return out;
}

void axpy(Field3& y, double alpha, const Field3& x) {
    require_same_shape(y, x, "axpy");
    for (int k = 0; k < 3; ++k)
        for (size_t i = 0; i < y.c[k].v.size(); ++i) y.c[k].v[i] += alpha * x.c[k].v[i];
}

Field3 uniform_field(const Grid& g, Vec3 v) {
    Field3 out(g);
    std::fill(out.c[0].v.begin(), out.c[0].v.end(), v.x);
    std::fill(out.c[1].v.begin(), out.c[1].v.end(), v.y);
    std::fill(out.c[2].v.begin(), out.c[2].v.end(), v.z);
    return out;
}

Field3 renormalize(const Field3& m) {
    Field3 out = m;
    const int nx = m.c[0].nx;
    const size_t n = m.n_nodes();
    for (size_t i = 0; i < n; ++i) {
        const double len = std::sqrt(m.c[0].v[i] * m.c[0].v[i] + m.c[1].v[i] * m.c[1].v[i] +
                                     m.c[2].v[i] * m.c[2].v[i]);
        if (!(len > 0.0)) {
            const int iy = static_cast<int>(i) / nx;
            const int ix = static_cast<int>(i) % nx;
            throw std::runtime_error("renormalize: zero-length vector at node (" +
                                     std::to_string(ix) + ", " + std::to_string(iy) + ")");
        }
        const double inv = 1.0 / len;
        out.c[0].v[i] *= inv;
        out.c[1].v[i] *= inv;
        out.c[2].v[i] *= inv;
    }
    return out;
}

double max_unit_violation(const Field3& m) {
    double worst = 0.0;
    const size_t n = m.n_nodes();
    for (size_t i = 0; i < n; ++i) {
        const double len = std::sqrt(m.c[0].v[i] * m.c[0].v[i] + m.c[1].v[i] * m.c[1].v[i] +
                                     m.c[2].v[i] * m.c[2].v[i]);
        worst = std::max(worst, std::abs(len - 1.0));
    }
    return worst;
}

Field3 skew_solve(const Field3& m, const Field3& r) {
    require_same_shape(m, r, "skew_solve");
    Field3 out = r;
    const size_t n = m.n_nodes();
    for (size_t i = 0; i < n; ++i) {
        const Vec3 mv{m.c[0].v[i], m.c[1].v[i], m.c[2].v[i]};
        const Vec3 rv{r.c[0].v[i], r.c[1].v[i], r.c[2].v[i]};
        const Vec3 num = rv + cross(mv, rv) + dot(mv, rv) * mv;
        const double inv = 1.0 / (1.0 + dot(mv, mv));
        out.c[0].v[i] = num.x * inv;
        out.c[1].v[i] = num.y * inv;
        out.c[2].v[i] = num.z * inv;
    }
    return out;
}

Field3 laplacian(const Field3& f, const Grid& g) {
    require_match(f, g, "laplacian");
    Field3 out;
    for (int k = 0; k < 3; ++k) out.c[k] = laplacian(f.c[k], g);
    return out;
}

Field3 helmholtz_solve(const Field3& b, double tau, const Grid& g) {
    require_match(b, g, "helmholtz_solve");
    Field3 out;
    for (int k = 0; k < 3; ++k) out.c[k] = helmholtz_solve(b.c[k], tau, g);
    return out;
}

ScalarField node_grad_sq(const Field3& f, const Grid& g) {
    return node_grad_dot(f, f, g);
}

ScalarField node_grad_dot(const Field3& a, const Field3& b, const Grid& g) {
    require_match(a, g, "node_grad_dot");
    require_match(b, g, "node_grad_dot");
    FaceFieldX px(g);
    FaceFieldY py(g);
    for (int k = 0; k < 3; ++k) {
        Gradient2 ga = gradient(a.c[k], g);
        Gradient2 gb = gradient(b.c[k], g);
        for (size_t i = 0; i < px.v.size(); ++i) px.v[i] += ga.gx.v[i] * gb.gx.v[i];
        for (size_t i = 0; i < py.v.size(); ++i) py.v[i] += ga.gy.v[i] * gb.gy.v[i];
    }
    ScalarField qx = node_avg_x(px, g);
    ScalarField qy = node_avg_y(py, g);
    for (size_t i = 0; i < qx.v.size(); ++i) qx.v[i] += qy.v[i];
    return qx;
}

double field_norm(const Field3& f, const Grid& g, NormKind kind) {
    require_match(f, g, "field_norm");
    switch (kind) {
        case NormKind::L2: {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) {
                const double nk = scalar_norm(f.c[k], g, NormKind::L2);
                s += nk * nk;
            }
            return std::sqrt(s);
        }
        case NormKind::H1: {
            const double l2 = field_norm(f, g, NormKind::L2);
            const double gr = integral(node_grad_sq(f, g), g);
            return std::sqrt(l2 * l2 + std::max(0.0, gr));
        }
        case NormKind::L4:
        case NormKind::L6: {
            const double p = (kind == NormKind::L4) ? 4.0 : 6.0;
            ScalarField mag2 = dot(f, f);
            double s = 0.0;
            for (int iy = 0; iy < g.ny; ++iy)
                for (int ix = 0; ix < g.nx; ++ix)
                    s += node_weight(g, ix, iy) * std::pow(mag2.at(ix, iy), p / 2.0);
            return std::pow(s, 1.0 / p);
        }
        case NormKind::Linf: {
            double worst = 0.0;
            const size_t n = f.n_nodes();
            for (size_t i = 0; i < n; ++i) {
                const double m2 = f.c[0].v[i] * f.c[0].v[i] + f.c[1].v[i] * f.c[1].v[i] +
                                  f.c[2].v[i] * f.c[2].v[i];
                worst = std::max(worst, m2);
            }
            return std::sqrt(worst);
        }
        default:
            throw std::invalid_argument("field_norm: space-time norm kind applied to a single field");
    }
}

double h2proxy_norm(const Field3& f, const Grid& g) {
    return field_norm(f, g, NormKind::L2) + field_norm(laplacian(f, g), g, NormKind::L2);
}

}  // namespace llg
