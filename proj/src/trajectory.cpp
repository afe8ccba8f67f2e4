#include "llg/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace llg {

void Trajectory::validate() const {
    grid.validate();
    if (static_cast<int>(snaps.size()) != grid.nt + 1)
        throw std::invalid_argument("Trajectory: snapshot count must equal nt+1");
    for (const Field3& f : snaps)
        if (!f.matches(grid))
            throw std::invalid_argument("Trajectory: snapshot grid mismatch");
}

Trajectory constant_trajectory(const Grid& g, const Field3& f) {
    require_match(f, g, "constant_trajectory");
    Trajectory t(g);
    for (Field3& s : t.snaps) s = f;
    return t;
}

Trajectory zero_trajectory(const Grid& g) { return Trajectory(g); }

namespace {

void require_compatible(const Trajectory& a, const Trajectory& b, const char* where) {
    if (!a.grid.same_space(b.grid) || a.n_snaps() != b.n_snaps())
        throw std::invalid_argument(std::string(where) + ": trajectory grids do not match");
}

inline double time_weight(const Grid& g, int n) {
    return (n == 0 || n == g.nt) ? 0.5 * g.dt : g.dt;
}

}  // namespace

Trajectory t_add(const Trajectory& a, const Trajectory& b) {
    require_compatible(a, b, "t_add");
    Trajectory out = a;
    for (int n = 0; n < out.n_snaps(); ++n) out.snaps[n] = add(a.snaps[n], b.snaps[n]);
    return out;
}

Trajectory t_sub(const Trajectory& a, const Trajectory& b) {
    require_compatible(a, b, "t_sub");
    Trajectory out = a;
    for (int n = 0; n < out.n_snaps(); ++n) out.snaps[n] = sub(a.snaps[n], b.snaps[n]);
    return out;
}

Trajectory t_scaled(const Trajectory& a, double s) {
    Trajectory out = a;
    for (Field3& f : out.snaps) f = scaled(f, s);
    return out;
}

void t_axpy(Trajectory& y, double alpha, const Trajectory& x) {
    require_compatible(y, x, "t_axpy");
    for (int n = 0; n < y.n_snaps(); ++n) axpy(y.snaps[n], alpha, x.snaps[n]);
}

double inner_spacetime(const Trajectory& a, const Trajectory& b) {
    require_compatible(a, b, "inner_spacetime");
    double s = 0.0;
    for (int n = 0; n < a.n_snaps(); ++n) {
        double snap = 0.0;
        for (int k = 0; k < 3; ++k) snap += inner(a.snaps[n].c[k], b.snaps[n].c[k], a.grid);
        s += time_weight(a.grid, n) * snap;
    }
    return s;
}

double norm_spacetime_l2(const Trajectory& a) {
    return std::sqrt(std::max(0.0, inner_spacetime(a, a)));
}

double trajectory_norm(const Trajectory& f, NormKind kind) {
    f.validate();
    const Grid& g = f.grid;
    switch (kind) {
        case NormKind::L2L2:
            return norm_spacetime_l2(f);
        case NormKind::L2H1: {
            double s = 0.0;
            for (int n = 0; n < f.n_snaps(); ++n) {
                const double hn = field_norm(f.snaps[n], g, NormKind::H1);
                s += time_weight(g, n) * hn * hn;
            }
            return std::sqrt(s);
        }
        case NormKind::L4L4:
        case NormKind::L6L6: {
            const double p = (kind == NormKind::L4L4) ? 4.0 : 6.0;
            double s = 0.0;
            for (int n = 0; n < f.n_snaps(); ++n) {
                const double np = field_norm(f.snaps[n], g, (p == 4.0) ? NormKind::L4 : NormKind::L6);
                s += time_weight(g, n) * std::pow(np, p);
            }
            return std::pow(s, 1.0 / p);
        }
        case NormKind::LinfH2Proxy: {
            double worst = 0.0;
            for (const Field3& snap : f.snaps) worst = std::max(worst, h2proxy_norm(snap, g));
            return worst;
        }
        default:
            throw std::invalid_argument("trajectory_norm: spatial norm kind applied to a trajectory");
    }
}

double trajectory_grad_norm(const Trajectory& f, int p) {
    if (p != 2 && p != 4 && p != 6)
        throw std::invalid_argument("trajectory_grad_norm: p must be 2, 4 or 6");
    const Grid& g = f.grid;
    double s = 0.0;
    for (int n = 0; n < f.n_snaps(); ++n) {
        ScalarField q = node_grad_sq(f.snaps[n], g);  // |grad f|^2 at nodes
        double snap = 0.0;
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix)
                snap += node_weight(g, ix, iy) * std::pow(q.at(ix, iy), p / 2.0);
        s += time_weight(g, n) * snap;
    }
    return std::pow(s, 1.0 / p);
}

// ---------------------------------------------------------------------------
// LLGF container
//
//   bytes 0-3   magic "LLGF"
//   u32 LE      version (1)
//   u32 LE      nx, ny, n_components (3), nt_plus_1
//   f64 LE      dt, hx, hy
//   payload     f64 LE, ordered [time][y][x][component]
// ---------------------------------------------------------------------------

namespace {

void put_u32(std::string& buf, uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& buf, double d) {
    uint64_t bits;
    std::memcpy(&bits, &d, 8);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

uint32_t get_u32(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

double get_f64(const unsigned char* p) {
    uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<uint64_t>(p[i]) << (8 * i);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

constexpr size_t kHeaderBytes = 4 + 4 * 5 + 8 * 3;

}  // namespace

void write_trajectory(const Trajectory& t, const std::string& path) {
    t.validate();
    const Grid& g = t.grid;
    std::string buf;
    buf.reserve(kHeaderBytes + 24ull * g.n_nodes() * t.n_snaps());
    buf.append("LLGF");
    put_u32(buf, 1u);
    put_u32(buf, static_cast<uint32_t>(g.nx));
    put_u32(buf, static_cast<uint32_t>(g.ny));
    put_u32(buf, 3u);
    put_u32(buf, static_cast<uint32_t>(t.n_snaps()));
    put_f64(buf, g.dt);
    put_f64(buf, g.hx);
    put_f64(buf, g.hy);
    for (const Field3& f : t.snaps)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix)
                for (int k = 0; k < 3; ++k) put_f64(buf, f.c[k].at(ix, iy));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::invalid_argument("write_trajectory: cannot open " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::invalid_argument("write_trajectory: write failed for " + path);
}

Trajectory read_trajectory(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("read_trajectory: cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const unsigned char* p = reinterpret_cast<const unsigned char*>(data.data());

    if (data.size() < kHeaderBytes || std::memcmp(p, "LLGF", 4) != 0)
        throw std::invalid_argument("read_trajectory: bad magic in " + path);
    const uint32_t version = get_u32(p + 4);
    if (version != 1u)
        throw std::invalid_argument("read_trajectory: unsupported version " + std::to_string(version));
    const uint32_t nx = get_u32(p + 8);
    const uint32_t ny = get_u32(p + 12);
    const uint32_t ncomp = get_u32(p + 16);
    const uint32_t nsnap = get_u32(p + 20);
    const double dt = get_f64(p + 24);
    const double hx = get_f64(p + 32);
    const double hy = get_f64(p + 40);
    if (ncomp != 3u) throw std::invalid_argument("read_trajectory: expected 3 components");
    if (nx < 3 || ny < 3 || nsnap < 2)
        throw std::invalid_argument("read_trajectory: invalid dimension header");

    const size_t expected = kHeaderBytes + 8ull * nx * ny * ncomp * nsnap;
    if (data.size() < expected)
        throw std::invalid_argument("read_trajectory: truncated payload in " + path);
    if (data.size() > expected)
        throw std::invalid_argument("read_trajectory: payload length inconsistent with header in " + path);

    Grid g(static_cast<int>(nx), static_cast<int>(ny), hx * (nx - 1), hy * (ny - 1), dt,
           static_cast<int>(nsnap) - 1);
    Trajectory t(g);
    const unsigned char* q = p + kHeaderBytes;
    for (uint32_t n = 0; n < nsnap; ++n)
        for (uint32_t iy = 0; iy < ny; ++iy)
            for (uint32_t ix = 0; ix < nx; ++ix)
                for (int k = 0; k < 3; ++k) {
                    t.snaps[n].c[k].at(static_cast<int>(ix), static_cast<int>(iy)) = get_f64(q);
                    q += 8;
                }
    return t;
}

void write_trajectory_csv(const Trajectory& t, const std::string& path) {
    t.validate();
    const Grid& g = t.grid;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::invalid_argument("write_trajectory_csv: cannot open " + path);
    out << "t,x,y,c1,c2,c3\n";
    char line[256];
    for (int n = 0; n < t.n_snaps(); ++n) {
        const double time = n * g.dt;
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix) {
                const Vec3 m = t.snaps[n].at(ix, iy);
                std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", time,
                              g.x(ix), g.y(iy), m.x, m.y, m.z);
                out << line;
            }
    }
}

}  // namespace llg
