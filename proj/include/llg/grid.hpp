#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace llg {

// Space-time discretization descriptor: node-centered rectangular grid on
// [0,Lx] x [0,Ly] including boundary nodes, plus a uniform time grid
// 0, dt, ..., T = nt*dt.  Scalar data attached to a grid is stored row-major
// over (y, x).
struct Grid {
    int nx = 0;
    int ny = 0;
    double Lx = 0.0;
    double Ly = 0.0;
    double hx = 0.0;
    double hy = 0.0;
    double dt = 0.0;
    int nt = 0;
    double T = 0.0;

    Grid() = default;

    Grid(int nx_, int ny_, double Lx_, double Ly_, double dt_, int nt_)
        : nx(nx_), ny(ny_), Lx(Lx_), Ly(Ly_), dt(dt_), nt(nt_) {
        if (nx < 3 || ny < 3)
            throw std::invalid_argument("Grid: need nx >= 3 and ny >= 3");
        if (nt < 1) throw std::invalid_argument("Grid: need nt >= 1");
        if (!(Lx > 0.0) || !(Ly > 0.0))
            throw std::invalid_argument("Grid: domain lengths must be positive");
        if (!(dt > 0.0)) throw std::invalid_argument("Grid: dt must be positive");
        hx = Lx / (nx - 1);
        hy = Ly / (ny - 1);
        T = nt * dt;
    }

    int n_nodes() const { return nx * ny; }
    int idx(int ix, int iy) const { return iy * nx + ix; }
    double x(int ix) const { return ix * hx; }
    double y(int iy) const { return iy * hy; }
    double min_h() const { return hx < hy ? hx : hy; }

    bool same_space(const Grid& o) const {
        return nx == o.nx && ny == o.ny &&
               std::abs(Lx - o.Lx) <= 1e-12 * (1.0 + std::abs(Lx)) &&
               std::abs(Ly - o.Ly) <= 1e-12 * (1.0 + std::abs(Ly));
    }

    bool same_time(const Grid& o) const {
        return nt == o.nt && std::abs(dt - o.dt) <= 1e-12 * (1.0 + std::abs(dt));
    }

    // Checks the internal consistency invariants (spacings vs lengths).
    void validate() const {
        if (nx < 3 || ny < 3 || nt < 1)
            throw std::invalid_argument("Grid: invalid node/step counts");
        if (!(hx > 0.0) || !(hy > 0.0) || !(dt > 0.0))
            throw std::invalid_argument("Grid: spacings must be positive");
        if (std::abs(hx * (nx - 1) - Lx) > 1e-12 * std::max(1.0, Lx) ||
            std::abs(hy * (ny - 1) - Ly) > 1e-12 * std::max(1.0, Ly) ||
            std::abs(dt * nt - T) > 1e-12 * std::max(1.0, T))
            throw std::invalid_argument("Grid: spacings inconsistent with extents");
    }
};

}  // namespace llg
