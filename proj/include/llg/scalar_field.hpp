#pragma once

#include <stdexcept>
#include <vector>

#include "llg/grid.hpp"

namespace llg {

// Nodal scalar data, row-major over (y, x).
struct ScalarField {
    int nx = 0;
    int ny = 0;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0)
        : nx(g.nx), ny(g.ny), v(static_cast<size_t>(g.nx) * g.ny, fill) {}
    ScalarField(int nx_, int ny_, double fill = 0.0)
        : nx(nx_), ny(ny_), v(static_cast<size_t>(nx_) * ny_, fill) {}

    double& at(int ix, int iy) { return v[static_cast<size_t>(iy) * nx + ix]; }
    double at(int ix, int iy) const { return v[static_cast<size_t>(iy) * nx + ix]; }
    size_t size() const { return v.size(); }

    bool matches(const Grid& g) const { return nx == g.nx && ny == g.ny; }
};

// Flux values on vertical faces between x-neighbors: (nx-1) * ny entries.
// Fluxes on the domain boundary itself are identically zero (zero-Neumann
// convention) and are not stored.
struct FaceFieldX {
    int nx = 0;  // node count in x of the parent grid
    int ny = 0;
    std::vector<double> v;

    FaceFieldX() = default;
    explicit FaceFieldX(const Grid& g, double fill = 0.0)
        : nx(g.nx), ny(g.ny), v(static_cast<size_t>(g.nx - 1) * g.ny, fill) {}

    double& at(int fx, int iy) { return v[static_cast<size_t>(iy) * (nx - 1) + fx]; }
    double at(int fx, int iy) const { return v[static_cast<size_t>(iy) * (nx - 1) + fx]; }

    bool matches(const Grid& g) const { return nx == g.nx && ny == g.ny; }
};

// Flux values on horizontal faces between y-neighbors: nx * (ny-1) entries.
struct FaceFieldY {
    int nx = 0;
    int ny = 0;
    std::vector<double> v;

    FaceFieldY() = default;
    explicit FaceFieldY(const Grid& g, double fill = 0.0)
        : nx(g.nx), ny(g.ny), v(static_cast<size_t>(g.nx) * (g.ny - 1), fill) {}

    double& at(int ix, int fy) { return v[static_cast<size_t>(fy) * nx + ix]; }
    double at(int ix, int fy) const { return v[static_cast<size_t>(fy) * nx + ix]; }

    bool matches(const Grid& g) const { return nx == g.nx && ny == g.ny; }
};

struct Gradient2 {
    FaceFieldX gx;
    FaceFieldY gy;
};

inline void require_match(const ScalarField& f, const Grid& g, const char* where) {
    if (!f.matches(g))
        throw std::invalid_argument(std::string(where) + ": field dimensions do not match grid");
}

}  // namespace llg
