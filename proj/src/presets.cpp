#include "llg/presets.hpp"

#include <cmath>

namespace llg {

Field3 preset_cosine_tilt(const Grid& g, double amp) {
    Field3 out(g);
    for (int iy = 0; iy < g.ny; ++iy) {
        const double cy = std::cos(M_PI * g.y(iy) / g.Ly);
        for (int ix = 0; ix < g.nx; ++ix) {
            const double theta = amp * std::cos(M_PI * g.x(ix) / g.Lx) * cy;
            const double psi = amp * cy;
            out.set(ix, iy,
                    {std::sin(theta) * std::cos(psi), std::sin(theta) * std::sin(psi),
                     std::cos(theta)});
        }
    }
    return out;
}

Field3 preset_mode(const Grid& g, Vec3 amp) {
    Field3 out(g);
    for (int iy = 0; iy < g.ny; ++iy) {
        const double cy = std::cos(M_PI * g.y(iy) / g.Ly);
        for (int ix = 0; ix < g.nx; ++ix) {
            const double s = std::cos(M_PI * g.x(ix) / g.Lx) * cy;
            out.set(ix, iy, {amp.x * s, amp.y * s, amp.z * s});
        }
    }
    return out;
}

double uniform_pm1(std::mt19937_64& rng) {
    return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
}

namespace {
constexpr int kModes = 3;  // cosine modes 0..2 per direction
}

ScalarField random_smooth_scalar(const Grid& g, std::mt19937_64& rng, double amplitude) {
    double coef[kModes][kModes];
    for (auto& row : coef)
        for (double& c : row) c = amplitude * uniform_pm1(rng);
    ScalarField out(g);
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            double s = 0.0;
            for (int kx = 0; kx < kModes; ++kx)
                for (int ky = 0; ky < kModes; ++ky)
                    s += coef[kx][ky] * std::cos(kx * M_PI * g.x(ix) / g.Lx) *
                         std::cos(ky * M_PI * g.y(iy) / g.Ly);
            out.at(ix, iy) = s;
        }
    return out;
}

Field3 random_smooth_field(const Grid& g, std::mt19937_64& rng, double amplitude) {
    Field3 out(g);
    for (int k = 0; k < 3; ++k) out.c[k] = random_smooth_scalar(g, rng, amplitude);
    return out;
}

Trajectory random_smooth_trajectory(const Grid& g, std::mt19937_64& rng, double amplitude) {
    const Field3 base = random_smooth_field(g, rng, amplitude);
    const double a0 = uniform_pm1(rng);
    const double a1 = uniform_pm1(rng);
    Trajectory out(g);
    for (int n = 0; n <= g.nt; ++n) {
        const double t = static_cast<double>(n) / g.nt;
        const double factor = 1.0 + 0.5 * a0 * std::cos(M_PI * t) + 0.25 * a1 * std::cos(2.0 * M_PI * t);
        out.snaps[n] = scaled(base, factor);
    }
    return out;
}

}  // namespace llg
