#pragma once

#include <random>

#include "llg/trajectory.hpp"

namespace llg {

// Built-in analytic data generators.  All spatial profiles use cosine modes,
// which are compatible with the zero-flux boundary convention.

// Unit field tilted away from e3 by theta(x,y) = amp*cos(pi x/Lx)*cos(pi y/Ly),
// with azimuth psi(x,y) = amp*cos(pi y/Ly).
Field3 preset_cosine_tilt(const Grid& g, double amp);

// Vector field amp_c * cos(pi x/Lx) * cos(pi y/Ly) per component.
Field3 preset_mode(const Grid& g, Vec3 amp);

// Deterministic uniform double in [-1, 1) from raw generator bits
// (independent of the standard library's distribution implementation).
double uniform_pm1(std::mt19937_64& rng);

// Smooth random fields: a few low-order cosine modes with seeded
// coefficients; trajectories get an additional smooth time modulation.
ScalarField random_smooth_scalar(const Grid& g, std::mt19937_64& rng, double amplitude);
Field3 random_smooth_field(const Grid& g, std::mt19937_64& rng, double amplitude);
Trajectory random_smooth_trajectory(const Grid& g, std::mt19937_64& rng, double amplitude);

}  // namespace llg
