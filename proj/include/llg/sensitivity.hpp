#pragma once

#include <functional>

#include "llg/state.hpp"
#include "llg/trajectory.hpp"

namespace llg {

// Desired evolution and terminal target.
struct TargetData {
    Trajectory m_d;
    Field3 m_omega;

    void validate(const Grid& g) const;
};

// All non-time-derivative terms of the linearized state operator moved to the
// right-hand side (the bare lap z term included):
//   lap z + 2(grad m.grad z)m + |grad m|^2 z + z x lap m + m x lap z
//       + z x u - z x (m x u) - m x (z x u).
Field3 linearized_rhs_terms(const Field3& m, const Field3& u, const Field3& z, const Grid& g);

// Control-derivative forcing m x h - m x (m x h), per snapshot.
Trajectory deriv_rhs(const Trajectory& base_m, const Trajectory& h);

// Tangent-linear solve: marches the linearization of the forward scheme from
// z0 with forcing f.  This is the exact derivative of the discrete projected
// march (the unit-sphere projection is differentiated too), so finite
// differences of two forward solves against eps*z converge at O(eps^2).
Trajectory solve_linearized(const Trajectory& base_m, const Trajectory& base_u,
                            const Trajectory& forcing, const Field3& z0, bool quiet = true);

// Divergence-form tracking forcing div(|grad e|^2 grad e), e = m - m_d.
Field3 adjoint_forcing_field(const Field3& e, const Grid& g);
Trajectory adjoint_forcing(const Trajectory& base_m, const Trajectory& m_d);
// Face fluxes |grad e|^2 grad e of one component set, for pairing checks.
void adjoint_forcing_flux(const Field3& e, const Grid& g, Gradient2 flux[3]);

// Backward costate solve with terminal data m(T) - m_omega and the tracking
// forcing; lap phi is implicit, all coupling terms explicit with the
// lap(phi) x m part lagged one substep.
Trajectory solve_adjoint(const Trajectory& base_m, const Trajectory& base_u,
                         const TargetData& targets, bool quiet = true);

// Derivative of the costate map in direction h: backward solve with the same
// operator, terminal data z(T), and the forcing assembled from (z, phi, h).
Trajectory solve_costate_derivative(const Trajectory& base_m, const Trajectory& base_u,
                                    const TargetData& targets, const Trajectory& phi,
                                    const Trajectory& z, const Trajectory& h, bool quiet = true);

// Duality residual: compares trapz_t[ (z_t, phi) + (phi_t, z) ] evaluated
// through the semigroup operators against the boundary term (z(T), phi(T));
// returns |lhs - rhs| / max(|lhs|, |rhs|, floor).
struct DualityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double rel_residual = 0.0;
};
DualityCheck duality_check(const Trajectory& base_m, const Trajectory& base_u,
                           const TargetData& targets, const Trajectory& z,
                           const Trajectory& forcing, const Trajectory& phi);

}  // namespace llg
