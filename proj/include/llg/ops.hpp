#pragma once

#include <string>

#include "llg/grid.hpp"
#include "llg/scalar_field.hpp"

namespace llg {

// Discrete calculus on the node-centered grid.  gradient/divergence are exact
// negative transposes of each other with respect to the trapezoidal inner
// products below, so laplacian = divergence(gradient(.)) satisfies
// <lap f, w> = -<grad f, grad w> to machine precision.

Gradient2 gradient(const ScalarField& f, const Grid& g);
ScalarField divergence(const FaceFieldX& vx, const FaceFieldY& vy, const Grid& g);
ScalarField laplacian(const ScalarField& f, const Grid& g);

// Solves (I - tau * lap) x = b by cosine-transform diagonalization.
ScalarField helmholtz_solve(const ScalarField& b, double tau, const Grid& g);

// Trapezoidal quadrature weight of node (ix, iy).
double node_weight(const Grid& g, int ix, int iy);

// Weighted inner products (compensated summation).
double inner(const ScalarField& a, const ScalarField& b, const Grid& g);
double inner_faces(const Gradient2& a, const Gradient2& b, const Grid& g);
double integral(const ScalarField& f, const Grid& g);

// Conservative transfer between faces and nodes: node_avg_* distributes each
// face value to its two adjacent nodes with half weight, which keeps
// sum_nodes w*q == sum_faces w*value exactly.  face_avg_* is the arithmetic
// two-point average used for scalar coefficients in divergence-form fluxes.
ScalarField node_avg_x(const FaceFieldX& fx, const Grid& g);
ScalarField node_avg_y(const FaceFieldY& fy, const Grid& g);
FaceFieldX face_avg_x(const ScalarField& s, const Grid& g);
FaceFieldY face_avg_y(const ScalarField& s, const Grid& g);

enum class NormKind {
    L2,
    H1,
    L4,
    L6,
    Linf,
    L2L2,
    L2H1,
    L4L4,
    L6L6,
    LinfH2Proxy,
};

NormKind parse_norm_kind(const std::string& name);
bool norm_kind_is_spatial(NormKind kind);

double scalar_norm(const ScalarField& f, const Grid& g, NormKind kind);

}  // namespace llg
