#pragma once

#include <array>
#include <cmath>

#include "llg/ops.hpp"
#include "llg/scalar_field.hpp"

namespace llg {

// Plain R^3 vector, used for per-node arithmetic and spatially uniform data.
struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

// An R^3-valued nodal field: three scalar components on a shared grid.
struct Field3 {
    std::array<ScalarField, 3> c;

    Field3() = default;
    explicit Field3(const Grid& g) : c{ScalarField(g), ScalarField(g), ScalarField(g)} {}

    Vec3 at(int ix, int iy) const { return {c[0].at(ix, iy), c[1].at(ix, iy), c[2].at(ix, iy)}; }
    void set(int ix, int iy, Vec3 v) {
        c[0].at(ix, iy) = v.x;
        c[1].at(ix, iy) = v.y;
        c[2].at(ix, iy) = v.z;
    }
    size_t n_nodes() const { return c[0].size(); }
    bool matches(const Grid& g) const {
        return c[0].matches(g) && c[1].matches(g) && c[2].matches(g);
    }
};

void require_match(const Field3& f, const Grid& g, const char* where);

// Nodewise maps.
Field3 cross(const Field3& a, const Field3& b);
ScalarField dot(const Field3& a, const Field3& b);
Field3 add(const Field3& a, const Field3& b);
Field3 sub(const Field3& a, const Field3& b);
Field3 scaled(const Field3& a, double s);
void axpy(Field3& y, double alpha, const Field3& x);  // y += alpha * x
Field3 uniform_field(const Grid& g, Vec3 v);

// Projects every node onto the unit sphere; throws (naming the node) if a
// node carries the zero vector.  Admission tolerance for "already unit" data
// is 1e-12 on | |m| - 1 |.
Field3 renormalize(const Field3& m);
double max_unit_violation(const Field3& m);  // max over nodes of | |m| - 1 |

// Closed-form nodewise solve of (I - m x) out = r:
//   out = (r + m x r + (m . r) m) / (1 + |m|^2).
Field3 skew_solve(const Field3& m, const Field3& r);

// Componentwise mesh operators.
Field3 laplacian(const Field3& f, const Grid& g);
Field3 helmholtz_solve(const Field3& b, double tau, const Grid& g);

// Nodal |grad f|^2 via conservative averaging of squared face gradients, and
// the polarized form grad a . grad b (summed over components and directions).
ScalarField node_grad_sq(const Field3& f, const Grid& g);
ScalarField node_grad_dot(const Field3& a, const Field3& b, const Grid& g);

double field_norm(const Field3& f, const Grid& g, NormKind kind);
double h2proxy_norm(const Field3& f, const Grid& g);  // ||f||_L2 + ||lap f||_L2

}  // namespace llg
