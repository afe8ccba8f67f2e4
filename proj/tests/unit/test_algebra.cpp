#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>

#include "doctest.h"
#include "llg/presets.hpp"
#include "llg/trajectory.hpp"

using namespace llg;

namespace {

Grid small_grid() { return Grid(4, 4, 1.0, 1.0, 0.125, 2); }

Field3 rough_random3(const Grid& g, std::mt19937_64& rng) {
    Field3 f(g);
    for (int k = 0; k < 3; ++k)
        for (double& v : f.c[k].v) v = uniform_pm1(rng);
    return f;
}

// Independent per-node 3x3 solve of (I - [m]x) x = r by Cramer's rule.
Vec3 skew_solve_oracle(Vec3 m, Vec3 r) {
    // rows of A = I - cross-product matrix of m
    const double A[3][3] = {{1.0, m.z, -m.y}, {-m.z, 1.0, m.x}, {m.y, -m.x, 1.0}};
    auto det3 = [](const double M[3][3]) {
        return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
               M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
               M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    };
    const double det = det3(A);
    double B[3][3];
    Vec3 out;
    double* o = &out.x;
    const double rhs[3] = {r.x, r.y, r.z};
    for (int col = 0; col < 3; ++col) {
        std::memcpy(B, A, sizeof(B));
        for (int row = 0; row < 3; ++row) B[row][col] = rhs[row];
        o[col] = det3(B) / det;
    }
    return out;
}

}  // namespace

TEST_CASE("cross product: basis vectors") {
    Grid g = small_grid();
    Field3 e1 = uniform_field(g, {1, 0, 0});
    Field3 e2 = uniform_field(g, {0, 1, 0});
    Field3 r = cross(e1, e2);
    for (size_t i = 0; i < r.n_nodes(); ++i) {
        CHECK(r.c[0].v[i] == 0.0);
        CHECK(r.c[1].v[i] == 0.0);
        CHECK(r.c[2].v[i] == 1.0);
    }
}

TEST_CASE("cross product identities on random fields") {
    Grid g = small_grid();
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        Field3 a = rough_random3(g, rng);
        Field3 b = rough_random3(g, rng);
        Field3 c = rough_random3(g, rng);

        // a . (a x b) = 0
        ScalarField s = dot(a, cross(a, b));
        for (double v : s.v) CHECK(std::abs(v) <= 1e-15 * 9.0);

        // a . (b x c) = -(b x a) . c
        ScalarField lhs = dot(a, cross(b, c));
        ScalarField rhs = dot(cross(b, a), c);
        for (size_t i = 0; i < lhs.v.size(); ++i)
            CHECK(std::abs(lhs.v[i] + rhs.v[i]) <= 1e-14 * 27.0);

        // a x (b x c) = (a.c) b - (a.b) c
        Field3 trip = cross(a, cross(b, c));
        ScalarField ac = dot(a, c);
        ScalarField ab = dot(a, b);
        for (int k = 0; k < 3; ++k)
            for (size_t i = 0; i < trip.c[k].v.size(); ++i) {
                const double expect = ac.v[i] * b.c[k].v[i] - ab.v[i] * c.c[k].v[i];
                CHECK(std::abs(trip.c[k].v[i] - expect) <= 1e-14 * 27.0);
            }
    }
}

TEST_CASE("renormalize basic cases") {
    Grid g = small_grid();
    Field3 f = uniform_field(g, {0, 0, 2});
    Field3 r = renormalize(f);
    CHECK(r.c[2].v[0] == doctest::Approx(1.0).epsilon(1e-15));

    // (1,1,1) -> each component 1/sqrt(3)
    Field3 ones = uniform_field(g, {1, 1, 1});
    Field3 rn = renormalize(ones);
    for (int k = 0; k < 3; ++k)
        CHECK(rn.c[k].v[0] == doctest::Approx(0.5773502691896258).epsilon(1e-15));

    // idempotence
    Field3 again = renormalize(rn);
    for (int k = 0; k < 3; ++k)
        for (size_t i = 0; i < again.c[k].v.size(); ++i)
            CHECK(std::abs(again.c[k].v[i] - rn.c[k].v[i]) <= 1e-15);

    // scale invariance
    std::mt19937_64 rng(2);
    Field3 raw = rough_random3(g, rng);
    for (double& v : raw.c[0].v) v += 2.0;  // keep away from zero length
    Field3 n1 = renormalize(raw);
    Field3 n2 = renormalize(scaled(raw, 7.3));
    for (int k = 0; k < 3; ++k)
        for (size_t i = 0; i < n1.c[k].v.size(); ++i)
            CHECK(std::abs(n1.c[k].v[i] - n2.c[k].v[i]) <= 1e-14);
}

TEST_CASE("renormalize reports the zero node") {
    Grid g = small_grid();
    Field3 f = uniform_field(g, {0, 0, 1});
    f.set(2, 1, {0, 0, 0});
    CHECK_THROWS_WITH_AS((void)renormalize(f), doctest::Contains("(2, 1)"), std::runtime_error);
}

TEST_CASE("skew_solve: identity at m = 0 and hand case") {
    Grid g = small_grid();
    Field3 zero(g);
    std::mt19937_64 rng(9);
    Field3 r = rough_random3(g, rng);
    Field3 x = skew_solve(zero, r);
    for (int k = 0; k < 3; ++k)
        for (size_t i = 0; i < x.c[k].v.size(); ++i) CHECK(x.c[k].v[i] == r.c[k].v[i]);

    // m = e3, r = e1 -> (1/2, 1/2, 0)
    Field3 m = uniform_field(g, {0, 0, 1});
    Field3 e1 = uniform_field(g, {1, 0, 0});
    Field3 s = skew_solve(m, e1);
    CHECK(s.c[0].v[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.c[1].v[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.c[2].v[0] == doctest::Approx(0.0));
}

TEST_CASE("skew_solve agrees with a direct 3x3 solve and satisfies the residual") {
    Grid g = small_grid();
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        Field3 m = rough_random3(g, rng);
        Field3 r = rough_random3(g, rng);
        Field3 x = skew_solve(m, r);
        // residual x - m x x - r
        Field3 res = sub(sub(x, cross(m, x)), r);
        for (int k = 0; k < 3; ++k)
            for (double v : res.c[k].v) CHECK(std::abs(v) <= 1e-13);
        // against the Cramer oracle
        for (size_t i = 0; i < x.n_nodes(); ++i) {
            const int ix = static_cast<int>(i) % g.nx;
            const int iy = static_cast<int>(i) / g.nx;
            const Vec3 expect = skew_solve_oracle(m.at(ix, iy), r.at(ix, iy));
            const Vec3 got = x.at(ix, iy);
            CHECK(std::abs(got.x - expect.x) <= 1e-13);
            CHECK(std::abs(got.y - expect.y) <= 1e-13);
            CHECK(std::abs(got.z - expect.z) <= 1e-13);
        }
    }
}

TEST_CASE("trajectory round-trips bit-exactly through the binary format") {
    Grid g(5, 4, 1.0, 0.75, 0.01, 3);
    Trajectory t(g);
    std::mt19937_64 rng(21);
    for (Field3& f : t.snaps)
        for (int k = 0; k < 3; ++k)
            for (double& v : f.c[k].v) v = uniform_pm1(rng) * 1e3;

    const std::string path = "roundtrip_test.llgf";
    write_trajectory(t, path);
    Trajectory back = read_trajectory(path);
    REQUIRE(back.n_snaps() == t.n_snaps());
    CHECK(back.grid.nx == g.nx);
    CHECK(back.grid.dt == g.dt);
    for (int n = 0; n < t.n_snaps(); ++n)
        for (int k = 0; k < 3; ++k)
            CHECK(std::memcmp(back.snaps[n].c[k].v.data(), t.snaps[n].c[k].v.data(),
                              t.snaps[n].c[k].v.size() * sizeof(double)) == 0);
    std::remove(path.c_str());
}

TEST_CASE("binary format error paths") {
    Grid g(4, 4, 1.0, 1.0, 0.5, 2);
    Trajectory t(g);
    const std::string path = "format_test.llgf";
    write_trajectory(t, path);

    // wrong magic
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.write("NOPE", 4);
    }
    CHECK_THROWS_WITH_AS((void)read_trajectory(path), doctest::Contains("bad magic"),
                         std::invalid_argument);

    // truncated payload
    write_trajectory(t, path);
    {
        std::ifstream in(path, std::ios::binary);
        std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        data.resize(data.size() - 8);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << data;
    }
    CHECK_THROWS_WITH_AS((void)read_trajectory(path), doctest::Contains("truncated"),
                         std::invalid_argument);

    // payload longer than the header claims
    write_trajectory(t, path);
    {
        std::ofstream out(path, std::ios::binary | std::ios::app);
        const double extra = 0.0;
        out.write(reinterpret_cast<const char*>(&extra), 8);
    }
    CHECK_THROWS_WITH_AS((void)read_trajectory(path), doctest::Contains("inconsistent"),
                         std::invalid_argument);
    std::remove(path.c_str());
}

TEST_CASE("csv export carries header and one row per (time, node)") {
    Grid g(3, 3, 1.0, 1.0, 0.5, 1);
    Trajectory t(g);
    const std::string path = "csv_test.csv";
    write_trajectory_csv(t, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x,y,c1,c2,c3");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 2 * 9);
    std::remove(path.c_str());
}
