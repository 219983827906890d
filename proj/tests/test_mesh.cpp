#include <doctest.h>

#include <cmath>
#include <random>

#include "topgrad/mesh.hpp"

using namespace topgrad;

namespace {

CellSet random_set(const std::shared_ptr<const Mesh>& mesh, std::mt19937& rng) {
    std::bernoulli_distribution coin(0.5);
    CellSet s(mesh);
    for (int c = 0; c < mesh->num_cells(); ++c) {
        if (coin(rng)) s.insert(c);
    }
    return s;
}

}  // namespace

TEST_CASE("smallest mesh: unit square, nx=ny=1") {
    auto mesh = build_mesh({1.0, 1.0}, 1, 1);
    CHECK(mesh->num_cells() == 2);
    CHECK(mesh->num_nodes() == 4);
    CHECK(mesh->cell_area() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("reference mesh ladder: n=32 and n=1000") {
    auto mesh = build_mesh({1.0, 1.0}, 32, 32);
    CHECK(mesh->num_cells() == 2048);
    CHECK(mesh->h() == doctest::Approx(std::sqrt(2.0) / 32).epsilon(1e-14));

    auto fine = build_mesh({1.0, 1.0}, 1000, 1000);
    CHECK(fine->num_cells() == 2000000);
}

TEST_CASE("cell areas sum to the domain measure") {
    auto mesh = build_mesh({2.0, 1.5}, 7, 5);
    const double total = mesh->num_cells() * mesh->cell_area();
    CHECK(total == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(mesh->h() == doctest::Approx(std::hypot(2.0 / 7, 1.5 / 5)).epsilon(1e-14));
}

TEST_CASE("cells have distinct counter-clockwise nodes") {
    auto mesh = build_mesh({1.0, 1.0}, 4, 3);
    for (int c = 0; c < mesh->num_cells(); ++c) {
        const auto& tri = mesh->cell(c);
        CHECK(tri[0] != tri[1]);
        CHECK(tri[1] != tri[2]);
        CHECK(tri[0] != tri[2]);
        const auto& a = mesh->node(tri[0]);
        const auto& b = mesh->node(tri[1]);
        const auto& d = mesh->node(tri[2]);
        const double cross =
            (b[0] - a[0]) * (d[1] - a[1]) - (b[1] - a[1]) * (d[0] - a[0]);
        CHECK(cross > 0.0);
    }
}

TEST_CASE("invalid mesh arguments") {
    CHECK_THROWS_AS(build_mesh({1.0, 1.0}, 0, 4), std::invalid_argument);
    CHECK_THROWS_AS(build_mesh({-1.0, 1.0}, 4, 4), std::invalid_argument);
}

TEST_CASE("symmetric difference basics") {
    auto mesh = build_mesh({1.0, 1.0}, 2, 1);  // 4 cells
    CellSet a(mesh), b(mesh);
    a.insert(0);
    a.insert(1);
    b.insert(1);
    b.insert(2);

    CellSet d = symmetric_difference(a, b);
    CHECK(d.contains(0));
    CHECK(!d.contains(1));
    CHECK(d.contains(2));
    CHECK(d.count() == 2);

    CHECK(symmetric_difference(a, CellSet(mesh)) == a);
    CHECK(symmetric_difference(a, a) == CellSet(mesh));
}

TEST_CASE("mismatched meshes are rejected") {
    auto m1 = build_mesh({1.0, 1.0}, 2, 2);
    auto m2 = build_mesh({1.0, 1.0}, 2, 2);
    CHECK_THROWS_AS(symmetric_difference(CellSet(m1), CellSet(m2)), std::invalid_argument);
    CHECK_THROWS_AS(set_distance_l1(CellSet(m1), CellSet(m2)), std::invalid_argument);
}

TEST_CASE("set_distance_l1 basics") {
    auto mesh = build_mesh({1.0, 1.0}, 1, 1);
    CellSet a(mesh), b(mesh);
    a.insert(0);
    b.insert(1);
    CHECK(set_distance_l1(a, a) == 0.0);
    CHECK(set_distance_l1(a, b) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(set_distance_l1(CellSet(mesh), CellSet::full(mesh)) ==
          doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("properties of set arithmetic on random sets") {
    auto mesh = build_mesh({1.0, 1.0}, 8, 8);
    std::mt19937 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        CellSet a = random_set(mesh, rng);
        CellSet b = random_set(mesh, rng);
        CellSet c = random_set(mesh, rng);

        CHECK(symmetric_difference(a, b) == symmetric_difference(b, a));
        CHECK(symmetric_difference(symmetric_difference(a, b), c) ==
              symmetric_difference(a, symmetric_difference(b, c)));

        const double lhs = symmetric_difference(a, b).measure();
        const double rhs = a.measure() + b.measure() - 2.0 * set_intersection(a, b).measure();
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));

        CHECK(set_distance_l1(a, c) <= set_distance_l1(a, b) + set_distance_l1(b, c) + 1e-12);

        CHECK(a.measure() == doctest::Approx(a.measure_recomputed()).epsilon(1e-12));
    }
}
