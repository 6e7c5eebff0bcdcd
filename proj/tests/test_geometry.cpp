#include <cmath>
#include <numbers>

#include "doctest.h"

#include "atlaspaint/error.hpp"
#include "atlaspaint/geometry.hpp"
#include "atlaspaint/mesh.hpp"

using namespace atlaspaint;

TEST_SUITE("geometry") {
  TEST_CASE("affine apply, compose and inverse") {
    const Affine3 t = compose(Affine3::scale(2.0), Affine3::translation({1, -2, 3}));
    CHECK(t.apply_point({1, 1, 1}) == Vec3{3, 0, 5});
    CHECK(t.apply_vector({1, 1, 1}) == Vec3{2, 2, 2});

    const Affine3 r = Affine3::rotation_z(std::numbers::pi / 2);
    const Vec3 p = r.apply_point({1, 0, 0});
    CHECK(p.x == doctest::Approx(0.0));
    CHECK(p.y == doctest::Approx(1.0));

    const Affine3 m = compose(compose(r, Affine3::scale(3.5)), Affine3::translation({4, 5, 6}));
    const Vec3 q{0.25, -7, 2};
    const Vec3 back = m.inverse().apply_point(m.apply_point(q));
    CHECK(back.x == doctest::Approx(q.x));
    CHECK(back.y == doctest::Approx(q.y));
    CHECK(back.z == doctest::Approx(q.z));
    CHECK(m.determinant() == doctest::Approx(3.5 * 3.5 * 3.5));
  }

  TEST_CASE("singular transform is rejected") {
    Affine3 flat;
    flat.m[10] = 0.0;
    CHECK(flat.determinant() == 0.0);
    try {
      (void)flat.inverse();
      FAIL("expected SingularTransform");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SingularTransform);
    }
  }

  TEST_CASE("bounds") {
    Bounds3 b;
    CHECK(b.empty());
    b.extend(Vec3{1, 2, 3});
    CHECK_FALSE(b.empty());
    b.extend(Vec3{-1, 0, 5});
    CHECK(b.center() == Vec3{0, 1, 4});
    CHECK(b.size() == Vec3{2, 2, 2});
  }

  TEST_CASE("cube vertex normals point along the diagonals") {
    // Each face is split along the diagonal through its even-parity corners,
    // so every corner sees the same area from each of its three faces.
    Mesh cube;
    for (int i = 0; i < 8; ++i) cube.vertices.push_back({(i & 1) ? 1.0 : -1.0, (i & 2) ? 1.0 : -1.0, (i & 4) ? 1.0 : -1.0});
    auto parity = [](std::uint32_t v) { return __builtin_popcount(v) % 2; };
    auto add_face = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
      // Quad a-b-c-d counter-clockwise from outside.
      if (parity(a) == 0) {
        cube.triangles.push_back({a, b, c});
        cube.triangles.push_back({a, c, d});
      } else {
        cube.triangles.push_back({b, c, d});
        cube.triangles.push_back({b, d, a});
      }
    };
    add_face(0, 2, 3, 1);  // z = -1
    add_face(4, 5, 7, 6);  // z = +1
    add_face(0, 1, 5, 4);  // y = -1
    add_face(2, 6, 7, 3);  // y = +1
    add_face(0, 4, 6, 2);  // x = -1
    add_face(1, 3, 7, 5);  // x = +1
    CHECK(surface_area(cube) == doctest::Approx(24.0));

    const Mesh shaded = compute_vertex_normals(cube);
    REQUIRE(shaded.normals);
    const double k = 1.0 / std::sqrt(3.0);
    for (std::size_t i = 0; i < 8; ++i) {
      const Vec3 expected = cube.vertices[i] * k;
      const Vec3 n = (*shaded.normals)[i];
      CHECK(n.x == doctest::Approx(expected.x).epsilon(1e-12));
      CHECK(n.y == doctest::Approx(expected.y).epsilon(1e-12));
      CHECK(n.z == doctest::Approx(expected.z).epsilon(1e-12));
    }
  }

  TEST_CASE("isolated vertices get the fallback normal") {
    Mesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {5, 5, 5}};
    m.triangles = {{0, 1, 2}};
    const Mesh shaded = compute_vertex_normals(m);
    CHECK((*shaded.normals)[0] == Vec3{0, 0, 1});
    CHECK((*shaded.normals)[3] == Vec3{0, 0, 1});
  }

  TEST_CASE("validate catches bad indices and normal counts") {
    Mesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    m.triangles = {{0, 1, 3}};
    CHECK_THROWS_AS(validate(m), Error);
    m.triangles = {{0, 1, 2}};
    CHECK_NOTHROW(validate(m));
    m.normals = std::vector<Vec3>{{0, 0, 1}};
    CHECK_THROWS_AS(validate(m), Error);
  }
}
