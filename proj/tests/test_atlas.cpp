#include <cmath>
#include <random>

#include "doctest.h"

#include "atlaspaint/atlas.hpp"
#include "atlaspaint/error.hpp"
#include "atlaspaint/synthetic.hpp"
#include "support/fuzz.hpp"
#include "support/temp_dir.hpp"

using namespace atlaspaint;
using testing_support::TempDir;

namespace {

double area_oracle(const Mesh& m) {
  double total = 0.0;
  for (const Triangle& t : m.triangles) {
    const Vec3 a = m.vertices[t[0]], b = m.vertices[t[1]], c = m.vertices[t[2]];
    const Vec3 u = b - a, v = c - a;
    const double cx = u.y * v.z - u.z * v.y, cy = u.z * v.x - u.x * v.z, cz = u.x * v.y - u.y * v.x;
    total += 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
  }
  return total;
}

Error manifest_failure(const std::string& json, bool check_meshes = false) {
  try {
    parse_manifest(json, ".", check_meshes);
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected parse_manifest to throw");
  return Error(ErrorCode::IoError, "");
}

void write_triangle(const std::filesystem::path& path) {
  Mesh m;
  m.vertices = {{-1, 0, 0}, {1, 0, 0}, {1, 2, 0}};
  m.triangles = {{0, 1, 2}};
  write_ply_file(path, m, PlyFormat::Ascii);
}

}  // namespace

TEST_SUITE("atlas") {
  TEST_CASE("manifest parsing and round trip") {
    const std::string text = R"({
      "atlas_id": "demo",
      "hollow": true,
      "global_transform": [2,0,0,1, 0,2,0,0, 0,0,2,0],
      "regions": [
        {"region_id": "CA1-lh", "mesh_path": "a.ply", "hemisphere": "left", "structure_class": "subcortical"},
        {"region_id": "CA1-rh", "mesh_path": "b.ply", "hemisphere": "right", "structure_class": "subcortical",
         "local_transform": [1,0,0,0, 0,1,0,0, 0,0,1,5]},
        {"region_id": "cortex", "mesh_path": "/abs/c.ply", "hemisphere": "both", "structure_class": "cortical"}
      ]})";
    const AtlasManifest m = parse_manifest(text, "/base", false);
    CHECK(m.atlas_id == "demo");
    CHECK(m.hollow);
    CHECK(m.global_transform.apply_point({1, 1, 1}) == Vec3{3, 2, 2});
    REQUIRE(m.regions.size() == 3);
    CHECK(m.regions[0].base_name() == "CA1");
    CHECK(m.regions[1].local_transform->offset() == Vec3{0, 0, 5});
    CHECK(m.regions[2].base_name() == "cortex");
    CHECK(m.resolve(m.regions[0]) == std::filesystem::path("/base/a.ply"));
    CHECK(m.resolve(m.regions[2]) == std::filesystem::path("/abs/c.ply"));
    CHECK(m.find("CA1-rh") == 1u);
    CHECK_FALSE(m.find("nope"));

    const AtlasManifest again = parse_manifest(manifest_to_json(m), "/base", false);
    CHECK(again.atlas_id == m.atlas_id);
    CHECK(again.hollow == m.hollow);
    CHECK(again.global_transform == m.global_transform);
    REQUIRE(again.regions.size() == 3);
    CHECK(again.regions[1].local_transform == m.regions[1].local_transform);
  }

  TEST_CASE("manifest errors carry key paths") {
    Error e = manifest_failure(R"({"regions": []})");
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(e.context() == "$.atlas_id");

    e = manifest_failure(R"({"atlas_id": "x", "regions": [{"region_id": "a", "mesh_path": "a.ply",
        "hemisphere": "middle", "structure_class": "cortical"}]})");
    CHECK(e.context() == "regions[0].hemisphere");

    e = manifest_failure(R"({"atlas_id": "x", "global_transform": [1,0,0,0, 0,1,0,0, 0,0,0,0], "regions": []})");
    CHECK(e.code() == ErrorCode::SingularTransform);

    e = manifest_failure(R"({"atlas_id": "x", "regions": [
        {"region_id": "a", "mesh_path": "a.ply", "hemisphere": "both", "structure_class": "cortical"},
        {"region_id": "a", "mesh_path": "b.ply", "hemisphere": "both", "structure_class": "cortical"}]})");
    CHECK(e.code() == ErrorCode::DuplicateRegion);

    e = manifest_failure(R"({"atlas_id": "x", "regions": [
        {"region_id": "a-lh", "mesh_path": "a.ply", "hemisphere": "left", "structure_class": "cortical"},
        {"region_id": "a", "mesh_path": "b.ply", "hemisphere": "left", "structure_class": "cortical"}]})");
    CHECK(e.code() == ErrorCode::DuplicateRegion);

    e = manifest_failure(R"({"atlas_id": "x", "regions": [
        {"region_id": "a", "mesh_path": "nowhere.ply", "hemisphere": "both", "structure_class": "cortical"}]})",
                         true);
    CHECK(e.code() == ErrorCode::MissingMesh);
    CHECK(e.context().find("nowhere.ply") != std::string::npos);

    CHECK(manifest_failure("[1, 2").code() == ErrorCode::ParseError);
  }

  TEST_CASE("apply_transform maps normals by the inverse transpose") {
    Mesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    m.normals = std::vector<Vec3>{{1, 1, 0}, {1, 1, 0}, {0, 0, 1}};
    m.triangles = {{0, 1, 2}};
    Affine3 stretch;  // x *= 2
    stretch.m[0] = 2.0;
    const Mesh out = apply_transform(m, stretch);
    CHECK(out.vertices[1] == Vec3{2, 0, 0});
    // Tangent (1,-1,0) maps to (2,-1,0); the normal must stay perpendicular.
    const Vec3 n = (*out.normals)[0];
    CHECK(dot(n, Vec3{2, -1, 0}) == doctest::Approx(0.0));
    CHECK(length(n) == doctest::Approx(1.0));

    Affine3 flat;
    flat.m[10] = 0.0;
    CHECK_THROWS_AS(apply_transform(m, flat), Error);
  }

  TEST_CASE("split of a single straddling triangle") {
    Mesh m;
    m.vertices = {{-1, 0, 0}, {1, 0, 0}, {1, 2, 0}};
    m.triangles = {{0, 1, 2}};
    const HemisphereSplit s = split_hemispheres(m);
    CHECK(area_oracle(s.left) == doctest::Approx(0.5));
    CHECK(area_oracle(s.right) == doctest::Approx(1.5));
    for (const Vec3& v : s.left.vertices) CHECK(v.x <= 0.0);
    for (const Vec3& v : s.right.vertices) CHECK(v.x >= 0.0);
    // The cut points appear in both halves with identical coordinates.
    int shared = 0;
    for (const Vec3& a : s.left.vertices) {
      for (const Vec3& b : s.right.vertices) shared += a == b;
    }
    CHECK(shared == 2);
  }

  TEST_CASE("split leaves one-sided meshes intact and handles on-plane faces") {
    Mesh m;
    m.vertices = {{-3, 0, 0}, {-1, 0, 0}, {-2, 1, 0}, {0, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    m.triangles = {{0, 1, 2}, {3, 4, 5}};
    const HemisphereSplit s = split_hemispheres(m);
    CHECK(s.left.triangles.size() == 2);
    CHECK(s.right.triangles.empty());
    CHECK(s.right.vertices.empty());
  }

  TEST_CASE("fuzzed splits conserve area and respect the halfspaces") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 30; ++i) {
      const double midline = i % 2 == 0 ? 0.0 : 3.25;
      const Mesh m = testing_support::random_straddling_mesh(rng, midline);
      const HemisphereSplit s = split_hemispheres(m, midline);
      const double before = area_oracle(m);
      const double after = area_oracle(s.left) + area_oracle(s.right);
      CAPTURE(i);
      CHECK(std::abs(after - before) <= 1e-6 * before);
      for (const Vec3& v : s.left.vertices) CHECK(v.x <= midline + 1e-9);
      for (const Vec3& v : s.right.vertices) CHECK(v.x >= midline - 1e-9);
      CHECK_NOTHROW(validate(s.left));
      CHECK_NOTHROW(validate(s.right));
    }
  }

  TEST_CASE("prep_atlas splits, transforms and writes a loadable atlas") {
    TempDir raw;
    TempDir out;
    const auto raw_manifest = write_synthetic_raw_atlas(raw.path());
    const PrepResult result = prep_atlas(raw.path(), raw_manifest, out.path());
    // Seven two-sided regions plus the brainstem, which straddles the midline.
    REQUIRE(result.manifest.regions.size() == 16);
    CHECK(result.warnings.empty());
    CHECK(result.manifest.regions[0].region_id == "frontal-lh");
    CHECK(result.manifest.regions[1].region_id == "frontal-rh");
    CHECK(std::filesystem::exists(out / "brainstem-lh.ply"));

    const LoadedAtlas atlas = load_atlas(load_manifest(result.manifest_path));
    for (std::size_t i = 0; i < atlas.meshes.size(); ++i) {
      const Mesh& mesh = *atlas.meshes[i];
      const bool left = atlas.manifest.regions[i].hemisphere == Hemisphere::Left;
      for (const Vec3& v : mesh.vertices) CHECK((left ? v.x <= 0.0 : v.x >= 0.0));
      CHECK(mesh.normals.has_value());
    }
  }

  TEST_CASE("prep_atlas applies transforms and warns about empty halves") {
    TempDir raw;
    TempDir out;
    write_triangle(raw / "tri.ply");
    // Shifted entirely to x > 0 by the local transform: the left half is empty.
    write_file(raw / "manifest.json", R"({"atlas_id": "t", "global_transform": [1,0,0,0, 0,1,0,0, 0,0,1,0],
      "regions": [{"region_id": "tri", "mesh_path": "tri.ply", "hemisphere": "both",
                   "structure_class": "cortical", "local_transform": [1,0,0,10, 0,1,0,0, 0,0,1,0]}]})");
    const PrepResult result = prep_atlas(raw.path(), raw / "manifest.json", out.path());
    REQUIRE(result.manifest.regions.size() == 1);
    CHECK(result.manifest.regions[0].region_id == "tri-rh");
    REQUIRE(result.warnings.size() == 1);
    CHECK(result.warnings[0].find("tri-lh") != std::string::npos);
    const Mesh right = read_ply_file(out / "tri-rh.ply");
    CHECK(right.vertices[0].x == doctest::Approx(9.0));
  }

  TEST_CASE("prep_atlas names the failing region") {
    TempDir raw;
    TempDir out;
    write_file(raw / "bad.ply", "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nend_header\n");
    write_file(raw / "manifest.json", R"({"atlas_id": "t", "regions": [{"region_id": "bad",
      "mesh_path": "bad.ply", "hemisphere": "both", "structure_class": "cortical"}]})");
    try {
      prep_atlas(raw.path(), raw / "manifest.json", out.path());
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("region 'bad'") != std::string::npos);
    }
  }
}
