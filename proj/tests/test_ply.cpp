#include <cstring>
#include <random>

#include "doctest.h"

#include "atlaspaint/error.hpp"
#include "atlaspaint/mesh.hpp"
#include "support/fuzz.hpp"
#include "support/temp_dir.hpp"

using namespace atlaspaint;

namespace {

ErrorCode code_of(std::string_view text) {
  try {
    parse_ply(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected parse_ply to throw");
  return ErrorCode::IoError;
}

const char* kAsciiQuad =
    "ply\n"
    "format ascii 1.0\n"
    "comment made by hand\n"
    "obj_info nothing\n"
    "element vertex 4\n"
    "property float x\n"
    "property float y\n"
    "property float z\n"
    "property uchar red\n"
    "element face 1\n"
    "property list uchar int vertex_indices\n"
    "end_header\n"
    "0 0 0 255\n"
    "1 0 0 255\n"
    "1 1 0 255\n"
    "0 1 0.5 255\n"
    "4 0 1 2 3\n";

void put_f32(std::string& s, float v) {
  char b[4];
  std::memcpy(b, &v, 4);
  s.append(b, 4);
}

void put_i32(std::string& s, std::int32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  s.append(b, 4);
}

}  // namespace

TEST_SUITE("ply") {
  TEST_CASE("ascii with comments, extra properties and a quad") {
    const Mesh m = parse_ply(kAsciiQuad);
    REQUIRE(m.vertices.size() == 4);
    CHECK(m.vertices[3] == Vec3{0, 1, 0.5});
    CHECK_FALSE(m.normals.has_value());
    REQUIRE(m.triangles.size() == 2);
    CHECK(m.triangles[0] == Triangle{0, 1, 2});
    CHECK(m.triangles[1] == Triangle{0, 2, 3});
  }

  TEST_CASE("binary little endian with normals and an unknown element") {
    std::string bytes =
        "ply\nformat binary_little_endian 1.0\n"
        "element vertex 3\n"
        "property float x\nproperty float y\nproperty float z\n"
        "property float nx\nproperty float ny\nproperty float nz\n"
        "element face 1\nproperty list uchar int vertex_index\n"
        "element edge 1\nproperty int vertex1\nproperty int vertex2\n"
        "end_header\n";
    const float verts[3][6] = {{0, 0, 0, 0, 0, 1}, {2, 0, 0, 0, 0, 1}, {0, 3, 0, 0, 0, 1}};
    for (const auto& v : verts) {
      for (float f : v) put_f32(bytes, f);
    }
    bytes.push_back(3);
    put_i32(bytes, 0);
    put_i32(bytes, 1);
    put_i32(bytes, 2);
    put_i32(bytes, 0);
    put_i32(bytes, 1);
    const Mesh m = parse_ply(bytes);
    REQUIRE(m.vertices.size() == 3);
    CHECK(m.vertices[2] == Vec3{0, 3, 0});
    REQUIRE(m.normals);
    CHECK((*m.normals)[1] == Vec3{0, 0, 1});
    CHECK(m.triangles == std::vector<Triangle>{{0, 1, 2}});
  }

  TEST_CASE("error codes") {
    CHECK(code_of("plx\nformat ascii 1.0\nend_header\n") == ErrorCode::MissingMagic);
    CHECK(code_of("") == ErrorCode::MissingMagic);
    CHECK(code_of("ply\nformat binary_big_endian 1.0\nend_header\n") == ErrorCode::UnsupportedFormat);
    CHECK(code_of("ply\nformat ascii 2.0\nend_header\n") == ErrorCode::UnsupportedFormat);
    CHECK(code_of("ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\nproperty float z\n"
                  "end_header\n0 0 0\n") == ErrorCode::CountMismatch);
    CHECK(code_of("ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\n"
                  "element face 1\nproperty list uchar int vertex_indices\nend_header\n"
                  "0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n") == ErrorCode::IndexOutOfRange);
    CHECK(code_of("ply\nformat ascii 1.0\nelement vertex 1\nproperty quaternion x\nend_header\n0\n") ==
          ErrorCode::ParseError);
    CHECK(code_of("ply\nformat ascii 1.0\nbogus line\nend_header\n") == ErrorCode::ParseError);
    CHECK(code_of("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nproperty float z\n"
                  "end_header\n0 zero 0\n") == ErrorCode::ParseError);
  }

  TEST_CASE("truncated binary body") {
    Mesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    m.triangles = {{0, 1, 2}};
    std::string bytes = write_ply(m, PlyFormat::BinaryLittleEndian);
    bytes.resize(bytes.size() - 3);
    CHECK(code_of(bytes) == ErrorCode::CountMismatch);
  }

  TEST_CASE("round trip of fuzzed meshes in both formats") {
    std::mt19937_64 rng(20240611);
    for (int i = 0; i < 40; ++i) {
      const Mesh m = testing_support::random_mesh(rng, i % 3 == 0);
      for (PlyFormat f : {PlyFormat::Ascii, PlyFormat::BinaryLittleEndian}) {
        CAPTURE(i);
        CHECK(parse_ply(write_ply(m, f)) == m);
      }
    }
  }

  TEST_CASE("file helpers report I/O errors") {
    testing_support::TempDir dir;
    Mesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    m.triangles = {{0, 1, 2}};
    write_ply_file(dir / "m.ply", m, PlyFormat::Ascii);
    CHECK(read_ply_file(dir / "m.ply") == m);
    try {
      read_ply_file(dir / "missing.ply");
      FAIL("expected IoError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::IoError);
      CHECK(is_io_error(e.code()));
    }
  }
}
