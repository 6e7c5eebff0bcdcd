#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "atlaspaint/geometry.hpp"

namespace atlaspaint {

using Triangle = std::array<std::uint32_t, 3>;

// Indexed triangle mesh in atlas space (millimeters). Normals, when present,
// are per-vertex and have the same length as `vertices`.
struct Mesh {
  std::vector<Vec3> vertices;
  std::optional<std::vector<Vec3>> normals;
  std::vector<Triangle> triangles;

  bool empty() const { return triangles.empty(); }
  bool operator==(const Mesh&) const = default;
};

// Throws Error(IndexOutOfRange) or Error(InvalidArgument) on a broken mesh.
void validate(const Mesh& mesh);

Bounds3 bounds(const Mesh& mesh);
double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);
double surface_area(const Mesh& mesh);

// Area-weighted vertex normals; vertices with no accumulated normal get (0,0,1).
Mesh compute_vertex_normals(Mesh mesh);

enum class PlyFormat { Ascii, BinaryLittleEndian };

Mesh parse_ply(std::string_view bytes);
std::string write_ply(const Mesh& mesh, PlyFormat format);

Mesh read_ply_file(const std::filesystem::path& path);
void write_ply_file(const std::filesystem::path& path, const Mesh& mesh, PlyFormat format);

// Whole-file helpers shared by the readers and writers in this library.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace atlaspaint
