#include "atlaspaint/error.hpp"
#include "atlaspaint/mesh.hpp"

namespace atlaspaint {

void validate(const Mesh& mesh) {
  if (mesh.normals && mesh.normals->size() != mesh.vertices.size()) {
    throw Error(ErrorCode::InvalidArgument, "normal count " + std::to_string(mesh.normals->size()) +
                                                " differs from vertex count " +
                                                std::to_string(mesh.vertices.size()));
  }
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    for (std::uint32_t index : mesh.triangles[t]) {
      if (index >= mesh.vertices.size()) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "triangle " + std::to_string(t) + " references vertex " + std::to_string(index));
      }
    }
  }
}

Bounds3 bounds(const Mesh& mesh) {
  Bounds3 b;
  for (const Vec3& v : mesh.vertices) b.extend(v);
  return b;
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * length(cross(b - a, c - a));
}

double surface_area(const Mesh& mesh) {
  double total = 0.0;
  for (const Triangle& t : mesh.triangles) {
    total += triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
  }
  return total;
}

Mesh compute_vertex_normals(Mesh mesh) {
  std::vector<Vec3> accum(mesh.vertices.size());
  for (const Triangle& t : mesh.triangles) {
    const Vec3& a = mesh.vertices[t[0]];
    // Unnormalized cross product: its magnitude is twice the face area, which
    // gives the area weighting. Degenerate faces add zero.
    const Vec3 n = cross(mesh.vertices[t[1]] - a, mesh.vertices[t[2]] - a);
    for (std::uint32_t index : t) accum[index] += n;
  }
  for (Vec3& n : accum) n = normalized(n);
  mesh.normals = std::move(accum);
  return mesh;
}

}  // namespace atlaspaint
