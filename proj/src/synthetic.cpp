#include "atlaspaint/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <system_error>

#include "atlaspaint/error.hpp"

namespace atlaspaint {

namespace {

void make_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + dir.string() + "': " + ec.message(), dir.string());
}

void append(Mesh& into, const Mesh& from) {
  const auto offset = static_cast<std::uint32_t>(into.vertices.size());
  into.vertices.insert(into.vertices.end(), from.vertices.begin(), from.vertices.end());
  for (const Triangle& t : from.triangles) into.triangles.push_back({t[0] + offset, t[1] + offset, t[2] + offset});
}

}  // namespace

Mesh uv_ellipsoid(const Vec3& center, const Vec3& radii, int stacks, int slices) {
  if (stacks < 2 || slices < 3) throw Error(ErrorCode::InvalidArgument, "ellipsoid needs stacks >= 2 and slices >= 3");
  Mesh mesh;
  const double pi = std::numbers::pi;
  mesh.vertices.push_back(center + Vec3{0, 0, radii.z});
  for (int i = 1; i < stacks; ++i) {
    const double theta = pi * i / stacks;
    for (int j = 0; j < slices; ++j) {
      const double phi = 2.0 * pi * j / slices;
      mesh.vertices.push_back(center + Vec3{radii.x * std::sin(theta) * std::cos(phi),
                                            radii.y * std::sin(theta) * std::sin(phi), radii.z * std::cos(theta)});
    }
  }
  mesh.vertices.push_back(center - Vec3{0, 0, radii.z});
  const auto s = static_cast<std::uint32_t>(slices);
  const auto ring = [s](int i, std::uint32_t j) { return 1 + static_cast<std::uint32_t>(i - 1) * s + j % s; };
  const auto south = static_cast<std::uint32_t>(mesh.vertices.size() - 1);
  for (std::uint32_t j = 0; j < s; ++j) mesh.triangles.push_back({0, ring(1, j), ring(1, j + 1)});
  for (int i = 1; i + 1 < stacks; ++i) {
    for (std::uint32_t j = 0; j < s; ++j) {
      mesh.triangles.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
      mesh.triangles.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
    }
  }
  for (std::uint32_t j = 0; j < s; ++j) mesh.triangles.push_back({south, ring(stacks - 1, j + 1), ring(stacks - 1, j)});
  return mesh;
}

Mesh mirror_x(const Mesh& mesh) {
  Mesh out = mesh;
  for (Vec3& v : out.vertices) v.x = -v.x;
  if (out.normals) {
    for (Vec3& n : *out.normals) n.x = -n.x;
  }
  for (Triangle& t : out.triangles) std::swap(t[1], t[2]);
  return out;
}

const std::vector<SyntheticRegion>& synthetic_regions() {
  static const std::vector<SyntheticRegion> regions = {
      {"frontal", StructureClass::Cortical, {-35, 40, 20}, {30, 40, 35}},
      {"parietal", StructureClass::Cortical, {-35, -20, 35}, {30, 35, 30}},
      {"occipital", StructureClass::Cortical, {-30, -60, 10}, {25, 25, 25}},
      {"temporal", StructureClass::Cortical, {-50, 0, -10}, {18, 35, 18}},
      {"olfactory", StructureClass::Cortical, {-10, 65, -15}, {6, 12, 5}},
      {"hippocampus", StructureClass::Subcortical, {-25, -15, -10}, {6, 18, 6}},
      {"thalamus", StructureClass::Subcortical, {-10, -10, 5}, {8, 12, 8}},
  };
  return regions;
}

std::filesystem::path write_synthetic_atlas(const std::filesystem::path& dir, const SyntheticAtlasOptions& options) {
  make_dir(dir / "meshes");
  AtlasManifest manifest;
  manifest.atlas_id = options.atlas_id;
  manifest.hollow = options.hollow;
  manifest.base_dir = dir;
  for (const SyntheticRegion& region : synthetic_regions()) {
    Mesh left = uv_ellipsoid(region.center, region.radii, options.stacks, options.slices);
    // Round to float first so the mirrored file holds the exact negation.
    for (Vec3& v : left.vertices) {
      v = {static_cast<float>(v.x), static_cast<float>(v.y), static_cast<float>(v.z)};
    }
    const Mesh right = mirror_x(left);
    auto add = [&](const char* suffix, const Mesh& mesh, Hemisphere hemi) {
      RegionEntry entry;
      entry.region_id = region.name + suffix;
      entry.mesh_path = std::filesystem::path("meshes") / (entry.region_id + ".ply");
      entry.hemisphere = hemi;
      entry.structure_class = region.structure_class;
      write_ply_file(dir / entry.mesh_path, mesh, PlyFormat::BinaryLittleEndian);
      manifest.regions.push_back(std::move(entry));
    };
    add("-lh", left, Hemisphere::Left);
    add("-rh", right, Hemisphere::Right);
  }
  const std::filesystem::path path = dir / "manifest.json";
  write_file(path, manifest_to_json(manifest));
  return path;
}

std::filesystem::path write_synthetic_raw_atlas(const std::filesystem::path& dir) {
  make_dir(dir / "meshes");
  AtlasManifest manifest;
  manifest.atlas_id = "synthetic-raw";
  manifest.base_dir = dir;
  auto add = [&](const std::string& name, StructureClass cls, const Mesh& mesh) {
    RegionEntry entry;
    entry.region_id = name;
    entry.mesh_path = std::filesystem::path("meshes") / (name + ".ply");
    entry.hemisphere = Hemisphere::Both;
    entry.structure_class = cls;
    write_ply_file(dir / entry.mesh_path, mesh, PlyFormat::Ascii);
    manifest.regions.push_back(std::move(entry));
  };
  for (const SyntheticRegion& region : synthetic_regions()) {
    Mesh both = uv_ellipsoid(region.center, region.radii);
    append(both, mirror_x(both));
    add(region.name, region.structure_class, both);
  }
  add("brainstem", StructureClass::Subcortical, uv_ellipsoid({0, -30, -35}, {12, 14, 25}));
  const std::filesystem::path path = dir / "manifest.json";
  write_file(path, manifest_to_json(manifest));
  return path;
}

std::string synthetic_biomarker_csv() {
  // Values per stage, left then right hemisphere, for each region in order.
  struct Row {
    const char* stage;
    double values[7][2];
  };
  static const Row rows[] = {
      {"stage1", {{0, 0}, {0, 0}, {0, 0}, {0, 0.5}, {0, 1}, {1, 2}, {0, 0.5}}},
      {"stage2", {{0, 0.5}, {0, 0}, {0, 0}, {0.5, 1.5}, {1, 2}, {2, 3}, {0.5, 1}}},
      {"stage3", {{0.5, 1}, {0.5, 1}, {0, 0.5}, {1.5, 2.5}, {2, 3}, {3, 3}, {1, 2}}},
      {"stage4", {{1, 2}, {1, 2}, {0.5, 1.5}, {2.5, 3}, {3, 3}, {3, 3}, {2, 3}}},
  };
  std::ostringstream out;
  out << "Image-name-unique";
  for (const SyntheticRegion& r : synthetic_regions()) out << ',' << r.name << "-lh," << r.name << "-rh";
  out << '\n';
  for (const Row& row : rows) {
    out << row.stage;
    for (const auto& v : row.values) out << ',' << v[0] << ',' << v[1];
    out << '\n';
  }
  return out.str();
}

}  // namespace atlaspaint
