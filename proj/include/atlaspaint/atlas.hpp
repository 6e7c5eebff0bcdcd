#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "atlaspaint/geometry.hpp"
#include "atlaspaint/mesh.hpp"

namespace atlaspaint {

enum class Hemisphere { Left, Right, Both };
enum class StructureClass { Cortical, Subcortical };

std::string_view to_string(Hemisphere h);
std::string_view to_string(StructureClass c);

struct RegionEntry {
  std::string region_id;
  std::filesystem::path mesh_path;
  Hemisphere hemisphere = Hemisphere::Both;
  StructureClass structure_class = StructureClass::Cortical;
  std::optional<Affine3> local_transform;

  // Region name without the hemisphere suffix: "CA1-lh" tagged left is "CA1".
  // Biomarker columns address regions by this name.
  std::string base_name() const;
};

struct AtlasManifest {
  std::string atlas_id;
  std::vector<RegionEntry> regions;
  Affine3 global_transform;
  // Unclosed source meshes; inner-cortical views are not available.
  bool hollow = false;
  // Directory relative mesh paths are resolved against.
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const RegionEntry& entry) const;
  std::optional<std::size_t> find(std::string_view region_id) const;
};

// Parses the manifest JSON. Relative mesh paths resolve against `base_dir`;
// when `check_meshes` is set every mesh file must exist (MissingMesh).
AtlasManifest parse_manifest(std::string_view json, const std::filesystem::path& base_dir,
                             bool check_meshes = true);

// Loads a manifest file. Mesh paths resolve against `mesh_root` when given,
// otherwise against the manifest's own directory.
AtlasManifest load_manifest(const std::filesystem::path& path,
                            const std::optional<std::filesystem::path>& mesh_root = std::nullopt);

std::string manifest_to_json(const AtlasManifest& manifest);

// v -> A v + b; normals go through the inverse-transpose of A and are renormalized.
Mesh apply_transform(Mesh mesh, const Affine3& transform);

struct HemisphereSplit {
  Mesh left;   // x <= midline
  Mesh right;  // x >= midline
};

// Clips every straddling triangle against the plane x = midline_x. Vertices on
// the plane are shared by both halves; unreferenced vertices are dropped.
HemisphereSplit split_hemispheres(const Mesh& mesh, double midline_x = 0.0);

struct PrepResult {
  AtlasManifest manifest;
  std::filesystem::path manifest_path;
  std::vector<std::string> warnings;
};

// Normalizes, splits and exports every region of a raw atlas into `out_dir`
// as `<region_id>-lh.ply` / `<region_id>-rh.ply`, plus `manifest.json`.
PrepResult prep_atlas(const std::filesystem::path& raw_dir, const std::filesystem::path& manifest_in,
                      const std::filesystem::path& out_dir);

// A manifest with its meshes read, placed in the atlas frame, and shaded.
struct LoadedAtlas {
  AtlasManifest manifest;
  std::vector<std::shared_ptr<const Mesh>> meshes;  // parallel to manifest.regions
  Bounds3 bounds;
};

LoadedAtlas load_atlas(AtlasManifest manifest);

}  // namespace atlaspaint
