#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "atlaspaint/atlas.hpp"
#include "atlaspaint/geometry.hpp"
#include "atlaspaint/mesh.hpp"

namespace atlaspaint {

// Closed UV ellipsoid, outward winding: two poles plus (stacks - 1) rings of
// `slices` vertices, 2 * slices * (stacks - 1) triangles.
Mesh uv_ellipsoid(const Vec3& center, const Vec3& radii, int stacks = 16, int slices = 24);

// Reflection through x = 0 with the winding flipped so outward stays outward.
Mesh mirror_x(const Mesh& mesh);

struct SyntheticRegion {
  std::string name;
  StructureClass structure_class;
  Vec3 center;  // left hemisphere (x < 0)
  Vec3 radii;
};

// Seven regions per hemisphere laid out like a coarse brain (mm, +y anterior,
// +z superior). Every left ellipsoid stays strictly at x < 0.
const std::vector<SyntheticRegion>& synthetic_regions();

struct SyntheticAtlasOptions {
  std::string atlas_id = "synthetic";
  bool hollow = false;
  int stacks = 16;
  int slices = 24;
};

// Split atlas: meshes/<name>-lh.ply and -rh.ply (the right meshes are exact
// mirrors of the left ones) plus manifest.json with entries ordered
// name-lh, name-rh, ... Returns the manifest path.
std::filesystem::path write_synthetic_atlas(const std::filesystem::path& dir, const SyntheticAtlasOptions& options = {});

// Unsplit variant for prep-atlas: one mesh per region holding both
// hemispheres, plus a `brainstem` ellipsoid straddling the midline, all
// tagged hemisphere "both". Returns the raw manifest path.
std::filesystem::path write_synthetic_raw_atlas(const std::filesystem::path& dir);

// Four stages in which pathology spreads from the hippocampus outward,
// faster on the right.
std::string synthetic_biomarker_csv();

}  // namespace atlaspaint
