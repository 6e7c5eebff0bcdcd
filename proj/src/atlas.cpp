#include "atlaspaint/atlas.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "atlaspaint/error.hpp"
#include "atlaspaint/parallel.hpp"
#include "json.hpp"

namespace atlaspaint {

using nlohmann::json;

std::string_view to_string(Hemisphere h) {
  switch (h) {
    case Hemisphere::Left: return "left";
    case Hemisphere::Right: return "right";
    case Hemisphere::Both: return "both";
  }
  return "both";
}

std::string_view to_string(StructureClass c) {
  return c == StructureClass::Cortical ? "cortical" : "subcortical";
}

std::string RegionEntry::base_name() const {
  auto strip = [&](std::string_view suffix) {
    if (region_id.size() > suffix.size() && region_id.ends_with(suffix)) {
      return region_id.substr(0, region_id.size() - suffix.size());
    }
    return region_id;
  };
  if (hemisphere == Hemisphere::Left) return strip("-lh");
  if (hemisphere == Hemisphere::Right) return strip("-rh");
  return region_id;
}

std::filesystem::path AtlasManifest::resolve(const RegionEntry& entry) const {
  if (entry.mesh_path.is_absolute()) return entry.mesh_path;
  return base_dir / entry.mesh_path;
}

std::optional<std::size_t> AtlasManifest::find(std::string_view region_id) const {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (regions[i].region_id == region_id) return i;
  }
  return std::nullopt;
}

namespace {

Error manifest_error(const std::string& key, const std::string& what) {
  return Error(ErrorCode::ParseError, "manifest " + key + ": " + what, key);
}

Affine3 parse_affine(const json& value, const std::string& key) {
  if (!value.is_array() || value.size() != 12) throw manifest_error(key, "expected an array of 12 numbers");
  Affine3 t;
  for (std::size_t i = 0; i < 12; ++i) {
    if (!value[i].is_number()) throw manifest_error(key + "[" + std::to_string(i) + "]", "expected a number");
    t.m[i] = value[i].get<double>();
  }
  if (!(std::abs(t.determinant()) > kSingularDeterminant)) {
    throw Error(ErrorCode::SingularTransform, "manifest " + key + ": linear part is singular", key);
  }
  return t;
}

const json& require(const json& object, const char* name, const std::string& key) {
  auto it = object.find(name);
  if (it == object.end()) throw manifest_error(key + "." + name, "missing required key");
  return *it;
}

std::string require_string(const json& object, const char* name, const std::string& key) {
  const json& value = require(object, name, key);
  if (!value.is_string()) throw manifest_error(key + "." + name, "expected a string");
  return value.get<std::string>();
}

json affine_to_json(const Affine3& t) { return json(t.m); }

}  // namespace

AtlasManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir, bool check_meshes) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw manifest_error("$", "expected a JSON object");

  AtlasManifest manifest;
  manifest.base_dir = base_dir;
  manifest.atlas_id = require_string(doc, "atlas_id", "$");
  if (manifest.atlas_id.empty()) throw manifest_error("atlas_id", "must not be empty");
  if (auto it = doc.find("global_transform"); it != doc.end()) {
    manifest.global_transform = parse_affine(*it, "global_transform");
  }
  if (auto it = doc.find("hollow"); it != doc.end()) {
    if (!it->is_boolean()) throw manifest_error("hollow", "expected a boolean");
    manifest.hollow = it->get<bool>();
  }
  const json& regions = require(doc, "regions", "$");
  if (!regions.is_array()) throw manifest_error("regions", "expected an array");

  std::set<std::string> ids;
  std::set<std::pair<std::string, Hemisphere>> keys;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const std::string key = "regions[" + std::to_string(i) + "]";
    const json& r = regions[i];
    if (!r.is_object()) throw manifest_error(key, "expected an object");
    RegionEntry entry;
    entry.region_id = require_string(r, "region_id", key);
    if (entry.region_id.empty()) throw manifest_error(key + ".region_id", "must not be empty");
    entry.mesh_path = require_string(r, "mesh_path", key);

    const std::string hemi = require_string(r, "hemisphere", key);
    if (hemi == "left") {
      entry.hemisphere = Hemisphere::Left;
    } else if (hemi == "right") {
      entry.hemisphere = Hemisphere::Right;
    } else if (hemi == "both") {
      entry.hemisphere = Hemisphere::Both;
    } else {
      throw manifest_error(key + ".hemisphere", "expected left, right or both, got '" + hemi + "'");
    }

    const std::string cls = require_string(r, "structure_class", key);
    if (cls == "cortical") {
      entry.structure_class = StructureClass::Cortical;
    } else if (cls == "subcortical") {
      entry.structure_class = StructureClass::Subcortical;
    } else {
      throw manifest_error(key + ".structure_class", "expected cortical or subcortical, got '" + cls + "'");
    }

    if (auto it = r.find("local_transform"); it != r.end() && !it->is_null()) {
      entry.local_transform = parse_affine(*it, key + ".local_transform");
    }

    if (!ids.insert(entry.region_id).second) {
      throw Error(ErrorCode::DuplicateRegion, "duplicate region_id '" + entry.region_id + "'", entry.region_id);
    }
    if (!keys.emplace(entry.base_name(), entry.hemisphere).second) {
      throw Error(ErrorCode::DuplicateRegion,
                  "region '" + entry.base_name() + "' has more than one " +
                      std::string(to_string(entry.hemisphere)) + " entry",
                  entry.region_id);
    }
    if (check_meshes) {
      const auto resolved = manifest.resolve(entry);
      std::error_code ec;
      if (!std::filesystem::is_regular_file(resolved, ec)) {
        throw Error(ErrorCode::MissingMesh,
                    "mesh for region '" + entry.region_id + "' not found: " + resolved.string(),
                    resolved.string());
      }
    }
    manifest.regions.push_back(std::move(entry));
  }
  return manifest;
}

AtlasManifest load_manifest(const std::filesystem::path& path,
                            const std::optional<std::filesystem::path>& mesh_root) {
  const std::string text = read_file(path);
  const auto base = mesh_root ? *mesh_root : path.parent_path();
  return parse_manifest(text, base, true);
}

std::string manifest_to_json(const AtlasManifest& manifest) {
  json doc;
  doc["atlas_id"] = manifest.atlas_id;
  doc["global_transform"] = affine_to_json(manifest.global_transform);
  if (manifest.hollow) doc["hollow"] = true;
  json regions = json::array();
  for (const RegionEntry& r : manifest.regions) {
    json entry;
    entry["region_id"] = r.region_id;
    entry["mesh_path"] = r.mesh_path.generic_string();
    entry["hemisphere"] = std::string(to_string(r.hemisphere));
    entry["structure_class"] = std::string(to_string(r.structure_class));
    if (r.local_transform) entry["local_transform"] = affine_to_json(*r.local_transform);
    regions.push_back(std::move(entry));
  }
  doc["regions"] = std::move(regions);
  return doc.dump(2) + "\n";
}

Mesh apply_transform(Mesh mesh, const Affine3& transform) {
  // inverse() rejects singular transforms before anything is modified.
  const Affine3 inv = transform.inverse();
  for (Vec3& v : mesh.vertices) v = transform.apply_point(v);
  if (mesh.normals) {
    for (Vec3& n : *mesh.normals) {
      // Multiply by (A^-1)^T: row i of the result uses column i of A^-1.
      const Vec3 t{inv.linear(0, 0) * n.x + inv.linear(1, 0) * n.y + inv.linear(2, 0) * n.z,
                   inv.linear(0, 1) * n.x + inv.linear(1, 1) * n.y + inv.linear(2, 1) * n.z,
                   inv.linear(0, 2) * n.x + inv.linear(1, 2) * n.y + inv.linear(2, 2) * n.z};
      n = normalized(t);
    }
  }
  return mesh;
}

HemisphereSplit split_hemispheres(const Mesh& mesh, double midline_x) {
  const std::size_t n_original = mesh.vertices.size();
  const bool with_normals = mesh.normals.has_value() && mesh.normals->size() == n_original;

  // Vertex ids: [0, n_original) are input vertices, the rest are plane
  // intersections in creation order, shared by both halves and by every
  // triangle using the same cut edge.
  std::vector<Vec3> cut_points;
  std::vector<Vec3> cut_normals;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> cut_ids;

  auto offset = [&](std::uint32_t id) { return mesh.vertices[id].x - midline_x; };

  auto cut_vertex = [&](std::uint32_t a, std::uint32_t b) -> std::uint32_t {
    if (a > b) std::swap(a, b);
    auto [it, inserted] = cut_ids.try_emplace({a, b}, 0);
    if (!inserted) return it->second;
    const double da = offset(a);
    const double db = offset(b);
    const double t = da / (da - db);
    const Vec3& pa = mesh.vertices[a];
    const Vec3& pb = mesh.vertices[b];
    Vec3 p = pa + (pb - pa) * t;
    p.x = midline_x;
    cut_points.push_back(p);
    if (with_normals) {
      const Vec3& na = (*mesh.normals)[a];
      const Vec3& nb = (*mesh.normals)[b];
      cut_normals.push_back(normalized(na + (nb - na) * t));
    }
    it->second = static_cast<std::uint32_t>(n_original + cut_points.size() - 1);
    return it->second;
  };

  std::vector<Triangle> left_tris;
  std::vector<Triangle> right_tris;

  // Sutherland-Hodgman against one halfspace; sign = -1 keeps x <= midline,
  // +1 keeps x >= midline. Crossings are only emitted for strict sign changes
  // so on-plane vertices are never duplicated.
  auto clip = [&](const Triangle& tri, double sign, std::vector<Triangle>& out) {
    std::uint32_t poly[4];
    int n = 0;
    for (int i = 0; i < 3; ++i) {
      const std::uint32_t a = tri[i];
      const std::uint32_t b = tri[(i + 1) % 3];
      const double da = sign * offset(a);
      const double db = sign * offset(b);
      if (da >= 0.0) poly[n++] = a;
      if ((da > 0.0 && db < 0.0) || (da < 0.0 && db > 0.0)) poly[n++] = cut_vertex(a, b);
    }
    for (int k = 2; k < n; ++k) out.push_back({poly[0], poly[k - 1], poly[k]});
  };

  for (const Triangle& tri : mesh.triangles) {
    const double d0 = offset(tri[0]);
    const double d1 = offset(tri[1]);
    const double d2 = offset(tri[2]);
    const double lo = std::min({d0, d1, d2});
    const double hi = std::max({d0, d1, d2});
    if (hi <= 0.0) {
      left_tris.push_back(tri);
    } else if (lo >= 0.0) {
      right_tris.push_back(tri);
    } else {
      clip(tri, -1.0, left_tris);
      clip(tri, 1.0, right_tris);
    }
  }

  auto build = [&](const std::vector<Triangle>& tris) {
    const std::size_t total = n_original + cut_points.size();
    std::vector<std::uint32_t> remap(total, UINT32_MAX);
    for (const Triangle& t : tris) {
      for (std::uint32_t id : t) remap[id] = 0;
    }
    Mesh out;
    if (with_normals) out.normals.emplace();
    for (std::size_t id = 0; id < total; ++id) {
      if (remap[id] == UINT32_MAX) continue;
      remap[id] = static_cast<std::uint32_t>(out.vertices.size());
      if (id < n_original) {
        out.vertices.push_back(mesh.vertices[id]);
        if (with_normals) out.normals->push_back((*mesh.normals)[id]);
      } else {
        out.vertices.push_back(cut_points[id - n_original]);
        if (with_normals) out.normals->push_back(cut_normals[id - n_original]);
      }
    }
    out.triangles.reserve(tris.size());
    for (const Triangle& t : tris) out.triangles.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
    return out;
  };

  return {build(left_tris), build(right_tris)};
}

PrepResult prep_atlas(const std::filesystem::path& raw_dir, const std::filesystem::path& manifest_in,
                      const std::filesystem::path& out_dir) {
  const AtlasManifest raw = load_manifest(manifest_in, raw_dir);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + out_dir.string() + "': " + ec.message());

  struct RegionOutput {
    std::optional<RegionEntry> left;
    std::optional<RegionEntry> right;
    std::vector<std::string> warnings;
  };
  std::vector<RegionOutput> outputs(raw.regions.size());

  parallel_for(raw.regions.size(), worker_count(), [&](std::size_t i) {
    const RegionEntry& entry = raw.regions[i];
    try {
      Mesh mesh = read_ply_file(raw.resolve(entry));
      validate(mesh);
      Affine3 transform = raw.global_transform;
      if (entry.local_transform) transform = compose(transform, *entry.local_transform);
      mesh = compute_vertex_normals(apply_transform(std::move(mesh), transform));

      HemisphereSplit halves;
      if (entry.hemisphere == Hemisphere::Left) {
        halves.left = std::move(mesh);
      } else if (entry.hemisphere == Hemisphere::Right) {
        halves.right = std::move(mesh);
      } else {
        halves = split_hemispheres(mesh, 0.0);
      }

      const std::string base = entry.base_name();
      auto emit = [&](const Mesh& half, Hemisphere side, const char* suffix) -> std::optional<RegionEntry> {
        const std::string id = base + suffix;
        const std::string file = id + ".ply";
        if (entry.hemisphere == Hemisphere::Both || entry.hemisphere == side) {
          write_ply_file(out_dir / file, half, PlyFormat::BinaryLittleEndian);
        }
        if (half.empty()) {
          if (entry.hemisphere == Hemisphere::Both) {
            outputs[i].warnings.push_back("region '" + base + "' has no geometry in the " +
                                          std::string(to_string(side)) + " hemisphere; entry '" + id +
                                          "' omitted");
          }
          return std::nullopt;
        }
        return RegionEntry{id, file, side, entry.structure_class, std::nullopt};
      };
      outputs[i].left = emit(halves.left, Hemisphere::Left, "-lh");
      outputs[i].right = emit(halves.right, Hemisphere::Right, "-rh");
    } catch (const Error& e) {
      throw e.annotated("region '" + entry.region_id + "'");
    }
  });

  PrepResult result;
  result.manifest.atlas_id = raw.atlas_id;
  result.manifest.hollow = raw.hollow;
  result.manifest.base_dir = out_dir;
  for (RegionOutput& out : outputs) {
    if (out.left) result.manifest.regions.push_back(std::move(*out.left));
    if (out.right) result.manifest.regions.push_back(std::move(*out.right));
    for (std::string& w : out.warnings) result.warnings.push_back(std::move(w));
  }
  result.manifest_path = out_dir / "manifest.json";
  write_file(result.manifest_path, manifest_to_json(result.manifest));
  return result;
}

LoadedAtlas load_atlas(AtlasManifest manifest) {
  LoadedAtlas atlas;
  atlas.meshes.resize(manifest.regions.size());
  parallel_for(manifest.regions.size(), worker_count(), [&](std::size_t i) {
    const RegionEntry& entry = manifest.regions[i];
    try {
      Mesh mesh = read_ply_file(manifest.resolve(entry));
      validate(mesh);
      Affine3 transform = manifest.global_transform;
      if (entry.local_transform) transform = compose(transform, *entry.local_transform);
      if (!transform.is_identity()) mesh = apply_transform(std::move(mesh), transform);
      atlas.meshes[i] = std::make_shared<const Mesh>(compute_vertex_normals(std::move(mesh)));
    } catch (const Error& e) {
      throw e.annotated("region '" + entry.region_id + "'");
    }
  });
  for (const auto& mesh : atlas.meshes) atlas.bounds.extend(bounds(*mesh));
  atlas.manifest = std::move(manifest);
  return atlas;
}

}  // namespace atlaspaint
