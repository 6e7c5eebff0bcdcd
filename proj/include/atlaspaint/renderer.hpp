#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "atlaspaint/colormap.hpp"
#include "atlaspaint/geometry.hpp"
#include "atlaspaint/mesh.hpp"

namespace atlaspaint {

enum class View {
  CorticalOuterLeft,
  CorticalOuterRight,
  CorticalInnerLeft,
  CorticalInnerRight,
  Subcortical,
  Top,
  Bottom,
};

std::string_view to_string(View view);
// Accepts the canonical names ("cortical-outer-right") and the short forms
// ("outer-right").
std::optional<View> view_from_string(std::string_view name);
const std::vector<View>& all_views();
bool is_inner_view(View view);

// Orthographic camera. `right` = forward x up; camera space is measured from
// `eye` along (right, up, forward).
struct Camera {
  Vec3 eye;
  Vec3 forward{0, 0, -1};
  Vec3 up{0, 1, 0};
  Vec3 right{1, 0, 0};
  double half_width = 1.0;
  double half_height = 1.0;
  double near = 0.0;
  double far = 1.0;
};

inline constexpr double kViewMargin = 0.05;

// Fits `bounds` with a 5% margin on each side. Throws Error(EmptyScene).
Camera named_view_camera(View view, const Bounds3& bounds);

// Grows the smaller half-extent so the frustum matches width:height.
Camera fit_aspect(Camera camera, int width, int height);

struct ScreenPoint {
  double x = 0.0;  // pixels, left to right
  double y = 0.0;  // pixels, top to bottom
  double depth = 0.0;
};

ScreenPoint project_vertex(const Vec3& p, const Camera& camera, int width, int height);

struct Rgba {
  float r = 0.0f;
  float g = 0.0f;
  float b = 0.0f;
  float a = 1.0f;

  bool operator==(const Rgba&) const = default;
};

// Linear-RGB color plus depth, rows top-down; depth starts at +infinity.
class Framebuffer {
 public:
  Framebuffer(int width, int height, const Rgb& background = {1.0, 1.0, 1.0});

  int width() const { return width_; }
  int height() const { return height_; }
  Rgba& color(int x, int y) { return color_[index(x, y)]; }
  const Rgba& color(int x, int y) const { return color_[index(x, y)]; }
  float& depth(int x, int y) { return depth_[index(x, y)]; }
  float depth(int x, int y) const { return depth_[index(x, y)]; }
  std::span<const Rgba> pixels() const { return color_; }

  bool operator==(const Framebuffer& o) const {
    return width_ == o.width_ && height_ == o.height_ && color_ == o.color_;
  }

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<Rgba> color_;
  std::vector<float> depth_;
};

// Fixed-point screen grid with 510 units per pixel; pixel (i, j) has its
// center at (510 i + 255, 510 j + 255). X coordinates snap to even units
// placed symmetrically about the viewport center (for even widths), so no
// vertical edge passes through a pixel center and mirrored geometry snaps to
// mirrored positions. Y snaps to the nearest unit.
inline constexpr std::int64_t kGridUnitsPerPixel = 510;

std::int64_t snap_x(double x, int width);
std::int64_t snap_y(double y);

// Invokes `fragment(x, y, depth)` for every pixel center covered by the
// triangle, rows in [row_begin, row_end). Pixel centers on an edge belong to
// the triangle whose interior lies directly below the edge (or, for vertical
// edges, to its right), so triangles sharing an edge cover each pixel once.
using FragmentFn = std::function<void(int x, int y, double depth)>;
void rasterize_coverage(const std::array<ScreenPoint, 3>& tri, int width, int height, int row_begin, int row_end,
                        const FragmentFn& fragment);

// Opaque fill with a strictly-less depth test.
void rasterize_triangle(const std::array<ScreenPoint, 3>& tri, const Rgb& color, Framebuffer& fb);

struct Material {
  Rgb base_color;
  double alpha = 1.0;  // 1 = opaque
};

inline constexpr double kAmbient = 0.35;
inline constexpr double kDiffuse = 0.65;

// Two-sided headlight: base * (ambient + diffuse * |n . -forward|), clamped.
Rgb shade(const Rgb& base, const Vec3& normal, const Camera& camera);

struct SceneItem {
  std::shared_ptr<const Mesh> mesh;
  Material material;
};

struct RenderOptions {
  // 0 = worker_count().
  unsigned threads = 0;
};

// Opaque items through the z-buffer with flat shading, then translucent items
// back-to-front by centroid depth, blended over without writing depth.
Framebuffer render_scene(std::span<const SceneItem> items, const Camera& camera, int width, int height,
                         const Rgb& background, const RenderOptions& options = {});

}  // namespace atlaspaint
