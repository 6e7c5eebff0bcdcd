#include "atlaspaint/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "atlaspaint/error.hpp"
#include "atlaspaint/parallel.hpp"

namespace atlaspaint {

namespace {

struct ViewPose {
  View view;
  std::string_view name;
  std::string_view short_name;
  Vec3 forward;
  Vec3 up;
};

constexpr ViewPose kPoses[] = {
    {View::CorticalOuterLeft, "cortical-outer-left", "outer-left", {1, 0, 0}, {0, 0, 1}},
    {View::CorticalOuterRight, "cortical-outer-right", "outer-right", {-1, 0, 0}, {0, 0, 1}},
    {View::CorticalInnerLeft, "cortical-inner-left", "inner-left", {-1, 0, 0}, {0, 0, 1}},
    {View::CorticalInnerRight, "cortical-inner-right", "inner-right", {1, 0, 0}, {0, 0, 1}},
    {View::Subcortical, "subcortical", "subcortical", {-1, 0, 0}, {0, 0, 1}},
    {View::Top, "top", "top", {0, 0, -1}, {0, 1, 0}},
    {View::Bottom, "bottom", "bottom", {0, 0, 1}, {0, 1, 0}},
};

const ViewPose& pose(View view) {
  for (const ViewPose& p : kPoses) {
    if (p.view == view) return p;
  }
  return kPoses[0];
}

// Fixed-point grid: 510 units per pixel. Vertex x lands on even units (1/255
// pixel), pixel centers (510 i + 255) on odd units, so a vertical edge never
// passes through a pixel center.
constexpr std::int64_t kUnitsPerPixel = kGridUnitsPerPixel;
constexpr std::int64_t kHalfPixel = kUnitsPerPixel / 2;
// Beyond this many pixels from the viewport, triangles are clipped first so
// edge functions stay within 64-bit range.
constexpr double kGuardPixels = 1 << 19;
constexpr double kClipMarginPixels = 4096.0;

struct FixedVertex {
  std::int64_t x = 0;
  std::int64_t y = 0;
  double depth = 0.0;
};

// Screen vertex with x measured from the viewport center.
struct CenteredPoint {
  double xc = 0.0;
  double y = 0.0;
  double depth = 0.0;
};

std::int64_t snap_centered_x(double xc, int width) {
  if (width % 2 == 0) return kHalfPixel * width + 2 * std::llround(kHalfPixel * xc);
  return 2 * std::llround(kHalfPixel * (xc + 0.5 * width));
}

std::int64_t snap_y_units(double y) { return std::llround(static_cast<double>(kUnitsPerPixel) * y); }

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

struct Edge {
  std::int64_t ax, ay;
  std::int64_t step_x;  // dE/dx per unit
  std::int64_t step_y;  // dE/dy per unit
  std::int64_t bias;    // 0 if the edge owns its on-edge pixels, else -1

  std::int64_t at(std::int64_t px, std::int64_t py) const { return step_y * (py - ay) + step_x * (px - ax); }
};

Edge make_edge(const FixedVertex& a, const FixedVertex& b) {
  Edge e{a.x, a.y, -(b.y - a.y), b.x - a.x, 0};
  // Owned when the interior lies directly below (top edge), or to the right
  // for a vertical edge.
  const bool owned = e.step_y > 0 || (e.step_y == 0 && e.step_x > 0);
  e.bias = owned ? 0 : -1;
  return e;
}

template <typename Fn>
void cover_fixed(FixedVertex v0, FixedVertex v1, FixedVertex v2, int width, int row_begin, int row_end, Fn&& fn) {
  std::int64_t area = (v1.x - v0.x) * (v2.y - v0.y) - (v1.y - v0.y) * (v2.x - v0.x);
  if (area == 0) return;
  if (area < 0) {
    std::swap(v1, v2);
    area = -area;
  }
  const std::int64_t min_x = std::min({v0.x, v1.x, v2.x});
  const std::int64_t max_x = std::max({v0.x, v1.x, v2.x});
  const std::int64_t min_y = std::min({v0.y, v1.y, v2.y});
  const std::int64_t max_y = std::max({v0.y, v1.y, v2.y});
  const std::int64_t col_lo = std::max<std::int64_t>(0, ceil_div(min_x - kHalfPixel, kUnitsPerPixel));
  const std::int64_t col_hi = std::min<std::int64_t>(width - 1, floor_div(max_x - kHalfPixel, kUnitsPerPixel));
  const std::int64_t row_lo = std::max<std::int64_t>(row_begin, ceil_div(min_y - kHalfPixel, kUnitsPerPixel));
  const std::int64_t row_hi = std::min<std::int64_t>(row_end - 1, floor_div(max_y - kHalfPixel, kUnitsPerPixel));
  if (col_lo > col_hi || row_lo > row_hi) return;

  // Edge k is opposite vertex k, so its value is vertex k's barycentric weight.
  const Edge e0 = make_edge(v1, v2);
  const Edge e1 = make_edge(v2, v0);
  const Edge e2 = make_edge(v0, v1);
  const double inv_area = 1.0 / static_cast<double>(area);
  const std::int64_t dx0 = e0.step_x * kUnitsPerPixel;
  const std::int64_t dx1 = e1.step_x * kUnitsPerPixel;
  const std::int64_t dx2 = e2.step_x * kUnitsPerPixel;

  for (std::int64_t row = row_lo; row <= row_hi; ++row) {
    const std::int64_t py = row * kUnitsPerPixel + kHalfPixel;
    const std::int64_t px = col_lo * kUnitsPerPixel + kHalfPixel;
    std::int64_t w0 = e0.at(px, py);
    std::int64_t w1 = e1.at(px, py);
    std::int64_t w2 = e2.at(px, py);
    for (std::int64_t col = col_lo; col <= col_hi; ++col, w0 += dx0, w1 += dx1, w2 += dx2) {
      if (w0 + e0.bias < 0 || w1 + e1.bias < 0 || w2 + e2.bias < 0) continue;
      // Sum in a canonical order so the result does not depend on vertex
      // order (mirrored triangles interpolate bit-identical depths).
      std::pair<double, double> terms[3] = {
          {v0.depth, static_cast<double>(w0)}, {v1.depth, static_cast<double>(w1)}, {v2.depth, static_cast<double>(w2)}};
      std::sort(std::begin(terms), std::end(terms));
      const double depth =
          (terms[0].first * terms[0].second + terms[1].first * terms[1].second + terms[2].first * terms[2].second) *
          inv_area;
      fn(static_cast<int>(col), static_cast<int>(row), depth);
    }
  }
}

// Clips a polygon to an axis-aligned rectangle; depth is affine in screen
// space under orthographic projection, so linear interpolation is exact.
std::vector<CenteredPoint> clip_to_rect(std::vector<CenteredPoint> poly, double x_lo, double x_hi, double y_lo,
                                        double y_hi) {
  auto clip_axis = [](const std::vector<CenteredPoint>& in, auto coord, double limit, bool keep_below) {
    std::vector<CenteredPoint> out;
    for (std::size_t i = 0; i < in.size(); ++i) {
      const CenteredPoint& a = in[i];
      const CenteredPoint& b = in[(i + 1) % in.size()];
      const double da = keep_below ? limit - coord(a) : coord(a) - limit;
      const double db = keep_below ? limit - coord(b) : coord(b) - limit;
      if (da >= 0) out.push_back(a);
      if ((da > 0 && db < 0) || (da < 0 && db > 0)) {
        const double t = da / (da - db);
        out.push_back({a.xc + (b.xc - a.xc) * t, a.y + (b.y - a.y) * t, a.depth + (b.depth - a.depth) * t});
      }
    }
    return out;
  };
  auto cx = [](const CenteredPoint& p) { return p.xc; };
  auto cy = [](const CenteredPoint& p) { return p.y; };
  poly = clip_axis(poly, cx, x_lo, false);
  if (!poly.empty()) poly = clip_axis(poly, cx, x_hi, true);
  if (!poly.empty()) poly = clip_axis(poly, cy, y_lo, false);
  if (!poly.empty()) poly = clip_axis(poly, cy, y_hi, true);
  return poly;
}

bool finite(const CenteredPoint& p) { return std::isfinite(p.xc) && std::isfinite(p.y) && std::isfinite(p.depth); }

// Snaps a triangle to the fixed grid, clipping first when it reaches far
// outside the viewport. Calls `emit` once per resulting fixed triangle.
template <typename Emit>
void snap_triangle(const std::array<CenteredPoint, 3>& tri, int width, int height, Emit&& emit) {
  for (const CenteredPoint& p : tri) {
    if (!finite(p)) return;
  }
  auto snap = [&](const CenteredPoint& p) { return FixedVertex{snap_centered_x(p.xc, width), snap_y_units(p.y), p.depth}; };
  const bool inside_guard = std::all_of(tri.begin(), tri.end(), [&](const CenteredPoint& p) {
    return std::abs(p.xc) <= kGuardPixels && std::abs(p.y) <= kGuardPixels;
  });
  if (inside_guard) {
    emit(snap(tri[0]), snap(tri[1]), snap(tri[2]));
    return;
  }
  const double half_w = 0.5 * width;
  const auto poly = clip_to_rect({tri.begin(), tri.end()}, -half_w - kClipMarginPixels, half_w + kClipMarginPixels,
                                 -kClipMarginPixels, height + kClipMarginPixels);
  for (std::size_t k = 2; k < poly.size(); ++k) emit(snap(poly[0]), snap(poly[k - 1]), snap(poly[k]));
}

void check_dimensions(int width, int height) {
  constexpr int kMaxDimension = 16384;
  if (width < 1 || height < 1 || width > kMaxDimension || height > kMaxDimension) {
    throw Error(ErrorCode::InvalidArgument,
                "image dimensions " + std::to_string(width) + "x" + std::to_string(height) + " out of range");
  }
}

}  // namespace

std::string_view to_string(View view) { return pose(view).name; }

std::optional<View> view_from_string(std::string_view name) {
  for (const ViewPose& p : kPoses) {
    if (p.name == name || p.short_name == name) return p.view;
  }
  return std::nullopt;
}

const std::vector<View>& all_views() {
  static const std::vector<View> views = {View::CorticalOuterLeft, View::CorticalOuterRight, View::CorticalInnerLeft,
                                          View::CorticalInnerRight, View::Subcortical,       View::Top,
                                          View::Bottom};
  return views;
}

bool is_inner_view(View view) { return view == View::CorticalInnerLeft || view == View::CorticalInnerRight; }

Camera named_view_camera(View view, const Bounds3& scene) {
  if (scene.empty()) throw Error(ErrorCode::EmptyScene, "cannot frame an empty scene");
  const ViewPose& p = pose(view);
  Camera cam;
  cam.forward = p.forward;
  cam.up = p.up;
  cam.right = cross(p.forward, p.up);

  const Vec3 size = scene.size();
  auto extent_along = [&](const Vec3& axis) {
    return std::abs(axis.x) * size.x + std::abs(axis.y) * size.y + std::abs(axis.z) * size.z;
  };
  double half_w = 0.5 * extent_along(cam.right) * (1.0 + kViewMargin);
  double half_h = 0.5 * extent_along(cam.up) * (1.0 + kViewMargin);
  // Degenerate extents (flat or point scenes) borrow the other axis.
  if (!(half_w > 0.0)) half_w = half_h > 0.0 ? half_h : 0.5;
  if (!(half_h > 0.0)) half_h = half_w;
  cam.half_width = half_w;
  cam.half_height = half_h;

  const double half_depth = 0.5 * extent_along(cam.forward);
  const double distance = half_depth * (1.0 + 2.0 * kViewMargin) + 1.0;
  cam.eye = scene.center() - cam.forward * distance;
  cam.near = 0.0;
  cam.far = 2.0 * distance;
  return cam;
}

Camera fit_aspect(Camera camera, int width, int height) {
  check_dimensions(width, height);
  const double target = static_cast<double>(width) / height;
  if (camera.half_width / camera.half_height < target) {
    camera.half_width = camera.half_height * target;
  } else {
    camera.half_height = camera.half_width / target;
  }
  return camera;
}

ScreenPoint project_vertex(const Vec3& p, const Camera& cam, int width, int height) {
  const Vec3 d = p - cam.eye;
  const double cx = dot(d, cam.right);
  const double cy = dot(d, cam.up);
  return {(cx / cam.half_width * 0.5 + 0.5) * width, (0.5 - cy / cam.half_height * 0.5) * height, dot(d, cam.forward)};
}

Framebuffer::Framebuffer(int width, int height, const Rgb& background) : width_(width), height_(height) {
  check_dimensions(width, height);
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  color_.assign(n, Rgba{static_cast<float>(background.r), static_cast<float>(background.g),
                        static_cast<float>(background.b), 1.0f});
  depth_.assign(n, std::numeric_limits<float>::infinity());
}

std::int64_t snap_x(double x, int width) { return snap_centered_x(x - 0.5 * width, width); }

std::int64_t snap_y(double y) { return snap_y_units(y); }

void rasterize_coverage(const std::array<ScreenPoint, 3>& tri, int width, int height, int row_begin, int row_end,
                        const FragmentFn& fragment) {
  row_begin = std::max(row_begin, 0);
  row_end = std::min(row_end, height);
  if (row_begin >= row_end || width < 1) return;
  std::array<CenteredPoint, 3> centered;
  for (int i = 0; i < 3; ++i) centered[i] = {tri[i].x - 0.5 * width, tri[i].y, tri[i].depth};
  snap_triangle(centered, width, height, [&](const FixedVertex& a, const FixedVertex& b, const FixedVertex& c) {
    cover_fixed(a, b, c, width, row_begin, row_end, fragment);
  });
}

void rasterize_triangle(const std::array<ScreenPoint, 3>& tri, const Rgb& color, Framebuffer& fb) {
  const Rgba rgba{static_cast<float>(color.r), static_cast<float>(color.g), static_cast<float>(color.b), 1.0f};
  rasterize_coverage(tri, fb.width(), fb.height(), 0, fb.height(), [&](int x, int y, double depth) {
    const float d = static_cast<float>(depth);
    if (d < fb.depth(x, y)) {
      fb.depth(x, y) = d;
      fb.color(x, y) = rgba;
    }
  });
}

Rgb shade(const Rgb& base, const Vec3& normal, const Camera& camera) {
  const double intensity = kAmbient + kDiffuse * std::abs(dot(normal, -camera.forward));
  auto channel = [&](double c) { return std::clamp(c * intensity, 0.0, 1.0); };
  return {channel(base.r), channel(base.g), channel(base.b)};
}

Framebuffer render_scene(std::span<const SceneItem> items, const Camera& cam, int width, int height,
                         const Rgb& background, const RenderOptions& options) {
  Framebuffer fb(width, height, background);

  struct Prepared {
    FixedVertex v[3];
    Rgba color;
    double alpha = 1.0;
    double sort_depth = 0.0;
    std::int64_t min_y = 0;
    std::int64_t max_y = 0;
  };
  std::vector<Prepared> opaque;
  std::vector<Prepared> translucent;

  const double scale_x = width / (2.0 * cam.half_width);
  const double scale_y = height / (2.0 * cam.half_height);
  std::vector<CenteredPoint> projected;

  for (const SceneItem& item : items) {
    if (!item.mesh) continue;
    const double alpha = std::clamp(item.material.alpha, 0.0, 1.0);
    if (alpha <= 0.0) continue;
    const Mesh& mesh = *item.mesh;
    projected.resize(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      const Vec3 d = mesh.vertices[i] - cam.eye;
      projected[i] = {dot(d, cam.right) * scale_x, 0.5 * height - dot(d, cam.up) * scale_y, dot(d, cam.forward)};
    }
    auto& target = alpha < 1.0 ? translucent : opaque;
    for (const Triangle& t : mesh.triangles) {
      const Vec3& a = mesh.vertices[t[0]];
      const Vec3 normal = normalized(cross(mesh.vertices[t[1]] - a, mesh.vertices[t[2]] - a));
      const Rgb c = shade(item.material.base_color, normal, cam);
      const Rgba rgba{static_cast<float>(c.r), static_cast<float>(c.g), static_cast<float>(c.b), 1.0f};
      const double centroid = (projected[t[0]].depth + projected[t[1]].depth + projected[t[2]].depth) / 3.0;
      snap_triangle({projected[t[0]], projected[t[1]], projected[t[2]]}, width, height,
                    [&](const FixedVertex& p0, const FixedVertex& p1, const FixedVertex& p2) {
                      Prepared prep{{p0, p1, p2}, rgba, alpha, centroid, 0, 0};
                      prep.min_y = std::min({p0.y, p1.y, p2.y});
                      prep.max_y = std::max({p0.y, p1.y, p2.y});
                      target.push_back(prep);
                    });
    }
  }
  std::stable_sort(translucent.begin(), translucent.end(),
                   [](const Prepared& a, const Prepared& b) { return a.sort_depth > b.sort_depth; });

  const double near = cam.near;
  const double far = cam.far;
  const unsigned threads = options.threads == 0 ? worker_count() : options.threads;
  const std::size_t bands = std::clamp<std::size_t>(threads, 1, static_cast<std::size_t>(height));

  // Each band owns a disjoint set of rows and replays the full triangle list
  // in the same order, so the result is independent of the band count.
  parallel_for(bands, threads, [&](std::size_t band) {
    const int row_begin = static_cast<int>(band * height / bands);
    const int row_end = static_cast<int>((band + 1) * height / bands);
    const std::int64_t band_lo = static_cast<std::int64_t>(row_begin) * kUnitsPerPixel;
    const std::int64_t band_hi = static_cast<std::int64_t>(row_end) * kUnitsPerPixel;
    auto overlaps = [&](const Prepared& p) { return p.max_y >= band_lo && p.min_y <= band_hi; };

    for (const Prepared& p : opaque) {
      if (!overlaps(p)) continue;
      cover_fixed(p.v[0], p.v[1], p.v[2], width, row_begin, row_end, [&](int x, int y, double depth) {
        if (depth < near || depth > far) return;
        const float d = static_cast<float>(depth);
        if (d < fb.depth(x, y)) {
          fb.depth(x, y) = d;
          fb.color(x, y) = p.color;
        }
      });
    }
    for (const Prepared& p : translucent) {
      if (!overlaps(p)) continue;
      const double a = p.alpha;
      cover_fixed(p.v[0], p.v[1], p.v[2], width, row_begin, row_end, [&](int x, int y, double depth) {
        if (depth < near || depth > far) return;
        if (!(static_cast<float>(depth) < fb.depth(x, y))) return;
        Rgba& dst = fb.color(x, y);
        dst.r = static_cast<float>(p.color.r * a + dst.r * (1.0 - a));
        dst.g = static_cast<float>(p.color.g * a + dst.g * (1.0 - a));
        dst.b = static_cast<float>(p.color.b * a + dst.b * (1.0 - a));
        dst.a = static_cast<float>(a + dst.a * (1.0 - a));
      });
    }
  });
  return fb;
}

}  // namespace atlaspaint
