#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "atlaspaint/atlas.hpp"
#include "atlaspaint/biomarker.hpp"
#include "atlaspaint/colormap.hpp"
#include "atlaspaint/error.hpp"
#include "atlaspaint/image.hpp"
#include "atlaspaint/renderer.hpp"

namespace atlaspaint {

inline constexpr int kMinResolution = 16;

struct RenderJob {
  std::shared_ptr<const LoadedAtlas> atlas;
  BiomarkerTable table;
  ColorGradient gradient = ColorGradient::default_gradient();
  std::vector<View> views;
  int width = 1200;
  int height = 900;
  // Opacity of the cortical shell in the subcortical view; 0 hides it.
  double shell_alpha = 0.0;
  Rgb background{1.0, 1.0, 1.0};
  std::filesystem::path out_dir;
  std::string prefix = "render";
  // Worker cap for cells and frames; 0 = worker_count().
  unsigned threads = 0;
};

// Throws Error(InvalidArgument) describing the first broken invariant.
void check_job(const RenderJob& job);

bool view_supported(const AtlasManifest& manifest, View view);
std::vector<View> supported_views(const AtlasManifest& manifest);

// Meshes and materials for one view, colored from per-entry values (manifest
// order). Throws Error(UnsupportedView) for inner views of a hollow atlas.
std::vector<SceneItem> build_scene(const RenderJob& job, std::span<const double> values, View view);
// Throws Error(UnknownStage) when `stage` is not a table row.
std::vector<SceneItem> build_scene(const RenderJob& job, std::string_view stage, View view);

// Framed on the whole atlas so every view of every stage shares one scale.
Camera job_camera(const RenderJob& job, View view);

Framebuffer render_values(const RenderJob& job, std::span<const double> values, View view, unsigned threads = 0);
Framebuffer render_stage(const RenderJob& job, std::size_t stage, View view, unsigned threads = 0);

// `<prefix>_<stage>_<view>.png`
std::string output_name(std::string_view prefix, std::string_view stage, View view);

struct ViewFailure {
  View view;
  ErrorCode code;
  std::string message;
};

struct JobOutput {
  std::vector<std::filesystem::path> files;  // stage-major, then view order
  std::vector<ViewFailure> failures;
};

// One PNG per (stage, view) into job.out_dir. A view that cannot be rendered
// produces no file and is reported in `failures`; the other views still render.
JobOutput render_job(const RenderJob& job);

// Rows are views, columns are stages; `pad` pixels of background around and
// between the cells.
Image render_montage(const RenderJob& job, int pad);
std::filesystem::path write_montage(const RenderJob& job, int pad);

// (S - 1) * frames_per_transition + 1 frames; frame k blends the values of
// the stages around it linearly.
std::vector<Framebuffer> animation_frames(const RenderJob& job, View view, int frames_per_transition);

struct AnimationOptions {
  int frames_per_transition = 4;
  int delay_cs = 50;
  bool dither = false;
};

std::string encode_animation(const RenderJob& job, View view, const AnimationOptions& options);
// Writes `<prefix>_<view>.gif` into job.out_dir.
std::filesystem::path write_animation(const RenderJob& job, View view, const AnimationOptions& options);

}  // namespace atlaspaint
