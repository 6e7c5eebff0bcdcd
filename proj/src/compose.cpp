#include "atlaspaint/compose.hpp"

#include <algorithm>
#include <system_error>

#include "atlaspaint/gif.hpp"
#include "atlaspaint/mesh.hpp"
#include "atlaspaint/parallel.hpp"
#include "atlaspaint/png.hpp"

namespace atlaspaint {

namespace {

enum class Side { Left, Right, Both };

Side view_side(View view) {
  switch (view) {
    case View::CorticalOuterLeft:
    case View::CorticalInnerLeft:
      return Side::Left;
    case View::CorticalOuterRight:
    case View::CorticalInnerRight:
      return Side::Right;
    default:
      return Side::Both;
  }
}

bool side_admits(Side side, Hemisphere h) {
  switch (side) {
    case Side::Left:
      return h != Hemisphere::Right;
    case Side::Right:
      return h != Hemisphere::Left;
    case Side::Both:
      return true;
  }
  return true;
}

unsigned resolve_threads(unsigned threads) { return threads == 0 ? worker_count() : threads; }

void ensure_dir(const std::filesystem::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + dir.string() + "': " + ec.message(), dir.string());
}

std::string stage_context(const RenderJob& job, std::size_t stage, View view) {
  return "stage '" + job.table.stages[stage] + "', view " + std::string(to_string(view));
}

}  // namespace

void check_job(const RenderJob& job) {
  if (!job.atlas) throw Error(ErrorCode::InvalidArgument, "render job has no atlas");
  if (job.views.empty()) throw Error(ErrorCode::InvalidArgument, "render job has no views");
  if (job.width < kMinResolution || job.height < kMinResolution) {
    throw Error(ErrorCode::InvalidArgument, "resolution must be at least 16x16");
  }
  if (job.table.stage_count() == 0) throw Error(ErrorCode::InvalidArgument, "render job has no stages");
  if (job.table.K != job.gradient.K()) {
    throw Error(ErrorCode::InvalidArgument, "table K=" + std::to_string(job.table.K) +
                                                " does not match the gradient (K=" + std::to_string(job.gradient.K()) + ")");
  }
  const auto& regions = job.atlas->manifest.regions;
  if (job.table.entry_ids.size() != regions.size()) {
    throw Error(ErrorCode::InvalidArgument, "table columns do not match the atlas entries");
  }
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (job.table.entry_ids[i] != regions[i].region_id) {
      throw Error(ErrorCode::InvalidArgument, "table entry '" + job.table.entry_ids[i] + "' is not atlas entry '" +
                                                  regions[i].region_id + "'");
    }
  }
  if (!(job.shell_alpha >= 0.0 && job.shell_alpha <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "shell_alpha must lie in [0, 1]");
  }
}

bool view_supported(const AtlasManifest& manifest, View view) { return !(manifest.hollow && is_inner_view(view)); }

std::vector<View> supported_views(const AtlasManifest& manifest) {
  std::vector<View> out;
  for (View v : all_views()) {
    if (view_supported(manifest, v)) out.push_back(v);
  }
  return out;
}

std::vector<SceneItem> build_scene(const RenderJob& job, std::span<const double> values, View view) {
  const LoadedAtlas& atlas = *job.atlas;
  if (!view_supported(atlas.manifest, view)) {
    throw Error(ErrorCode::UnsupportedView,
                "view " + std::string(to_string(view)) + " is not available for hollow atlas '" +
                    atlas.manifest.atlas_id + "'",
                std::string(to_string(view)));
  }
  if (values.size() != atlas.manifest.regions.size()) {
    throw Error(ErrorCode::InvalidArgument, "expected one value per atlas entry");
  }
  const Side side = view_side(view);
  std::vector<SceneItem> items;
  for (std::size_t i = 0; i < atlas.manifest.regions.size(); ++i) {
    const RegionEntry& entry = atlas.manifest.regions[i];
    if (!side_admits(side, entry.hemisphere)) continue;
    double alpha = 1.0;
    if (view == View::Subcortical && entry.structure_class == StructureClass::Cortical) {
      if (job.shell_alpha <= 0.0) continue;
      alpha = job.shell_alpha;
    }
    Rgb color;
    try {
      color = value_to_color(values[i], job.gradient);
    } catch (const Error& e) {
      throw e.annotated("region '" + entry.region_id + "'");
    }
    items.push_back({atlas.meshes[i], Material{color, alpha}});
  }
  return items;
}

std::vector<SceneItem> build_scene(const RenderJob& job, std::string_view stage, View view) {
  const auto index = job.table.stage_index(stage);
  if (!index) throw Error(ErrorCode::UnknownStage, "unknown stage '" + std::string(stage) + "'", std::string(stage));
  return build_scene(job, job.table.values[*index], view);
}

Camera job_camera(const RenderJob& job, View view) {
  return fit_aspect(named_view_camera(view, job.atlas->bounds), job.width, job.height);
}

Framebuffer render_values(const RenderJob& job, std::span<const double> values, View view, unsigned threads) {
  const std::vector<SceneItem> items = build_scene(job, values, view);
  RenderOptions options;
  options.threads = threads;
  return render_scene(items, job_camera(job, view), job.width, job.height, job.background, options);
}

Framebuffer render_stage(const RenderJob& job, std::size_t stage, View view, unsigned threads) {
  if (stage >= job.table.stage_count()) throw Error(ErrorCode::UnknownStage, "stage index out of range");
  return render_values(job, job.table.values[stage], view, threads);
}

std::string output_name(std::string_view prefix, std::string_view stage, View view) {
  std::string name(prefix);
  name += '_';
  name += stage;
  name += '_';
  name += to_string(view);
  name += ".png";
  return name;
}

JobOutput render_job(const RenderJob& job) {
  check_job(job);
  JobOutput output;
  std::vector<View> views;
  for (View v : job.views) {
    if (view_supported(job.atlas->manifest, v)) {
      views.push_back(v);
    } else {
      output.failures.push_back({v, ErrorCode::UnsupportedView,
                                 "view " + std::string(to_string(v)) + " is not available for hollow atlas '" +
                                     job.atlas->manifest.atlas_id + "'"});
    }
  }
  ensure_dir(job.out_dir);

  const std::size_t cells = job.table.stage_count() * views.size();
  std::vector<std::filesystem::path> paths(cells);
  parallel_for(cells, resolve_threads(job.threads), [&](std::size_t c) {
    const std::size_t stage = c / views.size();
    const View view = views[c % views.size()];
    try {
      const Framebuffer fb = render_stage(job, stage, view, 1);
      paths[c] = job.out_dir / output_name(job.prefix, job.table.stages[stage], view);
      write_png(to_image(fb), paths[c]);
    } catch (const Error& e) {
      throw e.annotated(stage_context(job, stage, view));
    }
  });
  output.files = std::move(paths);
  return output;
}

Image render_montage(const RenderJob& job, int pad) {
  check_job(job);
  if (pad < 0) throw Error(ErrorCode::InvalidArgument, "montage padding must be non-negative");
  const int cols = static_cast<int>(job.table.stage_count());
  const int rows = static_cast<int>(job.views.size());
  const long long total_w = static_cast<long long>(cols) * job.width + static_cast<long long>(cols + 1) * pad;
  const long long total_h = static_cast<long long>(rows) * job.height + static_cast<long long>(rows + 1) * pad;
  if (total_w > 65535 || total_h > 65535) throw Error(ErrorCode::InvalidArgument, "montage would be too large");

  std::vector<Image> cells(static_cast<std::size_t>(rows) * cols);
  parallel_for(cells.size(), resolve_threads(job.threads), [&](std::size_t c) {
    const std::size_t stage = c % cols;
    const View view = job.views[c / cols];
    try {
      cells[c] = to_image(render_stage(job, stage, view, 1));
    } catch (const Error& e) {
      throw e.annotated(stage_context(job, stage, view));
    }
  });

  const std::array<std::uint8_t, 4> bg = encode_srgb8(Rgba{static_cast<float>(job.background.r),
                                                           static_cast<float>(job.background.g),
                                                           static_cast<float>(job.background.b), 1.0f});
  Image montage(static_cast<int>(total_w), static_cast<int>(total_h), bg);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      blit(cells[static_cast<std::size_t>(r) * cols + c], montage, pad + c * (job.width + pad),
           pad + r * (job.height + pad));
    }
  }
  return montage;
}

std::filesystem::path write_montage(const RenderJob& job, int pad) {
  const Image montage = render_montage(job, pad);
  ensure_dir(job.out_dir);
  const std::filesystem::path path = job.out_dir / (job.prefix + "_montage.png");
  write_png(montage, path);
  return path;
}

std::vector<Framebuffer> animation_frames(const RenderJob& job, View view, int frames_per_transition) {
  check_job(job);
  const std::size_t stages = job.table.stage_count();
  if (stages < 2) {
    throw Error(ErrorCode::TooFewStages, "animation needs at least 2 stages, got " + std::to_string(stages));
  }
  if (frames_per_transition < 1) throw Error(ErrorCode::InvalidArgument, "frames per transition must be at least 1");
  const std::size_t fpt = static_cast<std::size_t>(frames_per_transition);
  const std::size_t count = (stages - 1) * fpt + 1;

  std::vector<std::optional<Framebuffer>> frames(count);
  parallel_for(count, resolve_threads(job.threads), [&](std::size_t k) {
    const std::size_t i = std::min(k / fpt, stages - 2);
    const double t = static_cast<double>(k - i * fpt) / static_cast<double>(fpt);
    try {
      frames[k] = render_values(job, interpolate_stages(job.table, i, i + 1, t), view, 1);
    } catch (const Error& e) {
      throw e.annotated("frame " + std::to_string(k) + ", view " + std::string(to_string(view)));
    }
  });
  std::vector<Framebuffer> out;
  out.reserve(count);
  for (auto& f : frames) out.push_back(std::move(*f));
  return out;
}

std::string encode_animation(const RenderJob& job, View view, const AnimationOptions& options) {
  if (options.delay_cs < 0 || options.delay_cs > 65535) {
    throw Error(ErrorCode::InvalidArgument, "delay must lie in [0, 65535] centiseconds");
  }
  const std::vector<Framebuffer> frames = animation_frames(job, view, options.frames_per_transition);
  std::vector<Image> images;
  images.reserve(frames.size());
  for (const Framebuffer& fb : frames) images.push_back(to_image(fb));
  GifOptions gif;
  gif.delay_cs = static_cast<std::uint16_t>(options.delay_cs);
  gif.dither = options.dither;
  return encode_gif(images, gif);
}

std::filesystem::path write_animation(const RenderJob& job, View view, const AnimationOptions& options) {
  const std::string bytes = encode_animation(job, view, options);
  ensure_dir(job.out_dir);
  const std::filesystem::path path = job.out_dir / (job.prefix + "_" + std::string(to_string(view)) + ".gif");
  write_file(path, bytes);
  return path;
}

}  // namespace atlaspaint
