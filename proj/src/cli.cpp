#include "atlaspaint/cli.hpp"

#include <algorithm>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "atlaspaint/atlas.hpp"
#include "atlaspaint/compose.hpp"
#include "atlaspaint/config.hpp"
#include "atlaspaint/error.hpp"
#include "atlaspaint/mesh.hpp"
#include "atlaspaint/service.hpp"

namespace atlaspaint {

namespace {

struct RenderFlags {
  std::string config;
  std::string atlas;
  std::string input;
  std::string out;
  std::string views;
  std::string prefix;
  bool strict = false;
};

struct AnimateFlags {
  std::string view;
  int fpt = 0;
  int delay = -1;
  bool dither = false;
};

struct ServeFlags {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::vector<std::string> atlases;
  std::string spool;
  std::string cors_origin;
  std::string ui_dir;
  std::size_t queue_cap = 64;
  std::size_t csv_cap = 10 * 1024 * 1024;
  double retention_hours = 24.0;
};

void add_render_flags(CLI::App* cmd, RenderFlags& f) {
  cmd->add_option("--config", f.config, "JSON config file");
  cmd->add_option("--atlas", f.atlas, "Atlas manifest (overrides config)");
  cmd->add_option("--input", f.input, "Biomarker CSV (overrides config)");
  cmd->add_option("--out", f.out, "Output directory (overrides config)");
  cmd->add_option("--views", f.views, "Comma-separated view names (overrides config)");
  cmd->add_option("--prefix", f.prefix, "Output file name prefix (overrides config)");
  cmd->add_flag("--strict", f.strict, "Reject unknown CSV columns and out-of-range values");
}

std::string allowed_views() {
  std::string out;
  for (View v : all_views()) {
    if (!out.empty()) out += ", ";
    out += to_string(v);
  }
  return out;
}

View parse_view_flag(const std::string& name) {
  const auto view = view_from_string(name);
  if (!view) {
    throw Error(ErrorCode::ConfigError, "unknown view '" + name + "'; allowed: " + allowed_views(), "views");
  }
  return *view;
}

// Defaults, then the config file, then flags.
Config resolve_config(const RenderFlags& f) {
  Config config;
  if (!f.config.empty()) config = load_config(f.config);
  if (!f.atlas.empty()) config.atlas = f.atlas;
  if (!f.input.empty()) config.input_csv = f.input;
  if (!f.out.empty()) config.out_dir = f.out;
  if (!f.prefix.empty()) {
    if (f.prefix.find_first_of("/\\") != std::string::npos) {
      throw Error(ErrorCode::ConfigError, "prefix: must not contain path separators", "prefix");
    }
    config.prefix = f.prefix;
  }
  if (f.strict) config.strict = true;
  if (!f.views.empty()) {
    std::vector<View> views;
    std::stringstream list(f.views);
    for (std::string name; std::getline(list, name, ',');) {
      if (name.empty()) continue;
      const View v = parse_view_flag(name);
      if (std::find(views.begin(), views.end(), v) == views.end()) views.push_back(v);
    }
    if (views.empty()) throw Error(ErrorCode::ConfigError, "views: at least one view is required", "views");
    config.views = std::move(views);
  }
  if (!config.atlas) throw Error(ErrorCode::ConfigError, "atlas: required (config key or --atlas)", "atlas");
  if (!config.input_csv) throw Error(ErrorCode::ConfigError, "input_csv: required (config key or --input)", "input_csv");
  return config;
}

RenderJob load_job(const Config& config) {
  auto atlas = std::make_shared<const LoadedAtlas>(load_atlas(load_manifest(*config.atlas)));
  return make_job(config, std::move(atlas), read_file(*config.input_csv));
}

void print_warnings(const BiomarkerTable& table, std::ostream& err) {
  for (const std::string& w : table.warnings) err << "warning: " << w << '\n';
}

int cmd_render(const RenderFlags& f, std::ostream& out, std::ostream& err) {
  const Config config = resolve_config(f);
  const RenderJob job = load_job(config);
  print_warnings(job.table, err);
  const JobOutput result = render_job(job);
  for (const auto& path : result.files) out << path.string() << '\n';
  for (const ViewFailure& failure : result.failures) {
    err << "error: " << to_string(failure.code) << ": " << failure.message << '\n';
  }
  return result.failures.empty() ? kExitOk : kExitValidation;
}

int cmd_montage(const RenderFlags& f, std::optional<int> pad, std::ostream& out, std::ostream& err) {
  Config config = resolve_config(f);
  if (pad) {
    if (*pad < 0) throw Error(ErrorCode::ConfigError, "pad: must be non-negative", "pad");
    config.pad = *pad;
  }
  const RenderJob job = load_job(config);
  print_warnings(job.table, err);
  out << write_montage(job, config.pad).string() << '\n';
  return kExitOk;
}

int cmd_animate(const RenderFlags& f, const AnimateFlags& a, std::ostream& out, std::ostream& err) {
  Config config = resolve_config(f);
  if (!a.view.empty()) config.animation_view = parse_view_flag(a.view);
  if (a.fpt != 0) {
    if (a.fpt < 1) throw Error(ErrorCode::ConfigError, "fpt: must be at least 1", "frames_per_transition");
    config.frames_per_transition = a.fpt;
  }
  if (a.delay >= 0) {
    if (a.delay > 65535) throw Error(ErrorCode::ConfigError, "delay: must be at most 65535", "delay_cs");
    config.delay_cs = a.delay;
  }
  if (a.dither) config.dither = true;
  const RenderJob job = load_job(config);
  print_warnings(job.table, err);
  const View view = config.animation_view.value_or(config.views.front());
  const AnimationOptions options{config.frames_per_transition, config.delay_cs, config.dither};
  out << write_animation(job, view, options).string() << '\n';
  return kExitOk;
}

int cmd_validate(const RenderFlags& f, std::ostream& out, std::ostream& err) {
  const Config config = resolve_config(f);
  const RenderJob job = load_job(config);
  check_job(job);
  print_warnings(job.table, err);
  const AtlasManifest& manifest = job.atlas->manifest;
  int status = kExitOk;
  for (View v : job.views) {
    if (!view_supported(manifest, v)) {
      err << "error: UnsupportedView: view " << to_string(v) << " is not available for hollow atlas '"
          << manifest.atlas_id << "'\n";
      status = kExitValidation;
    }
  }
  out << "atlas: " << manifest.atlas_id << " (" << manifest.regions.size() << " regions)\n";
  out << "regions:";
  for (const RegionEntry& r : manifest.regions) out << ' ' << r.region_id;
  out << "\nstages (" << job.table.stage_count() << "):";
  for (const std::string& s : job.table.stages) out << ' ' << s;
  out << "\nviews:";
  for (View v : job.views) out << ' ' << to_string(v);
  out << "\nresolution: " << job.width << 'x' << job.height << "\ncolors: " << config.colors.size()
      << " anchors (K=" << job.gradient.K() << ")\n";
  out << "warnings: " << job.table.warnings.size() << '\n';
  out << (status == kExitOk ? "ok\n" : "invalid\n");
  return status;
}

int cmd_prep(const std::string& raw, const std::string& manifest, const std::string& out_dir, std::ostream& out,
             std::ostream& err) {
  const PrepResult result = prep_atlas(raw, manifest, out_dir);
  for (const std::string& w : result.warnings) err << "warning: " << w << '\n';
  out << result.manifest_path.string() << " (" << result.manifest.regions.size() << " regions)\n";
  return kExitOk;
}

int cmd_serve(const ServeFlags& f, std::ostream& out, std::ostream& err) {
  ServiceOptions options;
  if (!f.spool.empty()) options.spool_dir = f.spool;
  options.cors_origin = f.cors_origin;
  if (!f.ui_dir.empty()) options.ui_dir = f.ui_dir;
  options.queue_cap = f.queue_cap;
  options.csv_cap = f.csv_cap;
  options.retention = std::chrono::seconds(static_cast<long long>(f.retention_hours * 3600.0));
  RenderService service(options);
  for (const std::string& manifest : f.atlases) {
    service.register_manifest(manifest);
    out << "registered " << manifest << '\n';
  }
  out << "listening on http://" << f.host << ':' << f.port << '\n' << std::flush;
  if (!service.listen(f.host, f.port)) {
    err << "error: cannot listen on " << f.host << ':' << f.port << '\n';
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Render brain-atlas regions colored by biomarker values", "atlaspaint"};
  app.require_subcommand(1);

  std::string raw_dir, raw_manifest, prep_out;
  auto* prep = app.add_subcommand("prep-atlas", "Normalize, split and export a raw atlas");
  prep->add_option("--raw", raw_dir, "Directory of the raw meshes")->required();
  prep->add_option("--manifest", raw_manifest, "Raw atlas manifest")->required();
  prep->add_option("--out", prep_out, "Output directory")->required();

  RenderFlags render_flags;
  auto* render = app.add_subcommand("render", "One PNG per stage and view");
  add_render_flags(render, render_flags);

  RenderFlags montage_flags;
  std::optional<int> pad;
  auto* montage = app.add_subcommand("montage", "Stage x view grid as one PNG");
  add_render_flags(montage, montage_flags);
  montage->add_option("--pad", pad, "Pixels between and around cells");

  RenderFlags animate_flags;
  AnimateFlags animate_extra;
  auto* animate = app.add_subcommand("animate", "GIF through every stage");
  add_render_flags(animate, animate_flags);
  animate->add_option("--view", animate_extra.view, "View to animate");
  animate->add_option("--fpt", animate_extra.fpt, "Frames per stage transition");
  animate->add_option("--delay", animate_extra.delay, "Frame delay in centiseconds");
  animate->add_flag("--dither", animate_extra.dither, "Ordered dithering before palette lookup");

  RenderFlags validate_flags;
  auto* validate = app.add_subcommand("validate", "Check config, CSV and atlas without rendering");
  add_render_flags(validate, validate_flags);

  ServeFlags serve_flags;
  auto* serve = app.add_subcommand("serve", "Run the HTTP render service");
  serve->add_option("--port", serve_flags.port, "TCP port")->check(CLI::Range(0, 65535));
  serve->add_option("--host", serve_flags.host, "Bind address");
  serve->add_option("--atlas", serve_flags.atlases, "Atlas manifest to register (repeatable)");
  serve->add_option("--spool", serve_flags.spool, "Directory for job outputs");
  serve->add_option("--cors-origin", serve_flags.cors_origin, "Origin allowed to call the API");
  serve->add_option("--ui-dir", serve_flags.ui_dir, "Static web UI bundle served from /");
  serve->add_option("--queue-cap", serve_flags.queue_cap, "Maximum queued plus running jobs");
  serve->add_option("--csv-cap", serve_flags.csv_cap, "Maximum CSV size in bytes");
  serve->add_option("--retention-hours", serve_flags.retention_hours, "Age after which finished jobs are removed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*prep) return cmd_prep(raw_dir, raw_manifest, prep_out, out, err);
    if (*render) return cmd_render(render_flags, out, err);
    if (*montage) return cmd_montage(montage_flags, pad, out, err);
    if (*animate) return cmd_animate(animate_flags, animate_extra, out, err);
    if (*validate) return cmd_validate(validate_flags, out, err);
    if (*serve) return cmd_serve(serve_flags, out, err);
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return is_io_error(e.code()) ? kExitIo : kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace atlaspaint
