#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "atlaspaint/biomarker.hpp"
#include "atlaspaint/compose.hpp"
#include "atlaspaint/renderer.hpp"

namespace atlaspaint {

enum class OutputMode { Images, Montage, Animation };

std::string_view to_string(OutputMode mode);

// Declarative render settings; see docs/config.md. Paths are absolute once
// loaded (relative entries resolve against the config file's directory).
struct Config {
  // Manifest path for the CLI, a registered atlas id for the service.
  std::optional<std::string> atlas;
  std::optional<std::filesystem::path> input_csv;
  std::vector<std::string> colors = kDefaultGradientHex;
  std::vector<View> views = {View::CorticalOuterRight, View::Subcortical, View::Top};
  int width = 1200;
  int height = 900;
  double shell_alpha = 0.0;
  bool log_transform = false;
  double log_fold_range = 1000.0;
  std::optional<double> log_ref;
  std::string background = "#FFFFFF";
  std::filesystem::path out_dir = "out";
  bool strict = false;
  std::string prefix = "render";
  OutputMode mode = OutputMode::Images;
  int pad = 8;
  // Animation view; the first entry of `views` when unset.
  std::optional<View> animation_view;
  int frames_per_transition = 4;
  int delay_cs = 50;
  bool dither = false;
};

struct ConfigParseOptions {
  // Relative paths resolve against this directory.
  std::filesystem::path base_dir;
  // Service submissions may not name server-side files.
  bool allow_paths = true;
};

// Throws Error(ConfigError) whose context is the offending key path, e.g.
// `colors[0]` or `resolution`.
Config parse_config(std::string_view json_text, const ConfigParseOptions& options = {});
Config load_config(const std::filesystem::path& path);
std::string config_to_json(const Config& config);

ColorGradient config_gradient(const Config& config);
CsvOptions config_csv_options(const Config& config);

// Parses the CSV against the atlas with the config's gradient and log
// settings and assembles the job. CSV errors keep their own error codes.
RenderJob make_job(const Config& config, std::shared_ptr<const LoadedAtlas> atlas, std::string_view csv_text);

}  // namespace atlaspaint
