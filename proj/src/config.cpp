#include "atlaspaint/config.hpp"

#include <cmath>
#include <set>

#include "json.hpp"

#include "atlaspaint/error.hpp"
#include "atlaspaint/mesh.hpp"

namespace atlaspaint {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& key, const std::string& reason) {
  throw Error(ErrorCode::ConfigError, (key.empty() ? std::string("config") : key) + ": " + reason, key);
}

std::string allowed_views() {
  std::string out;
  for (View v : all_views()) {
    if (!out.empty()) out += ", ";
    out += to_string(v);
  }
  return out;
}

const std::string& as_string(const json& value, const std::string& key) {
  if (!value.is_string()) fail(key, "expected a string");
  return value.get_ref<const std::string&>();
}

double as_number(const json& value, const std::string& key) {
  if (!value.is_number()) fail(key, "expected a number");
  const double v = value.get<double>();
  if (!std::isfinite(v)) fail(key, "expected a finite number");
  return v;
}

long long as_integer(const json& value, const std::string& key) {
  if (value.is_number_integer()) return value.get<long long>();
  if (value.is_number_float()) {
    const double v = value.get<double>();
    if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) return static_cast<long long>(v);
  }
  fail(key, "expected an integer");
}

bool as_bool(const json& value, const std::string& key) {
  if (!value.is_boolean()) fail(key, "expected true or false");
  return value.get<bool>();
}

View as_view(const json& value, const std::string& key) {
  const std::string& name = as_string(value, key);
  const auto view = view_from_string(name);
  if (!view) fail(key, "unknown view '" + name + "'; allowed: " + allowed_views());
  return *view;
}

std::filesystem::path as_path(const json& value, const std::string& key, const ConfigParseOptions& options) {
  if (!options.allow_paths) fail(key, "file paths are not accepted here");
  const std::string& text = as_string(value, key);
  if (text.empty()) fail(key, "path is empty");
  std::filesystem::path p(text);
  if (p.is_relative() && !options.base_dir.empty()) p = options.base_dir / p;
  return p.lexically_normal();
}

}  // namespace

std::string_view to_string(OutputMode mode) {
  switch (mode) {
    case OutputMode::Images:
      return "images";
    case OutputMode::Montage:
      return "montage";
    case OutputMode::Animation:
      return "animation";
  }
  return "images";
}

Config parse_config(std::string_view json_text, const ConfigParseOptions& options) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail("", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) fail("", "expected a JSON object");

  Config config;
  for (const auto& [key, value] : root.items()) {
    if (key == "atlas") {
      if (options.allow_paths) {
        config.atlas = as_path(value, key, options).string();
      } else {
        const std::string& id = as_string(value, key);
        if (id.empty()) fail(key, "atlas id is empty");
        config.atlas = id;
      }
    } else if (key == "input_csv") {
      config.input_csv = as_path(value, key, options);
    } else if (key == "out_dir") {
      config.out_dir = as_path(value, key, options);
    } else if (key == "colors") {
      if (!value.is_array()) fail(key, "expected an array of #RRGGBB strings");
      if (value.size() < 2) fail(key, "at least 2 colors are required");
      config.colors.clear();
      for (std::size_t i = 0; i < value.size(); ++i) {
        const std::string item_key = key + "[" + std::to_string(i) + "]";
        const std::string& hex = as_string(value[i], item_key);
        try {
          parse_hex_color(hex);
        } catch (const Error& e) {
          fail(item_key, e.what());
        }
        config.colors.push_back(hex);
      }
    } else if (key == "views") {
      if (!value.is_array()) fail(key, "expected an array of view names");
      if (value.empty()) fail(key, "at least one view is required");
      config.views.clear();
      std::set<View> seen;
      for (std::size_t i = 0; i < value.size(); ++i) {
        const std::string item_key = key + "[" + std::to_string(i) + "]";
        const View v = as_view(value[i], item_key);
        if (!seen.insert(v).second) fail(item_key, "duplicate view '" + std::string(to_string(v)) + "'");
        config.views.push_back(v);
      }
    } else if (key == "resolution") {
      if (!value.is_array() || value.size() != 2) fail(key, "expected [width, height]");
      long long dims[2];
      for (std::size_t i = 0; i < 2; ++i) {
        const std::string item_key = key + "[" + std::to_string(i) + "]";
        dims[i] = as_integer(value[i], item_key);
        if (dims[i] < kMinResolution || dims[i] > 16384) fail(item_key, "must lie in [16, 16384]");
      }
      config.width = static_cast<int>(dims[0]);
      config.height = static_cast<int>(dims[1]);
    } else if (key == "shell_alpha") {
      config.shell_alpha = as_number(value, key);
      if (config.shell_alpha < 0.0 || config.shell_alpha > 1.0) fail(key, "must lie in [0, 1]");
    } else if (key == "log_transform") {
      config.log_transform = as_bool(value, key);
    } else if (key == "log_fold_range") {
      config.log_fold_range = as_number(value, key);
      if (!(config.log_fold_range > 1.0)) fail(key, "must be greater than 1");
    } else if (key == "log_ref") {
      if (value.is_null()) {
        config.log_ref.reset();
        continue;
      }
      config.log_ref = as_number(value, key);
      if (!(*config.log_ref > 0.0)) fail(key, "must be positive");
    } else if (key == "background") {
      const std::string& hex = as_string(value, key);
      try {
        parse_hex_color(hex);
      } catch (const Error& e) {
        fail(key, e.what());
      }
      config.background = hex;
    } else if (key == "strict") {
      config.strict = as_bool(value, key);
    } else if (key == "prefix") {
      const std::string& prefix = as_string(value, key);
      if (prefix.empty() || prefix.find_first_of("/\\") != std::string::npos || prefix == "." || prefix == "..") {
        fail(key, "must be a non-empty file name prefix without path separators");
      }
      config.prefix = prefix;
    } else if (key == "mode") {
      const std::string& mode = as_string(value, key);
      if (mode == "images") {
        config.mode = OutputMode::Images;
      } else if (mode == "montage") {
        config.mode = OutputMode::Montage;
      } else if (mode == "animation") {
        config.mode = OutputMode::Animation;
      } else {
        fail(key, "unknown mode '" + mode + "'; allowed: images, montage, animation");
      }
    } else if (key == "pad") {
      const long long pad = as_integer(value, key);
      if (pad < 0 || pad > 1024) fail(key, "must lie in [0, 1024]");
      config.pad = static_cast<int>(pad);
    } else if (key == "animation_view") {
      config.animation_view = as_view(value, key);
    } else if (key == "frames_per_transition") {
      const long long fpt = as_integer(value, key);
      if (fpt < 1 || fpt > 1000) fail(key, "must lie in [1, 1000]");
      config.frames_per_transition = static_cast<int>(fpt);
    } else if (key == "delay_cs") {
      const long long delay = as_integer(value, key);
      if (delay < 0 || delay > 65535) fail(key, "must lie in [0, 65535]");
      config.delay_cs = static_cast<int>(delay);
    } else if (key == "dither") {
      config.dither = as_bool(value, key);
    } else {
      fail(key, "unknown key");
    }
  }
  return config;
}

Config load_config(const std::filesystem::path& path) {
  ConfigParseOptions options;
  options.base_dir = path.parent_path();
  if (options.base_dir.empty()) options.base_dir = ".";
  return parse_config(read_file(path), options);
}

std::string config_to_json(const Config& config) {
  json j;
  if (config.atlas) j["atlas"] = *config.atlas;
  if (config.input_csv) j["input_csv"] = config.input_csv->string();
  j["colors"] = config.colors;
  json views = json::array();
  for (View v : config.views) views.push_back(std::string(to_string(v)));
  j["views"] = views;
  j["resolution"] = {config.width, config.height};
  j["shell_alpha"] = config.shell_alpha;
  j["log_transform"] = config.log_transform;
  j["log_fold_range"] = config.log_fold_range;
  if (config.log_ref) j["log_ref"] = *config.log_ref;
  j["background"] = config.background;
  j["out_dir"] = config.out_dir.string();
  j["strict"] = config.strict;
  j["prefix"] = config.prefix;
  j["mode"] = std::string(to_string(config.mode));
  j["pad"] = config.pad;
  if (config.animation_view) j["animation_view"] = std::string(to_string(*config.animation_view));
  j["frames_per_transition"] = config.frames_per_transition;
  j["delay_cs"] = config.delay_cs;
  j["dither"] = config.dither;
  return j.dump(2);
}

ColorGradient config_gradient(const Config& config) {
  try {
    return ColorGradient::from_hex(config.colors);
  } catch (const Error& e) {
    fail("colors", e.what());
  }
}

CsvOptions config_csv_options(const Config& config) {
  CsvOptions options;
  options.K = static_cast<int>(config.colors.size()) - 1;
  options.strict = config.strict;
  if (config.log_transform) options.log = LogTransform{config.log_fold_range, config.log_ref};
  return options;
}

RenderJob make_job(const Config& config, std::shared_ptr<const LoadedAtlas> atlas, std::string_view csv_text) {
  if (!atlas) throw Error(ErrorCode::InvalidArgument, "no atlas loaded");
  RenderJob job;
  job.gradient = config_gradient(config);
  job.table = parse_biomarker_csv(csv_text, atlas->manifest, config_csv_options(config));
  job.atlas = std::move(atlas);
  job.views = config.views;
  job.width = config.width;
  job.height = config.height;
  job.shell_alpha = config.shell_alpha;
  job.background = parse_hex_color(config.background);
  job.out_dir = config.out_dir;
  job.prefix = config.prefix;
  return job;
}

}  // namespace atlaspaint
