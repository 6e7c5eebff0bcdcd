#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "atlaspaint/atlas.hpp"

namespace atlaspaint {

inline constexpr std::string_view kStageHeader = "Image-name-unique";

// Stage x manifest-entry matrix of values in [0, K]. Columns are the manifest
// entries in manifest order, so a (region, hemisphere) pair is one column.
struct BiomarkerTable {
  std::vector<std::string> stages;
  std::vector<std::string> entry_ids;
  std::vector<std::vector<double>> values;  // values[stage][entry]
  int K = 1;
  std::vector<std::string> warnings;

  std::optional<std::size_t> stage_index(std::string_view label) const;
  std::size_t stage_count() const { return stages.size(); }

  // CSV rendering of the resolved table, one suffixed column per entry.
  std::string debug_dump() const;
};

struct LogTransform {
  double fold_range = 1000.0;
  // Value mapped to 0; defaults to the smallest positive value in the table.
  std::optional<double> reference;
};

struct CsvOptions {
  int K = 3;
  bool strict = false;
  std::optional<LogTransform> log;
};

// Header: `Image-name-unique,<region>[-lh|-rh],...`; one stage per row.
// Unsuffixed columns apply to every hemisphere of that region, suffixed ones
// to a single hemisphere and win over unsuffixed ones. Absent regions are 0.
BiomarkerTable parse_biomarker_csv(std::string_view text, const AtlasManifest& manifest,
                                   const CsvOptions& options);

// K * clamp(log10(x / ref), 0, log10(fold_range)) / log10(fold_range).
// Zeros map to 0. ref defaults to the smallest positive input.
std::vector<double> log_normalize(std::span<const double> raw, double fold_range, int K,
                                  std::optional<double> reference = std::nullopt);

// (1 - t) * stage i + t * stage j, per entry.
std::vector<double> interpolate_stages(const BiomarkerTable& table, std::size_t i, std::size_t j, double t);

}  // namespace atlaspaint
