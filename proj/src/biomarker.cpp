#include "atlaspaint/biomarker.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "atlaspaint/error.hpp"

namespace atlaspaint {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view text) {
  if (text.empty()) return std::nullopt;
  const char* first = text.data();
  if (text.front() == '+') ++first;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string format_number(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

struct Column {
  std::string name;
  std::vector<std::size_t> entries;
  bool suffixed = false;
};

Column resolve_column(std::string_view name, const AtlasManifest& manifest) {
  Column column{std::string(name), {}, false};
  std::string base(name);
  std::optional<Hemisphere> side;
  if (name.size() > 3 && name.ends_with("-lh")) {
    side = Hemisphere::Left;
  } else if (name.size() > 3 && name.ends_with("-rh")) {
    side = Hemisphere::Right;
  }
  if (side) {
    base = std::string(name.substr(0, name.size() - 3));
    column.suffixed = true;
  }
  for (std::size_t i = 0; i < manifest.regions.size(); ++i) {
    const RegionEntry& entry = manifest.regions[i];
    if (entry.base_name() != base) continue;
    if (side && entry.hemisphere != *side) continue;
    column.entries.push_back(i);
  }
  // A hemisphere-suffixed id that names an unsplit entry verbatim.
  if (column.entries.empty() && side) {
    if (auto idx = manifest.find(name); idx && manifest.regions[*idx].hemisphere == Hemisphere::Both) {
      column.entries.push_back(*idx);
    }
  }
  return column;
}

}  // namespace

std::optional<std::size_t> BiomarkerTable::stage_index(std::string_view label) const {
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (stages[i] == label) return i;
  }
  return std::nullopt;
}

std::string BiomarkerTable::debug_dump() const {
  std::string out(kStageHeader);
  for (const std::string& id : entry_ids) out += "," + id;
  out += "\n";
  for (std::size_t s = 0; s < stages.size(); ++s) {
    out += stages[s];
    for (double v : values[s]) out += "," + format_number(v);
    out += "\n";
  }
  return out;
}

BiomarkerTable parse_biomarker_csv(std::string_view text, const AtlasManifest& manifest,
                                   const CsvOptions& options) {
  if (options.K < 1) throw Error(ErrorCode::InvalidArgument, "K must be at least 1");
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::vector<std::pair<std::size_t, std::string_view>> lines;
  std::size_t line_no = 0;
  for (std::size_t pos = 0; pos <= text.size();) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string_view line = trim(text.substr(pos, end - pos));
    if (!line.empty()) lines.emplace_back(line_no, line);
    pos = end + 1;
  }
  if (lines.empty()) throw Error(ErrorCode::BadHeader, "CSV is empty");

  const auto header = split_cells(lines[0].second);
  if (header[0] != kStageHeader) {
    throw Error(ErrorCode::BadHeader,
                "first header cell must be '" + std::string(kStageHeader) + "', got '" + std::string(header[0]) + "'");
  }

  BiomarkerTable table;
  table.K = options.K;
  for (const RegionEntry& entry : manifest.regions) table.entry_ids.push_back(entry.region_id);

  std::vector<Column> columns;
  std::set<std::string_view> seen;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c].empty()) throw Error(ErrorCode::BadHeader, "header column " + std::to_string(c + 1) + " is empty");
    if (!seen.insert(header[c]).second) {
      throw Error(ErrorCode::BadHeader, "duplicate column '" + std::string(header[c]) + "'", std::string(header[c]));
    }
    Column column = resolve_column(header[c], manifest);
    if (column.entries.empty()) {
      if (options.strict) {
        throw Error(ErrorCode::UnknownRegion,
                    "column '" + column.name + "' does not match any region of atlas '" + manifest.atlas_id + "'",
                    column.name);
      }
      table.warnings.push_back("column '" + column.name + "' matches no region; ignored");
    }
    columns.push_back(std::move(column));
  }

  // Raw cells first so log normalization can see the whole table.
  std::vector<std::vector<double>> cells;
  std::set<std::string> labels;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto [number, line] = lines[r];
    const auto row = split_cells(line);
    if (row.size() != header.size()) {
      throw Error(ErrorCode::ParseError,
                  "CSV line " + std::to_string(number) + " has " + std::to_string(row.size()) +
                      " cells, header has " + std::to_string(header.size()),
                  "line " + std::to_string(number));
    }
    const std::string label(row[0]);
    if (label.empty()) throw Error(ErrorCode::ParseError, "CSV line " + std::to_string(number) + " has an empty stage label");
    if (label.find_first_of("/\\") != std::string::npos || label == "." || label == "..") {
      throw Error(ErrorCode::ParseError, "stage label '" + label + "' may not contain path separators", label);
    }
    if (!labels.insert(label).second) throw Error(ErrorCode::ParseError, "duplicate stage label '" + label + "'", label);
    table.stages.push_back(label);
    std::vector<double> values;
    for (std::size_t c = 1; c < row.size(); ++c) {
      auto value = parse_number(row[c]);
      if (!value) {
        throw Error(ErrorCode::NonNumericValue,
                    "CSV line " + std::to_string(number) + ", column '" + columns[c - 1].name + "': '" +
                        std::string(row[c]) + "' is not a number",
                    columns[c - 1].name);
      }
      values.push_back(*value);
    }
    cells.push_back(std::move(values));
  }
  if (table.stages.empty()) throw Error(ErrorCode::ParseError, "CSV has a header but no stage rows");

  if (options.log) {
    std::vector<double> flat;
    for (const auto& row : cells) flat.insert(flat.end(), row.begin(), row.end());
    for (std::size_t i = 0; i < flat.size(); ++i) {
      if (flat[i] < 0.0) {
        const std::size_t c = i % columns.size();
        throw Error(ErrorCode::NegativeValue,
                    "column '" + columns[c].name + "': negative value " + format_number(flat[i]) +
                        " cannot be log-transformed",
                    columns[c].name);
      }
    }
    const auto normalized = log_normalize(flat, options.log->fold_range, options.K, options.log->reference);
    std::size_t k = 0;
    for (auto& row : cells) {
      for (double& v : row) v = normalized[k++];
    }
  } else {
    for (std::size_t s = 0; s < cells.size(); ++s) {
      for (std::size_t c = 0; c < cells[s].size(); ++c) {
        double& v = cells[s][c];
        if (v >= 0.0 && v <= options.K) continue;
        const std::string where = "stage '" + table.stages[s] + "', column '" + columns[c].name + "'";
        if (options.strict) {
          throw Error(ErrorCode::OutOfRange,
                      where + ": value " + format_number(v) + " outside [0, " + std::to_string(options.K) + "]",
                      columns[c].name);
        }
        const double clamped = std::clamp(v, 0.0, static_cast<double>(options.K));
        table.warnings.push_back(where + ": value " + format_number(v) + " clamped to " + format_number(clamped));
        v = clamped;
      }
    }
  }

  table.values.assign(table.stages.size(), std::vector<double>(manifest.regions.size(), 0.0));
  for (bool suffixed_pass : {false, true}) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (columns[c].suffixed != suffixed_pass) continue;
      for (std::size_t s = 0; s < cells.size(); ++s) {
        for (std::size_t entry : columns[c].entries) table.values[s][entry] = cells[s][c];
      }
    }
  }
  return table;
}

std::vector<double> log_normalize(std::span<const double> raw, double fold_range, int K,
                                  std::optional<double> reference) {
  if (!(fold_range > 1.0)) throw Error(ErrorCode::InvalidArgument, "fold range must exceed 1");
  if (K < 1) throw Error(ErrorCode::InvalidArgument, "K must be at least 1");
  double ref = std::numeric_limits<double>::infinity();
  for (double x : raw) {
    if (x < 0.0 || std::isnan(x)) {
      throw Error(ErrorCode::NegativeValue, "log normalization needs non-negative inputs, got " + format_number(x));
    }
    if (x > 0.0) ref = std::min(ref, x);
  }
  if (reference) {
    if (!(*reference > 0.0)) throw Error(ErrorCode::InvalidArgument, "log reference must be positive");
    ref = *reference;
  }
  const double span = std::log10(fold_range);
  std::vector<double> out;
  out.reserve(raw.size());
  for (double x : raw) {
    if (x == 0.0) {
      out.push_back(0.0);
      continue;
    }
    const double ratio = x / ref;
    // Inputs at the fold bound (up to rounding of x / ref) saturate to exactly K.
    if (ratio >= fold_range * (1.0 - 1e-12)) {
      out.push_back(static_cast<double>(K));
      continue;
    }
    const double decades = std::clamp(std::log10(ratio), 0.0, span);
    out.push_back(K * decades / span);
  }
  return out;
}

std::vector<double> interpolate_stages(const BiomarkerTable& table, std::size_t i, std::size_t j, double t) {
  if (i >= table.stages.size() || j >= table.stages.size()) {
    throw Error(ErrorCode::UnknownStage, "stage index out of range");
  }
  const auto& a = table.values[i];
  const auto& b = table.values[j];
  std::vector<double> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto [lo, hi] = std::minmax(a[k], b[k]);
    out[k] = std::clamp((1.0 - t) * a[k] + t * b[k], lo, hi);
  }
  return out;
}

}  // namespace atlaspaint
