#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "atlaspaint/error.hpp"
#include "atlaspaint/mesh.hpp"

namespace atlaspaint {

namespace {

enum class ScalarType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::optional<ScalarType> scalar_type_from_name(std::string_view name) {
  if (name == "char" || name == "int8") return ScalarType::Int8;
  if (name == "uchar" || name == "uint8") return ScalarType::UInt8;
  if (name == "short" || name == "int16") return ScalarType::Int16;
  if (name == "ushort" || name == "uint16") return ScalarType::UInt16;
  if (name == "int" || name == "int32") return ScalarType::Int32;
  if (name == "uint" || name == "uint32") return ScalarType::UInt32;
  if (name == "float" || name == "float32") return ScalarType::Float32;
  if (name == "double" || name == "float64") return ScalarType::Float64;
  return std::nullopt;
}

std::size_t scalar_size(ScalarType t) {
  switch (t) {
    case ScalarType::Int8:
    case ScalarType::UInt8: return 1;
    case ScalarType::Int16:
    case ScalarType::UInt16: return 2;
    case ScalarType::Int32:
    case ScalarType::UInt32:
    case ScalarType::Float32: return 4;
    case ScalarType::Float64: return 8;
  }
  return 0;
}

bool is_integral(ScalarType t) { return t != ScalarType::Float32 && t != ScalarType::Float64; }

struct Property {
  std::string name;
  ScalarType type = ScalarType::Float32;
  bool is_list = false;
  ScalarType count_type = ScalarType::UInt8;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

struct Header {
  PlyFormat format = PlyFormat::Ascii;
  std::vector<Element> elements;
  std::size_t body_offset = 0;
};

Error parse_error(const std::string& what) { return Error(ErrorCode::ParseError, "PLY: " + what); }

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) words.push_back(line.substr(i, j - i));
    i = j;
  }
  return words;
}

std::size_t parse_count(std::string_view text) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw parse_error("bad element count '" + std::string(text) + "'");
  }
  return value;
}

Header parse_header(std::string_view bytes) {
  Header header;
  std::size_t pos = 0;
  auto next_line = [&]() -> std::optional<std::string_view> {
    if (pos >= bytes.size()) return std::nullopt;
    std::size_t end = bytes.find('\n', pos);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view line = bytes.substr(pos, end - pos);
    pos = std::min(end + 1, bytes.size());
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  };

  auto magic = next_line();
  if (!magic || *magic != "ply") throw Error(ErrorCode::MissingMagic, "not a PLY file (missing 'ply' magic line)");

  bool have_format = false;
  while (true) {
    auto line = next_line();
    if (!line) throw parse_error("header is not terminated by end_header");
    const auto words = split_words(*line);
    if (words.empty()) continue;
    const std::string_view keyword = words[0];
    if (keyword == "end_header") break;
    if (keyword == "comment" || keyword == "obj_info") continue;
    if (keyword == "format") {
      if (words.size() != 3) throw parse_error("malformed format line");
      if (words[1] == "ascii") {
        header.format = PlyFormat::Ascii;
      } else if (words[1] == "binary_little_endian") {
        header.format = PlyFormat::BinaryLittleEndian;
      } else {
        throw Error(ErrorCode::UnsupportedFormat, "unsupported PLY format '" + std::string(words[1]) + "'");
      }
      if (words[2] != "1.0") {
        throw Error(ErrorCode::UnsupportedFormat, "unsupported PLY version '" + std::string(words[2]) + "'");
      }
      have_format = true;
    } else if (keyword == "element") {
      if (words.size() != 3) throw parse_error("malformed element line");
      header.elements.push_back(Element{std::string(words[1]), parse_count(words[2]), {}});
    } else if (keyword == "property") {
      if (header.elements.empty()) throw parse_error("property before any element");
      Property prop;
      if (words.size() == 5 && words[1] == "list") {
        auto count_type = scalar_type_from_name(words[2]);
        auto item_type = scalar_type_from_name(words[3]);
        if (!count_type || !item_type || !is_integral(*count_type)) {
          throw parse_error("bad list property types on '" + std::string(words[4]) + "'");
        }
        prop.is_list = true;
        prop.count_type = *count_type;
        prop.type = *item_type;
        prop.name = std::string(words[4]);
      } else if (words.size() == 3) {
        auto type = scalar_type_from_name(words[1]);
        if (!type) throw parse_error("unknown property type '" + std::string(words[1]) + "'");
        prop.type = *type;
        prop.name = std::string(words[2]);
      } else {
        throw parse_error("malformed property line");
      }
      header.elements.back().properties.push_back(std::move(prop));
    } else {
      throw parse_error("unknown header keyword '" + std::string(keyword) + "'");
    }
  }
  if (!have_format) throw parse_error("missing format line");
  header.body_offset = pos;
  return header;
}

// Sequential value source over either body encoding. Every read either yields
// a value or throws CountMismatch; nothing past the declared data is touched.
class BodyReader {
 public:
  BodyReader(std::string_view body, PlyFormat format) : body_(body), format_(format) {}

  double read(ScalarType type) {
    return format_ == PlyFormat::Ascii ? read_ascii(type) : read_binary(type);
  }

  std::int64_t read_integer(ScalarType type) {
    const double v = read(type);
    if (v != std::floor(v)) throw parse_error("non-integer value in integer property");
    return static_cast<std::int64_t>(v);
  }

 private:
  [[noreturn]] void truncated() const {
    throw Error(ErrorCode::CountMismatch, "PLY body ends before all declared elements were read");
  }

  double read_ascii(ScalarType type) {
    while (pos_ < body_.size() && std::isspace(static_cast<unsigned char>(body_[pos_]))) ++pos_;
    if (pos_ >= body_.size()) truncated();
    std::size_t end = pos_;
    while (end < body_.size() && !std::isspace(static_cast<unsigned char>(body_[end]))) ++end;
    const std::string_view token = body_.substr(pos_, end - pos_);
    pos_ = end;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (!token.empty() && token.front() == '+') ++first;
    auto bad_token = [&] { return parse_error("bad numeric token '" + std::string(token) + "'"); };
    if (type == ScalarType::Float32) {
      float value = 0.0f;
      auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc() || ptr != last) throw bad_token();
      return value;
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) throw bad_token();
    return value;
  }

  double read_binary(ScalarType type) {
    const std::size_t size = scalar_size(type);
    if (body_.size() - pos_ < size) truncated();
    std::uint64_t raw = 0;
    for (std::size_t i = 0; i < size; ++i) {
      raw |= static_cast<std::uint64_t>(static_cast<unsigned char>(body_[pos_ + i])) << (8 * i);
    }
    pos_ += size;
    switch (type) {
      case ScalarType::Int8: return static_cast<std::int8_t>(raw);
      case ScalarType::UInt8: return static_cast<std::uint8_t>(raw);
      case ScalarType::Int16: return static_cast<std::int16_t>(raw);
      case ScalarType::UInt16: return static_cast<std::uint16_t>(raw);
      case ScalarType::Int32: return static_cast<std::int32_t>(raw);
      case ScalarType::UInt32: return static_cast<std::uint32_t>(raw);
      case ScalarType::Float32: return std::bit_cast<float>(static_cast<std::uint32_t>(raw));
      case ScalarType::Float64: return std::bit_cast<double>(raw);
    }
    return 0.0;
  }

  std::string_view body_;
  PlyFormat format_;
  std::size_t pos_ = 0;
};

int find_property(const Element& element, std::string_view name) {
  for (std::size_t i = 0; i < element.properties.size(); ++i) {
    if (element.properties[i].name == name && !element.properties[i].is_list) return static_cast<int>(i);
  }
  return -1;
}

void read_vertices(BodyReader& reader, const Element& element, Mesh& mesh) {
  const int ix = find_property(element, "x");
  const int iy = find_property(element, "y");
  const int iz = find_property(element, "z");
  if (ix < 0 || iy < 0 || iz < 0) throw parse_error("vertex element lacks x/y/z properties");
  const int inx = find_property(element, "nx");
  const int iny = find_property(element, "ny");
  const int inz = find_property(element, "nz");
  const bool has_normals = inx >= 0 && iny >= 0 && inz >= 0;

  mesh.vertices.reserve(element.count);
  if (has_normals) mesh.normals.emplace().reserve(element.count);
  std::vector<double> values(element.properties.size());
  for (std::size_t v = 0; v < element.count; ++v) {
    for (std::size_t p = 0; p < element.properties.size(); ++p) {
      const Property& prop = element.properties[p];
      if (prop.is_list) {
        const auto n = reader.read_integer(prop.count_type);
        for (std::int64_t k = 0; k < n; ++k) reader.read(prop.type);
        continue;
      }
      values[p] = reader.read(prop.type);
    }
    mesh.vertices.push_back({values[ix], values[iy], values[iz]});
    if (has_normals) mesh.normals->push_back({values[inx], values[iny], values[inz]});
  }
}

void read_faces(BodyReader& reader, const Element& element, Mesh& mesh) {
  int index_prop = -1;
  for (std::size_t i = 0; i < element.properties.size(); ++i) {
    const Property& prop = element.properties[i];
    if (prop.is_list && (prop.name == "vertex_indices" || prop.name == "vertex_index")) {
      index_prop = static_cast<int>(i);
    }
  }
  if (index_prop < 0) throw parse_error("face element lacks a vertex_indices list");
  if (!is_integral(element.properties[index_prop].type)) throw parse_error("face indices must be integers");

  mesh.triangles.reserve(element.count);
  std::vector<std::uint32_t> polygon;
  const auto vertex_count = static_cast<std::int64_t>(mesh.vertices.size());
  for (std::size_t f = 0; f < element.count; ++f) {
    for (std::size_t p = 0; p < element.properties.size(); ++p) {
      const Property& prop = element.properties[p];
      if (!prop.is_list) {
        reader.read(prop.type);
        continue;
      }
      const auto n = reader.read_integer(prop.count_type);
      if (n < 0) throw parse_error("negative list length");
      if (static_cast<int>(p) != index_prop) {
        for (std::int64_t k = 0; k < n; ++k) reader.read(prop.type);
        continue;
      }
      polygon.clear();
      for (std::int64_t k = 0; k < n; ++k) {
        const auto index = reader.read_integer(prop.type);
        if (index < 0 || index >= vertex_count) {
          throw Error(ErrorCode::IndexOutOfRange, "face " + std::to_string(f) + " references vertex " +
                                                      std::to_string(index) + " but only " +
                                                      std::to_string(vertex_count) + " exist");
        }
        polygon.push_back(static_cast<std::uint32_t>(index));
      }
      for (std::size_t k = 2; k < polygon.size(); ++k) {
        mesh.triangles.push_back({polygon[0], polygon[k - 1], polygon[k]});
      }
    }
  }
}

void skip_element(BodyReader& reader, const Element& element) {
  for (std::size_t i = 0; i < element.count; ++i) {
    for (const Property& prop : element.properties) {
      if (prop.is_list) {
        const auto n = reader.read_integer(prop.count_type);
        for (std::int64_t k = 0; k < n; ++k) reader.read(prop.type);
      } else {
        reader.read(prop.type);
      }
    }
  }
}

void append_le32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void append_float(std::string& out, float f) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), f);
  out.append(buf, ptr);
}

}  // namespace

Mesh parse_ply(std::string_view bytes) {
  const Header header = parse_header(bytes);
  BodyReader reader(bytes.substr(header.body_offset), header.format);
  Mesh mesh;
  bool seen_vertices = false;
  for (const Element& element : header.elements) {
    if (element.name == "vertex") {
      read_vertices(reader, element, mesh);
      seen_vertices = true;
    } else if (element.name == "face") {
      if (!seen_vertices && element.count > 0) throw parse_error("face element precedes vertex element");
      read_faces(reader, element, mesh);
    } else {
      skip_element(reader, element);
    }
  }
  return mesh;
}

std::string write_ply(const Mesh& mesh, PlyFormat format) {
  const bool with_normals = mesh.normals.has_value() && mesh.normals->size() == mesh.vertices.size();
  std::string out;
  out += "ply\n";
  out += format == PlyFormat::Ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n";
  out += "element vertex " + std::to_string(mesh.vertices.size()) + "\n";
  out += "property float x\nproperty float y\nproperty float z\n";
  if (with_normals) out += "property float nx\nproperty float ny\nproperty float nz\n";
  out += "element face " + std::to_string(mesh.triangles.size()) + "\n";
  out += "property list uchar int vertex_indices\n";
  out += "end_header\n";

  auto emit_vec = [&](const Vec3& v, bool last) {
    const float c[3] = {static_cast<float>(v.x), static_cast<float>(v.y), static_cast<float>(v.z)};
    for (int i = 0; i < 3; ++i) {
      if (format == PlyFormat::Ascii) {
        append_float(out, c[i]);
        out.push_back(i == 2 && last ? '\n' : ' ');
      } else {
        append_le32(out, std::bit_cast<std::uint32_t>(c[i]));
      }
    }
  };

  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    emit_vec(mesh.vertices[i], !with_normals);
    if (with_normals) emit_vec((*mesh.normals)[i], true);
  }
  for (const Triangle& t : mesh.triangles) {
    if (format == PlyFormat::Ascii) {
      out += "3 " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " + std::to_string(t[2]) + "\n";
    } else {
      out.push_back(static_cast<char>(3));
      for (std::uint32_t index : t) append_le32(out, index);
    }
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading", path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "error reading '" + path.string() + "'", path.string());
  return std::move(buffer).str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing", path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "error writing '" + path.string() + "'", path.string());
}

Mesh read_ply_file(const std::filesystem::path& path) { return parse_ply(read_file(path)); }

void write_ply_file(const std::filesystem::path& path, const Mesh& mesh, PlyFormat format) {
  write_file(path, write_ply(mesh, format));
}

}  // namespace atlaspaint
