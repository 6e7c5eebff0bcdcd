#include "atlaspaint/gif.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

#include "atlaspaint/error.hpp"

namespace atlaspaint {

namespace {

std::uint32_t pack(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return (static_cast<std::uint32_t>(r) << 16) | (static_cast<std::uint32_t>(g) << 8) | b;
}

std::uint8_t channel(std::uint32_t color, int c) { return static_cast<std::uint8_t>((color >> (16 - 8 * c)) & 0xFF); }

struct Bin {
  std::uint32_t color;
  std::uint64_t count;
};

struct Box {
  std::size_t begin;
  std::size_t end;
};

class BitWriter {
 public:
  void write(std::uint32_t code, int bits) {
    buffer_ |= static_cast<std::uint64_t>(code) << filled_;
    filled_ += bits;
    while (filled_ >= 8) {
      out_.push_back(static_cast<char>(buffer_ & 0xFF));
      buffer_ >>= 8;
      filled_ -= 8;
    }
  }
  std::string finish() {
    if (filled_ > 0) out_.push_back(static_cast<char>(buffer_ & 0xFF));
    buffer_ = 0;
    filled_ = 0;
    return std::move(out_);
  }

 private:
  std::string out_;
  std::uint64_t buffer_ = 0;
  int filled_ = 0;
};

void put_le16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

}  // namespace

std::vector<Rgb8> median_cut_palette(std::span<const Image> frames, std::size_t max_colors) {
  if (max_colors == 0) throw Error(ErrorCode::InvalidArgument, "palette needs at least one color");
  std::unordered_map<std::uint32_t, std::uint64_t> histogram;
  for (const Image& frame : frames) {
    for (std::size_t i = 0; i < frame.rgba.size(); i += 4) {
      ++histogram[pack(frame.rgba[i], frame.rgba[i + 1], frame.rgba[i + 2])];
    }
  }
  std::vector<Bin> bins;
  bins.reserve(histogram.size());
  for (const auto& [color, count] : histogram) bins.push_back({color, count});
  std::sort(bins.begin(), bins.end(), [](const Bin& a, const Bin& b) { return a.color < b.color; });
  if (bins.empty()) return {{0, 0, 0}};

  auto range_of = [&](const Box& box, int& widest) {
    int best = -1;
    for (int c = 0; c < 3; ++c) {
      std::uint8_t lo = 255;
      std::uint8_t hi = 0;
      for (std::size_t i = box.begin; i < box.end; ++i) {
        lo = std::min(lo, channel(bins[i].color, c));
        hi = std::max(hi, channel(bins[i].color, c));
      }
      if (hi - lo > best) {
        best = hi - lo;
        widest = c;
      }
    }
    return best;
  };

  std::vector<Box> boxes{{0, bins.size()}};
  while (boxes.size() < max_colors) {
    int best_range = 0;
    int best_channel = 0;
    std::size_t best_box = boxes.size();
    for (std::size_t b = 0; b < boxes.size(); ++b) {
      if (boxes[b].end - boxes[b].begin < 2) continue;
      int widest = 0;
      const int range = range_of(boxes[b], widest);
      if (range > best_range) {
        best_range = range;
        best_channel = widest;
        best_box = b;
      }
    }
    if (best_box == boxes.size()) break;  // every box holds a single color

    const Box box = boxes[best_box];
    const int c = best_channel;
    std::stable_sort(bins.begin() + box.begin, bins.begin() + box.end, [c](const Bin& a, const Bin& b) {
      return channel(a.color, c) < channel(b.color, c);
    });
    std::uint64_t total = 0;
    for (std::size_t i = box.begin; i < box.end; ++i) total += bins[i].count;
    // Split after the bin where the cumulative population reaches half,
    // keeping both halves nonempty.
    std::uint64_t running = 0;
    std::size_t split = box.begin + 1;
    for (std::size_t i = box.begin; i < box.end - 1; ++i) {
      running += bins[i].count;
      split = i + 1;
      if (2 * running >= total) break;
    }
    boxes[best_box] = {box.begin, split};
    boxes.push_back({split, box.end});
  }

  std::vector<Rgb8> palette;
  palette.reserve(boxes.size());
  for (const Box& box : boxes) {
    double sum[3] = {0, 0, 0};
    double weight = 0;
    for (std::size_t i = box.begin; i < box.end; ++i) {
      for (int c = 0; c < 3; ++c) sum[c] += static_cast<double>(channel(bins[i].color, c)) * bins[i].count;
      weight += static_cast<double>(bins[i].count);
    }
    Rgb8 color{};
    for (int c = 0; c < 3; ++c) color[c] = static_cast<std::uint8_t>(std::clamp(std::lround(sum[c] / weight), 0L, 255L));
    palette.push_back(color);
  }
  return palette;
}

std::vector<std::uint8_t> quantize(const Image& frame, std::span<const Rgb8> palette, bool dither) {
  if (palette.empty() || palette.size() > 256) throw Error(ErrorCode::InvalidArgument, "palette must have 1..256 colors");
  static constexpr int kBayer[4][4] = {{0, 8, 2, 10}, {12, 4, 14, 6}, {3, 11, 1, 9}, {15, 7, 13, 5}};
  // Threshold amplitude: roughly one palette step for a 256-color cube.
  constexpr double kSpread = 32.0;

  std::unordered_map<std::uint32_t, std::uint8_t> cache;
  auto nearest = [&](int r, int g, int b) {
    const std::uint32_t key = pack(static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b));
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    int best = 0;
    long best_dist = -1;
    for (std::size_t i = 0; i < palette.size(); ++i) {
      const long dr = r - palette[i][0];
      const long dg = g - palette[i][1];
      const long db = b - palette[i][2];
      const long dist = dr * dr + dg * dg + db * db;
      if (best_dist < 0 || dist < best_dist) {
        best_dist = dist;
        best = static_cast<int>(i);
      }
    }
    cache.emplace(key, static_cast<std::uint8_t>(best));
    return static_cast<std::uint8_t>(best);
  };

  std::vector<std::uint8_t> indices(static_cast<std::size_t>(frame.width) * frame.height);
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) {
      const std::uint8_t* p = frame.pixel(x, y);
      int r = p[0], g = p[1], b = p[2];
      if (dither) {
        const int offset = static_cast<int>(std::lround((kBayer[y & 3][x & 3] / 16.0 - 0.5 + 1.0 / 32.0) * kSpread));
        r = std::clamp(r + offset, 0, 255);
        g = std::clamp(g + offset, 0, 255);
        b = std::clamp(b + offset, 0, 255);
      }
      indices[static_cast<std::size_t>(y) * frame.width + x] = nearest(r, g, b);
    }
  }
  return indices;
}

std::string lzw_encode(std::span<const std::uint8_t> indices, int min_code_size) {
  if (min_code_size < 2 || min_code_size > 8) throw Error(ErrorCode::InvalidArgument, "LZW minimum code size must be 2..8");
  const std::uint32_t clear = 1u << min_code_size;
  const std::uint32_t end_of_info = clear + 1;
  constexpr std::uint32_t kMaxCodes = 4096;

  BitWriter bits;
  std::unordered_map<std::uint32_t, std::uint32_t> dictionary;
  std::uint32_t next = end_of_info + 1;
  int code_size = min_code_size + 1;
  auto reset = [&] {
    dictionary.clear();
    next = end_of_info + 1;
    code_size = min_code_size + 1;
  };

  bits.write(clear, code_size);
  if (indices.empty()) {
    bits.write(end_of_info, code_size);
    return bits.finish();
  }
  std::uint32_t prefix = indices[0];
  for (std::size_t i = 1; i < indices.size(); ++i) {
    const std::uint8_t k = indices[i];
    const std::uint32_t key = (prefix << 8) | k;
    if (auto it = dictionary.find(key); it != dictionary.end()) {
      prefix = it->second;
      continue;
    }
    bits.write(prefix, code_size);
    dictionary.emplace(key, next++);
    // The decoder defines this entry one code later, so widen once the
    // entry after next no longer fits.
    if (next > (1u << code_size) && code_size < 12) ++code_size;
    if (next == kMaxCodes) {
      bits.write(clear, code_size);
      reset();
    }
    prefix = k;
  }
  bits.write(prefix, code_size);
  // Account for the entry the decoder adds on reading the final code.
  if (next < kMaxCodes && next + 1 > (1u << code_size) && code_size < 12) ++code_size;
  bits.write(end_of_info, code_size);
  return bits.finish();
}

std::string encode_gif(std::span<const Image> frames, const GifOptions& options) {
  if (frames.empty()) throw Error(ErrorCode::InvalidArgument, "GIF needs at least one frame");
  const int width = frames[0].width;
  const int height = frames[0].height;
  if (width < 1 || height < 1 || width > 65535 || height > 65535) {
    throw Error(ErrorCode::InvalidArgument, "GIF frame size out of range");
  }
  for (const Image& f : frames) {
    if (f.width != width || f.height != height) throw Error(ErrorCode::InvalidArgument, "GIF frames differ in size");
  }

  const std::vector<Rgb8> palette = median_cut_palette(frames, 256);
  int table_bits = 1;
  while ((1u << table_bits) < palette.size()) ++table_bits;
  const int min_code_size = std::max(2, table_bits);

  std::string out = "GIF89a";
  put_le16(out, static_cast<std::uint16_t>(width));
  put_le16(out, static_cast<std::uint16_t>(height));
  out.push_back(static_cast<char>(0x80 | (0x07 << 4) | (table_bits - 1)));  // global table, 8-bit resolution
  out.push_back('\0');                                                       // background index
  out.push_back('\0');                                                       // square pixels
  for (std::size_t i = 0; i < (1u << table_bits); ++i) {
    const Rgb8 c = i < palette.size() ? palette[i] : Rgb8{0, 0, 0};
    out.append(reinterpret_cast<const char*>(c.data()), 3);
  }

  out += "\x21\xFF\x0B" "NETSCAPE2.0" "\x03\x01";
  put_le16(out, options.loop_count);
  out.push_back('\0');

  for (const Image& frame : frames) {
    out += "\x21\xF9\x04";
    out.push_back(0x04);  // disposal: leave in place; no transparency
    put_le16(out, options.delay_cs);
    out.push_back('\0');
    out.push_back('\0');

    out.push_back(0x2C);
    put_le16(out, 0);
    put_le16(out, 0);
    put_le16(out, static_cast<std::uint16_t>(width));
    put_le16(out, static_cast<std::uint16_t>(height));
    out.push_back('\0');  // no local table, not interlaced

    out.push_back(static_cast<char>(min_code_size));
    const std::string data = lzw_encode(quantize(frame, palette, options.dither), min_code_size);
    for (std::size_t pos = 0; pos < data.size(); pos += 255) {
      const std::size_t n = std::min<std::size_t>(255, data.size() - pos);
      out.push_back(static_cast<char>(n));
      out.append(data, pos, n);
    }
    out.push_back('\0');
  }
  out.push_back(0x3B);
  return out;
}

}  // namespace atlaspaint
