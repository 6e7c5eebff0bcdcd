#include "atlaspaint/png.hpp"

#include <zlib.h>

#include "atlaspaint/error.hpp"
#include "atlaspaint/mesh.hpp"

namespace atlaspaint {

namespace {

void put_be32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>(v & 0xFF));
}

void put_chunk(std::string& out, const char type[4], std::string_view data) {
  put_be32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t type_at = out.size();
  out.append(type, 4);
  out.append(data);
  const auto* crc_begin = reinterpret_cast<const Bytef*>(out.data() + type_at);
  const uLong crc = crc32(0L, crc_begin, static_cast<uInt>(4 + data.size()));
  put_be32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

std::string encode_png(const Image& image) {
  if (image.width < 1 || image.height < 1) throw Error(ErrorCode::InvalidArgument, "cannot encode an empty image");

  const std::size_t stride = static_cast<std::size_t>(image.width) * 4;
  std::string raw;
  raw.reserve((stride + 1) * image.height);
  for (int y = 0; y < image.height; ++y) {
    raw.push_back('\0');  // filter type None
    raw.append(reinterpret_cast<const char*>(image.pixel(0, y)), stride);
  }

  uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
  std::string compressed(compressed_size, '\0');
  const int rc = compress2(reinterpret_cast<Bytef*>(compressed.data()), &compressed_size,
                           reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()), 6);
  if (rc != Z_OK) throw Error(ErrorCode::IoError, "zlib compression failed");
  compressed.resize(compressed_size);

  std::string out("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  put_be32(ihdr, static_cast<std::uint32_t>(image.width));
  put_be32(ihdr, static_cast<std::uint32_t>(image.height));
  ihdr += '\x08';  // bit depth
  ihdr += '\x06';  // RGBA
  ihdr += '\x00';  // deflate
  ihdr += '\x00';  // adaptive filtering
  ihdr += '\x00';  // no interlace
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "sRGB", std::string_view("\x00", 1));
  put_chunk(out, "IDAT", compressed);
  put_chunk(out, "IEND", {});
  return out;
}

void write_png(const Image& image, const std::filesystem::path& path) { write_file(path, encode_png(image)); }

void encode_png(const Framebuffer& fb, const std::filesystem::path& path) { write_png(to_image(fb), path); }

}  // namespace atlaspaint
