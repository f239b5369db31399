// Copyright 2026 The glomnet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "glomnet/imgcore/image_io.h"

#include <png.h>
#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

#include "glomnet/error.h"

namespace glomnet {

namespace {

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

[[noreturn]] void decode_failure(const std::string& detail) {
  throw DataError("decode failure: " + detail);
}

// ---------------------------------------------------------------- PNG ---

struct PngReadSource {
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;
};

void png_read_from_span(png_structp png, png_bytep out, png_size_t length) {
  auto* src = static_cast<PngReadSource*>(png_get_io_ptr(png));
  if (src->offset + length > src->bytes.size()) {
    png_error(png, "unexpected end of data");
  }
  std::memcpy(out, src->bytes.data() + src->offset, length);
  src->offset += length;
}

void png_error_to_longjmp(png_structp png, png_const_charp message) {
  auto* slot = static_cast<std::string*>(png_get_error_ptr(png));
  if (slot != nullptr) *slot = message;
  png_longjmp(png, 1);
}

void png_silent_warning(png_structp, png_const_charp) {}

struct PngDecoded {
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int channels = 0;
  double pixel_size_um = 0.0;
  const char* rejection = nullptr;
};

// Runs every libpng call that may longjmp. Kept out of the setjmp frame so
// no local object is live across the jump.
void read_png_body(png_structp png, png_infop info, PngDecoded& out) {
  png_read_info(png, info);
  out.width = png_get_image_width(png, info);
  out.height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);

  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  // Transparency carries no tissue information; any alpha is discarded.
  if ((color_type & PNG_COLOR_MASK_ALPHA) || png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_strip_alpha(png);
  }
  png_read_update_info(png, info);
  out.channels = png_get_channels(png, info);

  png_uint_32 ppm_x = 0, ppm_y = 0;
  int unit = 0;
  if (png_get_pHYs(png, info, &ppm_x, &ppm_y, &unit) && unit == PNG_RESOLUTION_METER &&
      ppm_x > 0) {
    out.pixel_size_um = 1e6 / static_cast<double>(ppm_x);
  }
  if (out.width == 0 || out.height == 0) {
    out.rejection = "image has zero dimensions";
    return;
  }
  if (out.channels != 1 && out.channels != 3) {
    out.rejection = "unsupported PNG channel layout";
    return;
  }

  const std::size_t stride = static_cast<std::size_t>(out.width) * out.channels;
  out.pixels.resize(stride * out.height);
  out.rows.resize(out.height);
  for (png_uint_32 y = 0; y < out.height; ++y) out.rows[y] = out.pixels.data() + y * stride;
  png_read_image(png, out.rows.data());
  png_read_end(png, nullptr);
}

Image decode_png(std::span<const std::uint8_t> bytes) {
  std::string error_message;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error_message,
                                           png_error_to_longjmp, png_silent_warning);
  if (png == nullptr) decode_failure("cannot allocate PNG reader");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    decode_failure("cannot allocate PNG info");
  }

  PngReadSource source{bytes, 0};
  PngDecoded decoded;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    decode_failure(error_message.empty() ? "corrupt PNG" : error_message);
  }
  png_set_read_fn(png, &source, png_read_from_span);
  read_png_body(png, info, decoded);
  png_destroy_read_struct(&png, &info, nullptr);
  if (decoded.rejection != nullptr) throw DataError(decoded.rejection);

  Image img(static_cast<int>(decoded.width), static_cast<int>(decoded.height), decoded.channels,
            std::move(decoded.pixels));
  if (decoded.pixel_size_um > 0.0) img.pixel_size_um = decoded.pixel_size_um;
  return img;
}

// --------------------------------------------------------------- TIFF ---

class TiffReader {
 public:
  explicit TiffReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {
    if (bytes.size() < 8) decode_failure("TIFF header truncated");
    little_endian_ = bytes[0] == 'I';
    if (u16(2) != 42) decode_failure("not a classic TIFF");
  }

  Image decode() {
    const std::uint32_t ifd = u32(4);
    const std::uint16_t entries = u16(ifd);
    std::uint32_t width = 0, height = 0, compression = 1, photometric = 2;
    std::uint32_t samples = 1, rows_per_strip = 0, planar = 1, predictor = 1;
    std::vector<std::uint32_t> bits, offsets, counts;
    for (std::uint16_t i = 0; i < entries; ++i) {
      const std::size_t entry = ifd + 2 + 12u * i;
      const std::uint16_t tag = u16(entry);
      auto values = read_values(entry);
      auto first = [&] { return values.empty() ? 0u : values.front(); };
      switch (tag) {
        case 256: width = first(); break;
        case 257: height = first(); break;
        case 258: bits = values; break;
        case 259: compression = first(); break;
        case 262: photometric = first(); break;
        case 273: offsets = values; break;
        case 277: samples = first(); break;
        case 278: rows_per_strip = first(); break;
        case 279: counts = values; break;
        case 284: planar = first(); break;
        case 317: predictor = first(); break;
        default: break;
      }
    }
    if (width == 0 || height == 0) throw DataError("image has zero dimensions");
    for (auto b : bits) {
      if (b != 8) throw DataError("unsupported TIFF: only 8-bit samples are read");
    }
    if (planar != 1) throw DataError("unsupported TIFF: planar configuration");
    if (compression != 1 && compression != 8 && compression != 32946) {
      throw DataError("unsupported TIFF compression " + std::to_string(compression));
    }
    if (photometric > 2) throw DataError("unsupported TIFF photometric interpretation");
    if (samples < 1 || samples > 4) throw DataError("unsupported TIFF sample count");
    if (offsets.empty() || offsets.size() != counts.size()) {
      decode_failure("TIFF strip tables missing or inconsistent");
    }
    if (rows_per_strip == 0 || rows_per_strip > height) rows_per_strip = height;

    const std::size_t src_stride = static_cast<std::size_t>(width) * samples;
    std::vector<std::uint8_t> raw;
    raw.reserve(src_stride * height);
    for (std::size_t s = 0; s < offsets.size(); ++s) {
      if (static_cast<std::size_t>(offsets[s]) + counts[s] > bytes_.size()) {
        decode_failure("TIFF strip extends past end of file");
      }
      auto strip = bytes_.subspan(offsets[s], counts[s]);
      const std::size_t strip_rows =
          std::min<std::size_t>(rows_per_strip, height - s * rows_per_strip);
      const std::size_t expected = strip_rows * src_stride;
      if (compression == 1) {
        if (strip.size() < expected) decode_failure("TIFF strip truncated");
        raw.insert(raw.end(), strip.begin(), strip.begin() + static_cast<std::ptrdiff_t>(expected));
      } else {
        std::vector<std::uint8_t> out(expected);
        uLongf out_len = static_cast<uLongf>(expected);
        if (uncompress(out.data(), &out_len, strip.data(), static_cast<uLong>(strip.size())) !=
                Z_OK ||
            out_len != expected) {
          decode_failure("TIFF deflate strip is corrupt");
        }
        raw.insert(raw.end(), out.begin(), out.end());
      }
    }
    if (raw.size() != src_stride * height) decode_failure("TIFF pixel data truncated");
    if (predictor == 2) {
      for (std::uint32_t y = 0; y < height; ++y) {
        std::uint8_t* row = raw.data() + y * src_stride;
        for (std::size_t i = samples; i < src_stride; ++i) row[i] += row[i - samples];
      }
    }

    const int out_channels = samples >= 3 ? 3 : 1;
    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height * out_channels);
    for (std::size_t p = 0; p < static_cast<std::size_t>(width) * height; ++p) {
      for (int c = 0; c < out_channels; ++c) {
        std::uint8_t v = raw[p * samples + c];
        if (photometric == 0) v = static_cast<std::uint8_t>(255 - v);
        pixels[p * out_channels + c] = v;
      }
    }
    return Image(static_cast<int>(width), static_cast<int>(height), out_channels,
                 std::move(pixels));
  }

 private:
  std::uint16_t u16(std::size_t at) const {
    if (at + 2 > bytes_.size()) decode_failure("TIFF directory truncated");
    return little_endian_ ? static_cast<std::uint16_t>(bytes_[at] | (bytes_[at + 1] << 8))
                          : static_cast<std::uint16_t>((bytes_[at] << 8) | bytes_[at + 1]);
  }
  std::uint32_t u32(std::size_t at) const {
    if (at + 4 > bytes_.size()) decode_failure("TIFF directory truncated");
    const std::uint32_t a = bytes_[at], b = bytes_[at + 1], c = bytes_[at + 2], d = bytes_[at + 3];
    return little_endian_ ? (a | (b << 8) | (c << 16) | (d << 24))
                          : ((a << 24) | (b << 16) | (c << 8) | d);
  }

  // Reads the values of a SHORT or LONG directory entry.
  std::vector<std::uint32_t> read_values(std::size_t entry) const {
    const std::uint16_t type = u16(entry + 2);
    const std::uint32_t count = u32(entry + 4);
    const std::size_t size = type == 3 ? 2 : (type == 4 ? 4 : 0);
    if (size == 0) return {};
    if (count > bytes_.size()) decode_failure("TIFF entry count is implausible");
    const std::size_t base = size * count <= 4 ? entry + 8 : u32(entry + 8);
    std::vector<std::uint32_t> values(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      values[i] = size == 2 ? u16(base + 2 * i) : u32(base + 4 * i);
    }
    return values;
  }

  std::span<const std::uint8_t> bytes_;
  bool little_endian_ = true;
};

bool is_tiff(std::span<const std::uint8_t> b) {
  return b.size() >= 4 && ((b[0] == 'I' && b[1] == 'I' && b[2] == 42 && b[3] == 0) ||
                           (b[0] == 'M' && b[1] == 'M' && b[2] == 0 && b[3] == 42));
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

}  // namespace

Image decode_image(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0) {
    return decode_png(bytes);
  }
  if (is_tiff(bytes)) return TiffReader(bytes).decode();
  throw DataError("unsupported image format (expected PNG or TIFF)");
}

Image load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open image " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_image(bytes);
  } catch (const DataError& e) {
    throw DataError(std::string(e.what()) + " (" + path.string() + ")");
  }
}

// All libpng calls that may longjmp live here, outside the setjmp frame.
void write_png_body(png_structp png, png_infop info, const Image& img, std::FILE* file,
                    std::vector<png_const_bytep>& rows) {
  png_init_io(png, file);
  png_set_compression_level(png, 1);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_SUB);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()),
               static_cast<png_uint_32>(img.height()), 8,
               img.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  if (img.pixel_size_um && *img.pixel_size_um > 0.0) {
    const auto ppm = static_cast<png_uint_32>(std::lround(1e6 / *img.pixel_size_um));
    png_set_pHYs(png, info, ppm, ppm, PNG_RESOLUTION_METER);
  }
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(img.width()) * img.channels();
  for (int y = 0; y < img.height(); ++y) rows[y] = img.data().data() + y * stride;
  png_write_rows(png, const_cast<png_bytepp>(rows.data()), static_cast<png_uint_32>(rows.size()));
  png_write_end(png, nullptr);
}

void save_image(const Image& img, const std::filesystem::path& path) {
  if (img.empty()) throw DataError("cannot save an empty image");
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "wb"));
  if (!file) throw DataError("cannot open " + path.string() + " for writing");

  std::string error_message;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error_message,
                                            png_error_to_longjmp, png_silent_warning);
  if (png == nullptr) throw DataError("cannot allocate PNG writer");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw DataError("cannot allocate PNG info");
  }
  std::vector<png_const_bytep> rows(static_cast<std::size_t>(img.height()));
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("PNG encode failed for " + path.string() + ": " + error_message);
  }
  write_png_body(png, info, img, file.get(), rows);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) throw DataError("I/O error writing " + path.string());
}

}  // namespace glomnet
