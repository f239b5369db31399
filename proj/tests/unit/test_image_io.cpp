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

#include <gtest/gtest.h>
#include <zlib.h>

#include <cstdint>
#include <string>
#include <vector>

#include "glomnet/error.h"
#include "glomnet/imgcore/image_io.h"
#include "glomnet/random.h"
#include "test_util.h"

namespace glomnet {
namespace {

using testing::TempDir;

Image random_image(int w, int h, int ch, std::uint64_t seed) {
  Image img(w, h, ch);
  RandomStream r(seed, stream_tag(StreamPurpose::kTest), 1);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(r.below(256));
  return img;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  const std::string s = testing::read_file(p);
  return {s.begin(), s.end()};
}

// Minimal baseline TIFF encoder, used only to produce reader fixtures.
struct TiffOptions {
  int samples = 3;
  int photometric = 2;
  int compression = 1;
  int predictor = 1;
  int rows_per_strip = 0;
  bool big_endian = false;
};

std::vector<std::uint8_t> encode_tiff(int w, int h, const std::vector<std::uint8_t>& samples,
                                      const TiffOptions& opt) {
  std::vector<std::uint8_t> out;
  auto put16 = [&](std::uint16_t v) {
    if (opt.big_endian) {
      out.push_back(static_cast<std::uint8_t>(v >> 8));
      out.push_back(static_cast<std::uint8_t>(v));
    } else {
      out.push_back(static_cast<std::uint8_t>(v));
      out.push_back(static_cast<std::uint8_t>(v >> 8));
    }
  };
  auto put32 = [&](std::uint32_t v) {
    if (opt.big_endian) {
      put16(static_cast<std::uint16_t>(v >> 16));
      put16(static_cast<std::uint16_t>(v));
    } else {
      put16(static_cast<std::uint16_t>(v));
      put16(static_cast<std::uint16_t>(v >> 16));
    }
  };
  auto patch32 = [&](std::size_t at, std::uint32_t v) {
    std::vector<std::uint8_t> saved(out.begin() + static_cast<std::ptrdiff_t>(at), out.end());
    out.resize(at);
    put32(v);
    out.insert(out.end(), saved.begin() + 4, saved.end());
  };

  const int rps = opt.rows_per_strip > 0 ? opt.rows_per_strip : h;
  const std::size_t stride = static_cast<std::size_t>(w) * opt.samples;
  std::vector<std::vector<std::uint8_t>> strips;
  for (int y0 = 0; y0 < h; y0 += rps) {
    const int rows = std::min(rps, h - y0);
    std::vector<std::uint8_t> raw(samples.begin() + static_cast<std::ptrdiff_t>(y0 * stride),
                                  samples.begin() + static_cast<std::ptrdiff_t>((y0 + rows) * stride));
    if (opt.predictor == 2) {
      for (int y = 0; y < rows; ++y) {
        std::uint8_t* row = raw.data() + y * stride;
        for (std::size_t i = stride; i-- > static_cast<std::size_t>(opt.samples);) {
          row[i] = static_cast<std::uint8_t>(row[i] - row[i - opt.samples]);
        }
      }
    }
    if (opt.compression == 8) {
      uLongf len = compressBound(static_cast<uLong>(raw.size()));
      std::vector<std::uint8_t> z(len);
      compress(z.data(), &len, raw.data(), static_cast<uLong>(raw.size()));
      z.resize(len);
      raw = std::move(z);
    }
    strips.push_back(std::move(raw));
  }

  out.push_back(opt.big_endian ? 'M' : 'I');
  out.push_back(opt.big_endian ? 'M' : 'I');
  put16(42);
  put32(0);  // IFD offset, patched below
  std::vector<std::uint32_t> offsets;
  for (const auto& s : strips) {
    offsets.push_back(static_cast<std::uint32_t>(out.size()));
    out.insert(out.end(), s.begin(), s.end());
  }
  const auto n_strips = static_cast<std::uint32_t>(strips.size());
  // Out-of-line arrays: bits per sample, offsets, counts.
  const auto bits_at = static_cast<std::uint32_t>(out.size());
  for (int i = 0; i < opt.samples; ++i) put16(8);
  const auto offs_at = static_cast<std::uint32_t>(out.size());
  for (auto o : offsets) put32(o);
  const auto counts_at = static_cast<std::uint32_t>(out.size());
  for (const auto& s : strips) put32(static_cast<std::uint32_t>(s.size()));
  if (out.size() % 2) out.push_back(0);
  const auto ifd_at = static_cast<std::uint32_t>(out.size());
  patch32(4, ifd_at);

  struct Entry {
    std::uint16_t tag, type;
    std::uint32_t count, value;
  };
  std::vector<Entry> entries = {
      {256, 4, 1, static_cast<std::uint32_t>(w)},
      {257, 4, 1, static_cast<std::uint32_t>(h)},
      {258, 3, static_cast<std::uint32_t>(opt.samples), bits_at},
      {259, 3, 1, static_cast<std::uint32_t>(opt.compression)},
      {262, 3, 1, static_cast<std::uint32_t>(opt.photometric)},
      {273, 4, n_strips, n_strips == 1 ? offsets[0] : offs_at},
      {277, 3, 1, static_cast<std::uint32_t>(opt.samples)},
      {278, 4, 1, static_cast<std::uint32_t>(rps)},
      {279, 4, n_strips, n_strips == 1 ? static_cast<std::uint32_t>(strips[0].size()) : counts_at},
      {317, 3, 1, static_cast<std::uint32_t>(opt.predictor)},
  };
  if (opt.samples <= 2) entries[2].value = 8;  // fits inline
  put16(static_cast<std::uint16_t>(entries.size()));
  for (const auto& e : entries) {
    put16(e.tag);
    put16(e.type);
    put32(e.count);
    if (e.type == 3 && e.count == 1) {
      put16(static_cast<std::uint16_t>(e.value));
      put16(0);
    } else if (e.type == 3 && e.count == 2 && e.tag == 258) {
      put16(8);
      put16(8);
    } else {
      put32(e.value);
    }
  }
  put32(0);
  return out;
}

TEST(ImageIo, WhitePngDecodes) {
  TempDir dir;
  save_image(Image(2, 2, 3, 255), dir / "white.png");
  const Image img = load_image(dir / "white.png");
  EXPECT_EQ(img, Image(2, 2, 3, 255));
}

TEST(ImageIo, SingleBlackPixel) {
  TempDir dir;
  save_image(Image(1, 1, 3, std::vector<std::uint8_t>{0, 0, 0}), dir / "black.png");
  const Image img = load_image(dir / "black.png");
  ASSERT_EQ(img.width(), 1);
  EXPECT_EQ(img.at(0, 0, 0), 0);
  EXPECT_EQ(img.channels(), 3);
}

TEST(ImageIo, RoundTripLargeRgb) {
  TempDir dir;
  const Image src = random_image(1000, 1000, 3, 1);
  save_image(src, dir / "chip.png");
  EXPECT_EQ(load_image(dir / "chip.png"), src);
}

TEST(ImageIo, RoundTripGray) {
  TempDir dir;
  const Image src = random_image(17, 9, 1, 2);
  save_image(src, dir / "g.png");
  const Image back = load_image(dir / "g.png");
  EXPECT_EQ(back.channels(), 1);
  EXPECT_EQ(back, src);
}

TEST(ImageIo, PixelSizeMetadataRoundTrips) {
  TempDir dir;
  Image src(3, 3, 3, 200);
  src.pixel_size_um = 20.0;
  save_image(src, dir / "m.png");
  const Image back = load_image(dir / "m.png");
  ASSERT_TRUE(back.pixel_size_um.has_value());
  EXPECT_NEAR(*back.pixel_size_um, 20.0, 1e-9);
}

TEST(ImageIo, EncodingIsDeterministic) {
  TempDir dir;
  const Image src = random_image(40, 30, 3, 3);
  save_image(src, dir / "a.png");
  save_image(src, dir / "b.png");
  EXPECT_EQ(testing::read_file(dir / "a.png"), testing::read_file(dir / "b.png"));
}

TEST(ImageIo, TruncatedFileIsDecodeFailure) {
  TempDir dir;
  save_image(random_image(20, 20, 3, 4), dir / "t.png");
  auto bytes = read_bytes(dir / "t.png");
  bytes.resize(bytes.size() / 2);
  try {
    decode_image(bytes);
    FAIL() << "expected an error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("decode failure"), std::string::npos) << e.what();
  }
}

TEST(ImageIo, UnknownFormatAndMissingFile) {
  const std::vector<std::uint8_t> junk = {'G', 'I', 'F', '8', '9', 'a', 0, 0};
  EXPECT_THROW(decode_image(junk), DataError);
  EXPECT_THROW(load_image("/nonexistent/glomnet/x.png"), DataError);
}

TEST(ImageIo, UnwritableDestinationFails) {
  TempDir dir;
  EXPECT_THROW(save_image(Image(1, 1, 3), dir / "missing" / "x.png"), DataError);
  EXPECT_THROW(save_image(Image(1, 1, 3), dir.path()), DataError);
}

TEST(TiffIngest, UncompressedRgb) {
  const Image src = random_image(13, 7, 3, 5);
  const std::vector<std::uint8_t> samples(src.data().begin(), src.data().end());
  const auto bytes = encode_tiff(13, 7, samples, {});
  EXPECT_EQ(decode_image(bytes), src);
}

TEST(TiffIngest, BigEndianMultiStrip) {
  const Image src = random_image(11, 10, 3, 6);
  const std::vector<std::uint8_t> samples(src.data().begin(), src.data().end());
  TiffOptions opt;
  opt.big_endian = true;
  opt.rows_per_strip = 3;
  EXPECT_EQ(decode_image(encode_tiff(11, 10, samples, opt)), src);
}

TEST(TiffIngest, DeflateWithPredictor) {
  const Image src = random_image(16, 12, 3, 7);
  const std::vector<std::uint8_t> samples(src.data().begin(), src.data().end());
  TiffOptions opt;
  opt.compression = 8;
  opt.predictor = 2;
  opt.rows_per_strip = 5;
  EXPECT_EQ(decode_image(encode_tiff(16, 12, samples, opt)), src);
}

TEST(TiffIngest, GrayAndWhiteIsZero) {
  const Image src = random_image(6, 4, 1, 8);
  const std::vector<std::uint8_t> samples(src.data().begin(), src.data().end());
  TiffOptions opt;
  opt.samples = 1;
  opt.photometric = 1;
  EXPECT_EQ(decode_image(encode_tiff(6, 4, samples, opt)), src);

  opt.photometric = 0;
  const Image inverted = decode_image(encode_tiff(6, 4, samples, opt));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    EXPECT_EQ(inverted.data()[i], 255 - samples[i]);
  }
}

TEST(TiffIngest, AlphaIsDropped) {
  const Image rgb = random_image(5, 5, 3, 9);
  std::vector<std::uint8_t> rgba;
  for (std::size_t p = 0; p < 25; ++p) {
    for (int c = 0; c < 3; ++c) rgba.push_back(rgb.data()[p * 3 + c]);
    rgba.push_back(128);
  }
  TiffOptions opt;
  opt.samples = 4;
  EXPECT_EQ(decode_image(encode_tiff(5, 5, rgba, opt)), rgb);
}

TEST(TiffIngest, TruncatedStripIsDecodeFailure) {
  const Image src = random_image(8, 8, 3, 10);
  const std::vector<std::uint8_t> samples(src.data().begin(), src.data().end());
  const auto bytes = encode_tiff(8, 8, samples, {});
  // Dropping the tail removes the directory the header points at.
  const std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + 100);
  try {
    decode_image(cut);
    FAIL() << "expected an error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("decode failure"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace glomnet
