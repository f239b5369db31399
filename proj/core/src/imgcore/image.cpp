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

#include "glomnet/imgcore/image.h"

#include <algorithm>
#include <string>

#include "glomnet/error.h"

namespace glomnet {

namespace {

void check_geometry(int width, int height, int channels) {
  if (width < 1 || height < 1) {
    throw DataError("image dimensions must be positive, got " +
                    std::to_string(width) + "x" + std::to_string(height));
  }
  if (channels != 1 && channels != 3) {
    throw DataError("image must have 1 or 3 channels, got " +
                    std::to_string(channels));
  }
}

}  // namespace

Image::Image(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
  check_geometry(width, height, channels);
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Image::Image(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  check_geometry(width, height, channels);
  if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
    throw DataError("image data length does not match its dimensions");
  }
}

Mask::Mask(int width, int height, bool fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw DataError("mask dimensions must be >= 0");
  bits_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

Mask Mask::complement() const {
  Mask out = *this;
  for (auto& b : out.bits_) b = b ? 0 : 1;
  return out;
}

Image downsample(const Image& img, int factor) {
  if (factor < 1) throw DataError("downsample factor must be >= 1");
  if (factor == 1) return img;
  if (img.width() % factor != 0 || img.height() % factor != 0) {
    throw DataError("downsample: " + std::to_string(img.width()) + "x" +
                    std::to_string(img.height()) +
                    " is not divisible by factor " + std::to_string(factor));
  }
  const int out_w = img.width() / factor;
  const int out_h = img.height() / factor;
  const int ch = img.channels();
  const std::uint32_t block = static_cast<std::uint32_t>(factor) * factor;
  Image out(out_w, out_h, ch);
  out.pixel_size_um = img.pixel_size_um;
  if (out.pixel_size_um) *out.pixel_size_um *= factor;

  std::vector<std::uint32_t> sums(static_cast<std::size_t>(out_w) * ch);
  const auto src = img.data();
  auto dst = out.data();
  for (int oy = 0; oy < out_h; ++oy) {
    std::fill(sums.begin(), sums.end(), 0u);
    for (int dy = 0; dy < factor; ++dy) {
      const std::uint8_t* row =
          src.data() + static_cast<std::size_t>(oy * factor + dy) * img.width() * ch;
      for (int x = 0; x < img.width(); ++x) {
        const std::size_t base = static_cast<std::size_t>(x / factor) * ch;
        for (int c = 0; c < ch; ++c) sums[base + c] += row[x * ch + c];
      }
    }
    std::uint8_t* out_row = dst.data() + static_cast<std::size_t>(oy) * out_w * ch;
    for (std::size_t i = 0; i < sums.size(); ++i) {
      // floor(sum / block + 1/2) in integer arithmetic
      out_row[i] = static_cast<std::uint8_t>((2 * sums[i] + block) / (2 * block));
    }
  }
  return out;
}

Image crop(const Image& img, int x, int y, int w, int h) {
  if (w < 1 || h < 1 || x < 0 || y < 0 || x + w > img.width() ||
      y + h > img.height()) {
    throw DataError("crop window lies outside the image");
  }
  const int ch = img.channels();
  Image out(w, h, ch);
  out.pixel_size_um = img.pixel_size_um;
  const auto src = img.data();
  auto dst = out.data();
  const std::size_t row_bytes = static_cast<std::size_t>(w) * ch;
  for (int r = 0; r < h; ++r) {
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(img.index(x, y + r)),
                row_bytes, dst.begin() + static_cast<std::ptrdiff_t>(r * row_bytes));
  }
  return out;
}

Image center_crop(const Image& img, int out_h, int out_w) {
  if (out_h > img.height() || out_w > img.width()) {
    throw DataError("center_crop: requested " + std::to_string(out_w) + "x" +
                    std::to_string(out_h) + " exceeds image " +
                    std::to_string(img.width()) + "x" +
                    std::to_string(img.height()));
  }
  return crop(img, (img.width() - out_w) / 2, (img.height() - out_h) / 2, out_w,
              out_h);
}

}  // namespace glomnet
