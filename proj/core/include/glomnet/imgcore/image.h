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

/// @file image.h
/// @brief 8-bit raster and binary mask types plus the geometric primitives
/// (block-mean downsampling, cropping) shared by the whole pipeline.

#ifndef GLOMNET_IMGCORE_IMAGE_H_
#define GLOMNET_IMGCORE_IMAGE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace glomnet {

/// Dense row-major 8-bit image with 1 or 3 interleaved channels.
///
/// `pixel_size_um` is carried as metadata only; no computation reads it.
class Image {
 public:
  Image() = default;
  /// Allocates a width x height image filled with `fill` in every channel.
  Image(int width, int height, int channels, std::uint8_t fill = 0);
  /// Takes ownership of `data`; its length must be width*height*channels.
  Image(int width, int height, int channels, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }

  std::size_t index(int x, int y, int c = 0) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }
  std::uint8_t at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }
  std::uint8_t& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }

  std::optional<double> pixel_size_um;

  /// Compares geometry and samples; metadata is ignored.
  friend bool operator==(const Image& a, const Image& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ &&
           a.channels_ == b.channels_ && a.data_ == b.data_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Row-major binary mask; each entry is 0 or 1.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, bool fill = false);

  int width() const { return width_; }
  int height() const { return height_; }

  bool get(int x, int y) const {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  void set(int x, int y, bool value) {
    bits_[static_cast<std::size_t>(y) * width_ + x] = value ? 1 : 0;
  }
  std::span<const std::uint8_t> bits() const { return bits_; }
  std::span<std::uint8_t> bits() { return bits_; }

  std::size_t count() const;
  Mask complement() const;

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Block-mean downsampling. Each output sample is the mean of a
/// factor x factor block, rounded half up. Width and height must be
/// divisible by `factor`; non-divisible inputs throw DataError.
Image downsample(const Image& img, int factor);

/// Copies the window [x, x+w) x [y, y+h), which must lie inside the image.
Image crop(const Image& img, int x, int y, int w, int h);

/// Centered out_w x out_h window at offset floor((dim - out) / 2).
Image center_crop(const Image& img, int out_h, int out_w);

}  // namespace glomnet

#endif  // GLOMNET_IMGCORE_IMAGE_H_
