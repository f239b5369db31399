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

#include "glomnet/augment/augment.h"

#include <cmath>
#include <numbers>
#include <string>

#include "glomnet/error.h"
#include "glomnet/imgcore/sampling.h"

namespace glomnet {

void AugmentConfig::validate() const {
  if (!(rotation_deg >= 0.0) || !(translate_frac >= 0.0) || !(zoom_frac >= 0.0)) {
    throw UsageError("augmentation magnitudes must be >= 0");
  }
  if (zoom_frac >= 1.0) throw UsageError("aug.zoom_frac must be < 1");
  if (!(flip_prob >= 0.0 && flip_prob <= 1.0)) throw UsageError("aug.flip_prob must lie in [0, 1]");
  if (crop_px < 1) throw UsageError("aug.crop_px must be >= 1");
  if (load_downsample < 1) throw UsageError("aug.load_downsample must be >= 1");
}

AugmentParams sample_params(RandomStream& rng, const AugmentConfig& cfg, int side_px) {
  const double shift = cfg.translate_frac * side_px;
  AugmentParams p;
  p.angle_deg = rng.symmetric(cfg.rotation_deg);
  p.dx_px = rng.symmetric(shift);
  p.dy_px = rng.symmetric(shift);
  p.scale = 1.0 + rng.symmetric(cfg.zoom_frac);
  p.flip_lr = rng.bernoulli(cfg.flip_prob);
  p.flip_ud = rng.bernoulli(cfg.flip_prob);
  return p;
}

Image flip_left_right(const Image& img) {
  Image out = img;
  const int w = img.width(), ch = img.channels();
  auto src = img.data();
  auto dst = out.data();
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) dst[out.index(x, y, c)] = src[img.index(w - 1 - x, y, c)];
    }
  }
  return out;
}

Image flip_up_down(const Image& img) {
  Image out = img;
  const int h = img.height();
  const std::size_t row = static_cast<std::size_t>(img.width()) * img.channels();
  auto src = img.data();
  auto dst = out.data();
  for (int y = 0; y < h; ++y) {
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>((h - 1 - y) * row), row,
                dst.begin() + static_cast<std::ptrdiff_t>(y * row));
  }
  return out;
}

Image apply_affine(const Image& img, const AugmentParams& p,
                   const std::array<std::uint8_t, 3>& fill) {
  Image flipped = img;
  if (p.flip_lr) flipped = flip_left_right(flipped);
  if (p.flip_ud) flipped = flip_up_down(flipped);
  if (p.angle_deg == 0.0 && p.scale == 1.0 && p.dx_px == 0.0 && p.dy_px == 0.0) {
    return flipped;
  }
  if (!(p.scale > 0.0)) throw DataError("apply_affine: scale must be positive");

  // Forward map: dst = c + s R (src - c) + t. Inverse-map every output
  // pixel: src = c + R^T (dst - c - t) / s.
  const double theta = p.angle_deg * std::numbers::pi / 180.0;
  const double cos_t = std::cos(theta) / p.scale;
  const double sin_t = std::sin(theta) / p.scale;
  const double cx = 0.5 * (img.width() - 1);
  const double cy = 0.5 * (img.height() - 1);

  Image out(img.width(), img.height(), img.channels());
  auto dst = out.data();
  for (int y = 0; y < img.height(); ++y) {
    const double ry = y - cy - p.dy_px;
    for (int x = 0; x < img.width(); ++x) {
      const double rx = x - cx - p.dx_px;
      const double sx = cx + cos_t * rx + sin_t * ry;
      const double sy = cy - sin_t * rx + cos_t * ry;
      sample_bilinear(flipped, sx, sy, fill, dst.data() + out.index(x, y));
    }
  }
  return out;
}

Image augment_downsampled(const Image& downsampled, RandomStream& rng,
                          const AugmentConfig& cfg) {
  cfg.validate();
  if (downsampled.channels() != 3) throw DataError("augment: chip must have 3 channels");
  if (downsampled.width() < cfg.crop_px || downsampled.height() < cfg.crop_px) {
    throw DataError("augment: chip " + std::to_string(downsampled.width()) + "x" +
                    std::to_string(downsampled.height()) +
                    " after downsampling is smaller than the " + std::to_string(cfg.crop_px) +
                    " px crop");
  }
  const auto params =
      sample_params(rng, cfg, std::min(downsampled.width(), downsampled.height()));
  return center_crop(apply_affine(downsampled, params, cfg.fill), cfg.crop_px, cfg.crop_px);
}

Image augment_chip(const Image& chip, RandomStream& rng, const AugmentConfig& cfg) {
  cfg.validate();
  return augment_downsampled(downsample(chip, cfg.load_downsample), rng, cfg);
}

Image center_view(const Image& chip, const AugmentConfig& cfg) {
  cfg.validate();
  const Image small = downsample(chip, cfg.load_downsample);
  return center_crop(small, cfg.crop_px, cfg.crop_px);
}

}  // namespace glomnet
