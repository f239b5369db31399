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

/// @file augment.h
/// @brief On-the-fly chip augmentation.
///
/// A training view of a chip is produced by: block-mean downsample by
/// `load_downsample`, optional left/right and up/down flips, one composed
/// rotate/scale/translate warp about the image centre (inverse-mapped,
/// bilinear, out-of-range samples filled), then a centre crop of
/// `crop_px` x `crop_px`. Randomness comes only from the RandomStream passed
/// in, which callers derive from (seed, epoch, sample index).

#ifndef GLOMNET_AUGMENT_AUGMENT_H_
#define GLOMNET_AUGMENT_AUGMENT_H_

#include <array>
#include <cstdint>

#include "glomnet/imgcore/image.h"
#include "glomnet/random.h"

namespace glomnet {

struct AugmentConfig {
  double rotation_deg = 15.0;
  /// Maximum shift per axis as a fraction of the (downsampled) side.
  double translate_frac = 0.07;
  /// Scale is drawn from [1 - zoom_frac, 1 + zoom_frac].
  double zoom_frac = 0.05;
  double flip_prob = 0.5;
  int crop_px = 400;
  int load_downsample = 2;
  std::array<std::uint8_t, 3> fill = {255, 255, 255};

  /// Checks magnitudes and probability; geometry is checked per chip.
  void validate() const;
};

struct AugmentParams {
  double angle_deg = 0.0;
  double dx_px = 0.0;
  double dy_px = 0.0;
  double scale = 1.0;
  bool flip_lr = false;
  bool flip_ud = false;

  bool is_identity() const {
    return angle_deg == 0.0 && dx_px == 0.0 && dy_px == 0.0 && scale == 1.0 && !flip_lr &&
           !flip_ud;
  }
};

/// Draws angle, dx, dy, scale, flip_lr, flip_ud in that order.
AugmentParams sample_params(RandomStream& rng, const AugmentConfig& cfg, int side_px);

Image flip_left_right(const Image& img);
Image flip_up_down(const Image& img);

/// Flips, then the composed rotation/scale/translation about the centre.
/// Output has the input's dimensions.
Image apply_affine(const Image& img, const AugmentParams& p,
                   const std::array<std::uint8_t, 3>& fill);

/// Full random view of a chip: exactly crop_px x crop_px x 3.
Image augment_chip(const Image& chip, RandomStream& rng, const AugmentConfig& cfg);

/// augment_chip for a chip already downsampled by cfg.load_downsample.
Image augment_downsampled(const Image& downsampled, RandomStream& rng,
                          const AugmentConfig& cfg);

/// Deterministic inference view: downsample then centre crop.
Image center_view(const Image& chip, const AugmentConfig& cfg);

}  // namespace glomnet

#endif  // GLOMNET_AUGMENT_AUGMENT_H_
