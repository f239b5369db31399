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

/// @file sampling.h
/// @brief Bilinear sampling shared by the rotated-crop and augmentation
/// warps.

#ifndef GLOMNET_IMGCORE_SAMPLING_H_
#define GLOMNET_IMGCORE_SAMPLING_H_

#include <array>
#include <cmath>
#include <cstdint>

#include "glomnet/imgcore/image.h"

namespace glomnet {

/// Samples `img` at continuous position (x, y), pixel centres at integer
/// coordinates. Positions outside [0, w-1] x [0, h-1] produce `fill`.
/// Integral positions return the stored sample exactly.
inline void sample_bilinear(const Image& img, double x, double y,
                            const std::array<std::uint8_t, 3>& fill,
                            std::uint8_t* out) {
  constexpr double kEdge = 1e-9;
  const int channels = img.channels();
  const int w = img.width();
  const int h = img.height();
  if (!(x >= -kEdge && y >= -kEdge && x <= w - 1 + kEdge && y <= h - 1 + kEdge)) {
    for (int c = 0; c < channels; ++c) out[c] = fill[c];
    return;
  }
  int x0 = static_cast<int>(std::floor(x));
  int y0 = static_cast<int>(std::floor(y));
  double fx = x - x0;
  double fy = y - y0;
  if (x0 < 0) { x0 = 0; fx = 0.0; }
  if (y0 < 0) { y0 = 0; fy = 0.0; }
  if (x0 > w - 1) { x0 = w - 1; fx = 0.0; }
  if (y0 > h - 1) { y0 = h - 1; fy = 0.0; }
  const int x1 = x0 + 1 < w ? x0 + 1 : x0;
  const int y1 = y0 + 1 < h ? y0 + 1 : y0;
  const auto data = img.data();
  const std::size_t i00 = img.index(x0, y0), i10 = img.index(x1, y0);
  const std::size_t i01 = img.index(x0, y1), i11 = img.index(x1, y1);
  for (int c = 0; c < channels; ++c) {
    const double top = (1.0 - fx) * data[i00 + c] + fx * data[i10 + c];
    const double bottom = (1.0 - fx) * data[i01 + c] + fx * data[i11 + c];
    const double v = (1.0 - fy) * top + fy * bottom;
    const long r = std::lround(v);
    out[c] = static_cast<std::uint8_t>(r < 0 ? 0 : (r > 255 ? 255 : r));
  }
}

}  // namespace glomnet

#endif  // GLOMNET_IMGCORE_SAMPLING_H_
