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

/// @file segment.h
/// @brief Automatic tissue segmentation of a whole slide.
///
/// The pipeline is: Otsu threshold on luminance (tissue is darker than the
/// slide background) -> binary erosion -> binary dilation -> 8-connected
/// components filtered by area -> principal-axis oriented bounding box per
/// component -> bilinear rectified crop of each box.
///
/// This path serves inspection and QA; training consumes manually drawn
/// ROIs through the chipper.

#ifndef GLOMNET_SEGMENT_SEGMENT_H_
#define GLOMNET_SEGMENT_SEGMENT_H_

#include <array>
#include <cstdint>
#include <vector>

#include "glomnet/imgcore/image.h"

namespace glomnet {

/// 3x3 binary structuring element, row-major, centre at index 4.
using StructuringElement = std::array<bool, 9>;

inline constexpr StructuringElement kFullSquare = {true, true, true, true, true,
                                                   true, true, true, true};
inline constexpr StructuringElement kCross = {false, true, false, true, true,
                                              true, false, true, false};

struct SegmentConfig {
  int erode_iters = 2;
  int dilate_iters = 2;
  StructuringElement structuring_element = kFullSquare;
  /// Components smaller than this many pixels are dropped.
  std::int64_t min_area_px = 50'000;

  void validate() const;
};

/// Rectangle of extent `length` x `width` centred at (center_x, center_y),
/// with the long side at `angle_deg` from the image x-axis (x right, y
/// down). Pixel (x, y) has its centre at integer coordinates (x, y).
struct OrientedBox {
  double center_x = 0.0;
  double center_y = 0.0;
  double length = 0.0;
  double width = 0.0;
  double angle_deg = 0.0;

  double area() const { return length * width; }
};

struct ThresholdResult {
  int threshold = 0;
  Mask mask;
};

/// Rounded Rec.601 luminance, round(0.299 R + 0.587 G + 0.114 B).
/// Single-channel images pass through unchanged.
std::vector<std::uint8_t> luminance(const Image& img);

/// Otsu's method over the 256-bin luminance histogram. Foreground is
/// luminance < threshold. Ties go to the smallest maximizing threshold.
/// Throws DataError("degenerate histogram") for images with fewer than two
/// distinct luminance values.
ThresholdResult otsu_threshold(const Image& img);

/// Binary erosion; neighbours outside the mask count as background.
Mask erode(const Mask& mask, const StructuringElement& se, int iters);

/// Binary dilation, clipped at the mask border.
Mask dilate(const Mask& mask, const StructuringElement& se, int iters);

/// 8-connected components with at least `min_area_px` pixels, ordered by
/// descending area, ties broken by the first pixel in row-major order.
std::vector<Mask> connected_components(const Mask& mask, std::int64_t min_area_px);

/// Principal-axis bounding box of the foreground pixel centres. The box
/// is padded by half a pixel on each side so that a filled axis-aligned
/// W x H rectangle reports length/width of exactly W and H.
OrientedBox oriented_bbox(const Mask& component);

/// Samples the box into a round(length) x round(width) image whose x-axis
/// runs along the box's long side. Bilinear interpolation; samples outside
/// the source take `background`.
Image extract_rotated(const Image& img, const OrientedBox& box,
                      const std::array<std::uint8_t, 3>& background);

struct SlideSegment {
  OrientedBox box;
  std::int64_t area_px = 0;
  Image crop;
};

/// Full automatic path. A slide with no surviving component, including a
/// blank slide, yields an empty list.
std::vector<SlideSegment> segment_slide(const Image& img, const SegmentConfig& cfg);

}  // namespace glomnet

#endif  // GLOMNET_SEGMENT_SEGMENT_H_
