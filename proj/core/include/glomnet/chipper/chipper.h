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

/// @file chipper.h
/// @brief Sliding-window tiling of ROI images into fixed-size chips and the
/// on-disk chip database.
///
/// With the default geometry a 2000 px window moves in 1000 px steps (50%
/// overlap) and each window is block-mean downsampled by 2, giving
/// 1000 x 1000 chips. Partial windows at the right/bottom edges are
/// discarded, never padded.

#ifndef GLOMNET_CHIPPER_CHIPPER_H_
#define GLOMNET_CHIPPER_CHIPPER_H_

#include <filesystem>
#include <string>
#include <vector>

#include "glomnet/chipper/records.h"
#include "glomnet/imgcore/image.h"

namespace glomnet {

struct ChipConfig {
  int window_px = 2000;
  double overlap_frac = 0.5;
  int downsample_factor = 2;

  /// window_px * (1 - overlap_frac); validate() requires it to be integral.
  int stride() const;
  int chip_side() const { return window_px / downsample_factor; }
  void validate() const;
};

struct Chip {
  Image image;
  std::string patient_id;
  std::string slide_id;
  std::string roi_id;
  int offset_x = 0;
  int offset_y = 0;
};

/// Window offsets 0, stride, 2*stride, ... with offset + window <= dim.
std::vector<int> plan_windows(int dim, int window, int stride);

/// Tiles one ROI. An ROI smaller than a window in either axis yields no
/// chips and a warning. `roi_id` names the ROI in the chip provenance.
std::vector<Chip> chip_roi(const Image& roi, const RoiRecord& meta,
                           const std::string& roi_id, const ChipConfig& cfg);

/// ROI identifier used in manifests: the file stem of the ROI path.
std::string roi_id_of(const RoiRecord& roi);

struct ChipDbOptions {
  /// Abort on unknown patients or unreadable ROIs; otherwise skip with a
  /// warning.
  bool strict = true;
  /// Worker threads for per-ROI processing; 0 picks hardware concurrency.
  int threads = 1;
};

/// Writes every chip as PNG under `out_dir/chips/` and the manifest to
/// `out_dir/manifest.csv`. Rows are sorted by (patient_id, slide_id,
/// roi_id, offset_y, offset_x) whatever the completion order, so rebuilding
/// from identical inputs reproduces identical bytes.
Manifest build_chip_db(const std::vector<RoiRecord>& rois, const PatientTable& patients,
                       const ChipConfig& cfg, const std::filesystem::path& out_dir,
                       const ChipDbOptions& options = {});

}  // namespace glomnet

#endif  // GLOMNET_CHIPPER_CHIPPER_H_
