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

/// @file synth.h
/// @brief Seeded synthetic cohort generator.
///
/// Each patient gets a latent fibrosis score f ~ U[0, 1]:
///
///   egfr_12mo     = clamp(110 - 90 f + N(0, sd),        5, 150)
///   baseline_egfr = clamp(egfr_12mo + N(0, 2 sd),       5, 150)
///
/// and `rois_per_patient` ROI images: a white field with round(f * max_blobs)
/// dark elliptical blobs, so the visual signal is monotone in f. With
/// `ablate_image_signal` the blob count is drawn independently of f.

#ifndef GLOMNET_HARNESS_SYNTH_H_
#define GLOMNET_HARNESS_SYNTH_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "glomnet/chipper/records.h"
#include "glomnet/imgcore/image.h"
#include "glomnet/random.h"

namespace glomnet {

struct SynthConfig {
  int n_patients = 40;
  int rois_per_patient = 2;
  int roi_px = 480;
  std::uint64_t seed = 1;
  double noise_egfr_sd = 5.0;
  int max_blobs = 24;
  double blob_radius_min = 6.0;
  double blob_radius_max = 12.0;
  std::array<std::uint8_t, 3> blob_color = {110, 40, 120};
  /// Per-sample uniform noise amplitude added to every pixel.
  int pixel_noise = 6;
  bool ablate_image_signal = false;

  void validate() const;
};

struct SynthPatient {
  PatientRecord record;
  double fibrosis = 0.0;
  int blobs_per_roi = 0;
};

struct SynthOutput {
  std::vector<SynthPatient> patients;
  std::vector<RoiRecord> rois;
  std::filesystem::path patient_csv;
  std::filesystem::path roi_csv;
};

/// Draws the patient table only (no images).
std::vector<SynthPatient> synth_patients(const SynthConfig& cfg);

/// Renders ROI `roi_index` of `patient`.
Image synth_roi(const SynthConfig& cfg, const SynthPatient& patient, int patient_index,
                int roi_index);

/// Writes `patients.csv`, `rois.csv` and `rois/<patient>_r<i>.png` under
/// `out_dir`. Output bytes depend only on `cfg`.
SynthOutput synth_generate(const SynthConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace glomnet

#endif  // GLOMNET_HARNESS_SYNTH_H_
