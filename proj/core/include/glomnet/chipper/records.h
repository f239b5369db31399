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

/// @file records.h
/// @brief Tabular records exchanged between pipeline stages and their CSV
/// encodings: ROI list, patient table, and chip manifest.

#ifndef GLOMNET_CHIPPER_RECORDS_H_
#define GLOMNET_CHIPPER_RECORDS_H_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace glomnet {

enum class Stain { kTri, kPasd, kOther };

Stain parse_stain(std::string_view text);
std::string_view stain_name(Stain stain);

struct RoiRecord {
  std::filesystem::path roi_path;
  std::string patient_id;
  std::string slide_id;
  Stain stain = Stain::kOther;
};

/// eGFR values are in mL/min/1.73 m^2.
struct PatientRecord {
  std::string patient_id;
  double baseline_egfr = 0.0;
  double egfr_12mo = 0.0;
};

using PatientTable = std::map<std::string, PatientRecord, std::less<>>;

struct ManifestRow {
  /// Relative to the manifest's directory unless absolute.
  std::filesystem::path chip_path;
  std::string patient_id;
  std::string slide_id;
  std::string roi_id;
  int offset_x = 0;
  int offset_y = 0;
  Stain stain = Stain::kOther;
  double baseline_egfr = 0.0;
  double egfr_12mo = 0.0;

  friend bool operator==(const ManifestRow&, const ManifestRow&) = default;
};

using Manifest = std::vector<ManifestRow>;

/// `roi_path,patient_id,slide_id,stain`. Relative ROI paths are resolved
/// against the CSV's directory.
std::vector<RoiRecord> read_roi_csv(const std::filesystem::path& path);
void write_roi_csv(const std::vector<RoiRecord>& rois, const std::filesystem::path& path);

/// `patient_id,baseline_egfr,egfr_12mo`. Rejects duplicates and
/// non-positive or non-finite eGFR.
PatientTable read_patient_csv(const std::filesystem::path& path);
void write_patient_csv(const std::vector<PatientRecord>& patients,
                       const std::filesystem::path& path);

/// `chip_path,patient_id,slide_id,roi_id,offset_x,offset_y,stain,baseline_egfr,egfr_12mo`
Manifest read_manifest(const std::filesystem::path& path);
std::string format_manifest(const Manifest& manifest);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

}  // namespace glomnet

#endif  // GLOMNET_CHIPPER_RECORDS_H_
