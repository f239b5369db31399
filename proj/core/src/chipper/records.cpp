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

#include "glomnet/chipper/records.h"

#include <cmath>

#include "glomnet/csv.h"
#include "glomnet/error.h"

namespace glomnet {

namespace {

const std::vector<std::string> kRoiHeader = {"roi_path", "patient_id", "slide_id", "stain"};
const std::vector<std::string> kPatientHeader = {"patient_id", "baseline_egfr", "egfr_12mo"};
const std::vector<std::string> kManifestHeader = {
    "chip_path", "patient_id", "slide_id",      "roi_id",   "offset_x",
    "offset_y",  "stain",      "baseline_egfr", "egfr_12mo"};

std::string join(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) line += ',';
    line += fields[i];
  }
  return line + '\n';
}

void check_token(const std::string& value, std::string_view what) {
  if (value.find_first_of(",\n\r") != std::string::npos) {
    throw DataError(std::string(what) + " must not contain commas or newlines: '" +
                    value + "'");
  }
}

void check_egfr(double value, const std::string& patient, std::string_view column) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw DataError("patient " + patient + ": " + std::string(column) +
                    " must be positive and finite");
  }
}

}  // namespace

Stain parse_stain(std::string_view text) {
  if (text == "TRI") return Stain::kTri;
  if (text == "PASD" || text == "PAS-D") return Stain::kPasd;
  return Stain::kOther;
}

std::string_view stain_name(Stain stain) {
  switch (stain) {
    case Stain::kTri: return "TRI";
    case Stain::kPasd: return "PASD";
    case Stain::kOther: return "OTHER";
  }
  return "OTHER";
}

std::vector<RoiRecord> read_roi_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path, kRoiHeader);
  const auto base = path.parent_path();
  std::vector<RoiRecord> rois;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    RoiRecord roi;
    roi.roi_path = row[0];
    if (roi.roi_path.is_relative()) roi.roi_path = base / roi.roi_path;
    roi.patient_id = row[1];
    roi.slide_id = row[2];
    roi.stain = parse_stain(row[3]);
    if (roi.patient_id.empty()) {
      throw DataError(path.string() + ":" + std::to_string(table.lines[i]) +
                      ": empty patient_id");
    }
    rois.push_back(std::move(roi));
  }
  return rois;
}

void write_roi_csv(const std::vector<RoiRecord>& rois, const std::filesystem::path& path) {
  std::string text = join(kRoiHeader);
  for (const auto& roi : rois) {
    check_token(roi.roi_path.generic_string(), "roi_path");
    check_token(roi.patient_id, "patient_id");
    check_token(roi.slide_id, "slide_id");
    text += join({roi.roi_path.generic_string(), roi.patient_id, roi.slide_id,
                  std::string(stain_name(roi.stain))});
  }
  csv::write_text(path, text);
}

PatientTable read_patient_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path, kPatientHeader);
  PatientTable patients;
  for (const auto& row : table.rows) {
    PatientRecord p{row[0], csv::parse_double(row[1], "baseline_egfr"),
                    csv::parse_double(row[2], "egfr_12mo")};
    if (p.patient_id.empty()) throw DataError(path.string() + ": empty patient_id");
    check_egfr(p.baseline_egfr, p.patient_id, "baseline_egfr");
    check_egfr(p.egfr_12mo, p.patient_id, "egfr_12mo");
    if (!patients.emplace(p.patient_id, p).second) {
      throw DataError(path.string() + ": duplicate patient_id " + p.patient_id);
    }
  }
  return patients;
}

void write_patient_csv(const std::vector<PatientRecord>& patients,
                       const std::filesystem::path& path) {
  std::string text = join(kPatientHeader);
  for (const auto& p : patients) {
    check_token(p.patient_id, "patient_id");
    text += join({p.patient_id, csv::format_double(p.baseline_egfr),
                  csv::format_double(p.egfr_12mo)});
  }
  csv::write_text(path, text);
}

Manifest read_manifest(const std::filesystem::path& path) {
  const auto table = csv::read(path, kManifestHeader);
  Manifest manifest;
  manifest.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    ManifestRow m;
    m.chip_path = row[0];
    m.patient_id = row[1];
    m.slide_id = row[2];
    m.roi_id = row[3];
    m.offset_x = static_cast<int>(csv::parse_int(row[4], "offset_x"));
    m.offset_y = static_cast<int>(csv::parse_int(row[5], "offset_y"));
    m.stain = parse_stain(row[6]);
    m.baseline_egfr = csv::parse_double(row[7], "baseline_egfr");
    m.egfr_12mo = csv::parse_double(row[8], "egfr_12mo");
    if (m.patient_id.empty()) throw DataError(path.string() + ": empty patient_id");
    check_egfr(m.baseline_egfr, m.patient_id, "baseline_egfr");
    check_egfr(m.egfr_12mo, m.patient_id, "egfr_12mo");
    manifest.push_back(std::move(m));
  }
  return manifest;
}

std::string format_manifest(const Manifest& manifest) {
  std::string text = join(kManifestHeader);
  for (const auto& m : manifest) {
    check_token(m.chip_path.generic_string(), "chip_path");
    text += join({m.chip_path.generic_string(), m.patient_id, m.slide_id, m.roi_id,
                  std::to_string(m.offset_x), std::to_string(m.offset_y),
                  std::string(stain_name(m.stain)), csv::format_double(m.baseline_egfr),
                  csv::format_double(m.egfr_12mo)});
  }
  return text;
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  csv::write_text(path, format_manifest(manifest));
}

}  // namespace glomnet
