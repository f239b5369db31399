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

#include "glomnet/harness/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "glomnet/error.h"
#include "glomnet/imgcore/image_io.h"

namespace glomnet {

namespace {

// Minor stream tags under StreamPurpose::kSynth.
constexpr std::uint32_t kPatientStream = 0;
constexpr std::uint32_t kRoiStreamBase = 1;

std::string patient_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "P%03d", index + 1);
  return buf;
}

}  // namespace

void SynthConfig::validate() const {
  if (n_patients < 1 || rois_per_patient < 1 || roi_px < 1) {
    throw UsageError("synth counts and sizes must be >= 1");
  }
  if (max_blobs < 0) throw UsageError("synth.max_blobs must be >= 0");
  if (!(noise_egfr_sd >= 0.0)) throw UsageError("synth.noise_egfr_sd must be >= 0");
  if (!(blob_radius_min > 0.0) || blob_radius_max < blob_radius_min) {
    throw UsageError("synth blob radii must satisfy 0 < min <= max");
  }
  if (pixel_noise < 0 || pixel_noise > 127) throw UsageError("synth.pixel_noise must lie in 0..127");
}

std::vector<SynthPatient> synth_patients(const SynthConfig& cfg) {
  cfg.validate();
  std::vector<SynthPatient> patients;
  for (int i = 0; i < cfg.n_patients; ++i) {
    RandomStream rng(cfg.seed, stream_tag(StreamPurpose::kSynth, kPatientStream),
                     static_cast<std::uint64_t>(i));
    SynthPatient p;
    p.fibrosis = rng.uniform();
    const double egfr = std::clamp(110.0 - 90.0 * p.fibrosis + cfg.noise_egfr_sd * rng.normal(), 5.0, 150.0);
    const double baseline = std::clamp(egfr + 2.0 * cfg.noise_egfr_sd * rng.normal(), 5.0, 150.0);
    const double unrelated = rng.uniform();
    const double visual = cfg.ablate_image_signal ? unrelated : p.fibrosis;
    p.blobs_per_roi = static_cast<int>(std::lround(visual * cfg.max_blobs));
    p.record = {patient_name(i), baseline, egfr};
    patients.push_back(std::move(p));
  }
  return patients;
}

Image synth_roi(const SynthConfig& cfg, const SynthPatient& patient, int patient_index,
                int roi_index) {
  RandomStream rng(cfg.seed,
                   stream_tag(StreamPurpose::kSynth, kRoiStreamBase + static_cast<std::uint32_t>(roi_index)),
                   static_cast<std::uint64_t>(patient_index));
  const int side = cfg.roi_px;
  Image img(side, side, 3, 255);
  auto data = img.data();

  for (int b = 0; b < patient.blobs_per_roi; ++b) {
    const double cx = rng.uniform(0.0, side);
    const double cy = rng.uniform(0.0, side);
    const double ra = rng.uniform(cfg.blob_radius_min, cfg.blob_radius_max);
    const double rb = rng.uniform(cfg.blob_radius_min, cfg.blob_radius_max);
    const double theta = rng.uniform(0.0, std::numbers::pi);
    const double c = std::cos(theta), s = std::sin(theta);
    const double reach = std::max(ra, rb) + 1.0;
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - reach)));
    const int x1 = std::min(side - 1, static_cast<int>(std::ceil(cx + reach)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - reach)));
    const int y1 = std::min(side - 1, static_cast<int>(std::ceil(cy + reach)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double dx = x - cx, dy = y - cy;
        const double u = (dx * c + dy * s) / ra;
        const double v = (-dx * s + dy * c) / rb;
        if (u * u + v * v > 1.0) continue;
        for (int ch = 0; ch < 3; ++ch) data[img.index(x, y, ch)] = cfg.blob_color[ch];
      }
    }
  }

  if (cfg.pixel_noise > 0) {
    const int span = 2 * cfg.pixel_noise + 1;
    for (auto& v : data) {
      const int noisy = v + static_cast<int>(rng.below(static_cast<std::uint64_t>(span))) - cfg.pixel_noise;
      v = static_cast<std::uint8_t>(std::clamp(noisy, 0, 255));
    }
  }
  return img;
}

SynthOutput synth_generate(const SynthConfig& cfg, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  SynthOutput out;
  out.patients = synth_patients(cfg);
  std::error_code ec;
  fs::create_directories(out_dir / "rois", ec);
  if (ec) throw DataError("cannot create " + (out_dir / "rois").string() + ": " + ec.message());

  std::vector<PatientRecord> records;
  for (std::size_t i = 0; i < out.patients.size(); ++i) {
    const auto& p = out.patients[i];
    records.push_back(p.record);
    for (int r = 0; r < cfg.rois_per_patient; ++r) {
      const fs::path rel = fs::path("rois") / (p.record.patient_id + "_r" + std::to_string(r) + ".png");
      save_image(synth_roi(cfg, p, static_cast<int>(i), r), out_dir / rel);
      RoiRecord roi;
      roi.roi_path = rel;
      roi.patient_id = p.record.patient_id;
      roi.slide_id = "S1";
      roi.stain = r % 2 == 0 ? Stain::kTri : Stain::kPasd;
      out.rois.push_back(std::move(roi));
    }
  }
  out.patient_csv = out_dir / "patients.csv";
  out.roi_csv = out_dir / "rois.csv";
  write_patient_csv(records, out.patient_csv);
  write_roi_csv(out.rois, out.roi_csv);
  // Callers get absolute-ready paths; the CSV keeps them relative.
  for (auto& roi : out.rois) roi.roi_path = out_dir / roi.roi_path;
  return out;
}

}  // namespace glomnet
