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

#include "glomnet/chipper/chipper.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <set>
#include <thread>
#include <tuple>

#include "glomnet/error.h"
#include "glomnet/imgcore/image_io.h"
#include "glomnet/log.h"

namespace glomnet {

namespace {

// Ids are opaque; only a conservative character set reaches the filesystem.
std::string path_token(std::string_view id) {
  std::string out(id);
  for (auto& ch : out) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '-' || ch == '_' || ch == '.';
    if (!ok) ch = '_';
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

struct RoiOutcome {
  std::vector<ManifestRow> rows;
  std::exception_ptr error;
  std::string skip_reason;
};

}  // namespace

int ChipConfig::stride() const {
  return static_cast<int>(std::lround(window_px * (1.0 - overlap_frac)));
}

void ChipConfig::validate() const {
  if (window_px < 1) throw UsageError("chip window must be >= 1 px");
  if (downsample_factor < 1) throw UsageError("chip downsample factor must be >= 1");
  if (!(overlap_frac >= 0.0 && overlap_frac < 1.0)) {
    throw UsageError("chip overlap must lie in [0, 1)");
  }
  if (window_px % downsample_factor != 0) {
    throw UsageError("chip window must be divisible by the downsample factor");
  }
  const double exact = window_px * (1.0 - overlap_frac);
  if (stride() < 1 || std::abs(exact - stride()) > 1e-9) {
    throw UsageError("chip stride window*(1-overlap) must be a positive integer");
  }
}

std::vector<int> plan_windows(int dim, int window, int stride) {
  if (window < 1 || stride < 1) throw DataError("plan_windows: window and stride must be >= 1");
  std::vector<int> offsets;
  for (long long off = 0; off + window <= dim; off += stride) {
    offsets.push_back(static_cast<int>(off));
  }
  return offsets;
}

std::string roi_id_of(const RoiRecord& roi) { return roi.roi_path.stem().string(); }

std::vector<Chip> chip_roi(const Image& roi, const RoiRecord& meta,
                           const std::string& roi_id, const ChipConfig& cfg) {
  cfg.validate();
  if (roi.channels() != 3) {
    throw DataError("ROI " + roi_id + " must have 3 channels, has " +
                    std::to_string(roi.channels()));
  }
  const auto xs = plan_windows(roi.width(), cfg.window_px, cfg.stride());
  const auto ys = plan_windows(roi.height(), cfg.window_px, cfg.stride());
  std::vector<Chip> chips;
  if (xs.empty() || ys.empty()) {
    log_warning("ROI " + roi_id + " (" + std::to_string(roi.width()) + "x" +
                std::to_string(roi.height()) + ") is smaller than the " +
                std::to_string(cfg.window_px) + " px window; skipped");
    return chips;
  }
  chips.reserve(xs.size() * ys.size());
  for (int oy : ys) {
    for (int ox : xs) {
      Chip chip;
      chip.image = downsample(crop(roi, ox, oy, cfg.window_px, cfg.window_px),
                              cfg.downsample_factor);
      chip.patient_id = meta.patient_id;
      chip.slide_id = meta.slide_id;
      chip.roi_id = roi_id;
      chip.offset_x = ox;
      chip.offset_y = oy;
      chips.push_back(std::move(chip));
    }
  }
  return chips;
}

Manifest build_chip_db(const std::vector<RoiRecord>& rois, const PatientTable& patients,
                       const ChipConfig& cfg, const std::filesystem::path& out_dir,
                       const ChipDbOptions& options) {
  cfg.validate();
  namespace fs = std::filesystem;

  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (const auto& roi : rois) {
    if (!seen.emplace(roi.patient_id, roi.slide_id, roi_id_of(roi)).second) {
      throw DataError("duplicate ROI id '" + roi_id_of(roi) + "' for patient " +
                      roi.patient_id + ", slide " + roi.slide_id);
    }
  }

  std::error_code ec;
  fs::create_directories(out_dir / "chips", ec);
  if (ec) throw DataError("cannot create " + (out_dir / "chips").string() + ": " + ec.message());

  std::vector<RoiOutcome> outcomes(rois.size());
  auto process = [&](std::size_t i) {
    const RoiRecord& roi = rois[i];
    RoiOutcome& outcome = outcomes[i];
    try {
      const auto patient = patients.find(roi.patient_id);
      if (patient == patients.end()) {
        if (options.strict) throw DataError("ROI references unknown patient '" + roi.patient_id + "'");
        outcome.skip_reason = "unknown patient '" + roi.patient_id + "'";
        return;
      }
      Image image;
      try {
        image = load_image(roi.roi_path);
      } catch (const DataError& e) {
        if (options.strict) throw;
        outcome.skip_reason = e.what();
        return;
      }
      const std::string roi_id = roi_id_of(roi);
      const fs::path rel_dir =
          fs::path("chips") / path_token(roi.patient_id) / path_token(roi.slide_id);
      fs::create_directories(out_dir / rel_dir);
      for (auto& chip : chip_roi(image, roi, roi_id, cfg)) {
        ManifestRow row;
        row.chip_path = rel_dir / (path_token(roi_id) + "_y" + std::to_string(chip.offset_y) +
                                   "_x" + std::to_string(chip.offset_x) + ".png");
        save_image(chip.image, out_dir / row.chip_path);
        row.patient_id = roi.patient_id;
        row.slide_id = roi.slide_id;
        row.roi_id = roi_id;
        row.offset_x = chip.offset_x;
        row.offset_y = chip.offset_y;
        row.stain = roi.stain;
        row.baseline_egfr = patient->second.baseline_egfr;
        row.egfr_12mo = patient->second.egfr_12mo;
        outcome.rows.push_back(std::move(row));
      }
    } catch (...) {
      outcome.error = std::current_exception();
    }
  };

  int threads = options.threads > 0 ? options.threads
                                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, std::max<int>(1, static_cast<int>(rois.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < rois.size(); ++i) process(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (int t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < rois.size(); i = next++) process(i);
      });
    }
  }

  Manifest manifest;
  for (std::size_t i = 0; i < rois.size(); ++i) {
    if (outcomes[i].error) std::rethrow_exception(outcomes[i].error);
    if (!outcomes[i].skip_reason.empty()) {
      log_warning("skipping ROI " + rois[i].roi_path.string() + ": " + outcomes[i].skip_reason);
    }
    for (auto& row : outcomes[i].rows) manifest.push_back(std::move(row));
  }
  std::sort(manifest.begin(), manifest.end(), [](const ManifestRow& a, const ManifestRow& b) {
    return std::tie(a.patient_id, a.slide_id, a.roi_id, a.offset_y, a.offset_x) <
           std::tie(b.patient_id, b.slide_id, b.roi_id, b.offset_y, b.offset_x);
  });
  write_manifest(manifest, out_dir / "manifest.csv");
  return manifest;
}

}  // namespace glomnet
