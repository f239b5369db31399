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

/// @file evaluate.h
/// @brief Per-patient regression metrics, the baseline-propagation
/// reference, and report export (CSV + SVG scatter).

#ifndef GLOMNET_HARNESS_EVALUATE_H_
#define GLOMNET_HARNESS_EVALUATE_H_

#include <filesystem>
#include <string>
#include <vector>

#include "glomnet/chipper/records.h"

namespace glomnet {

struct EvalRow {
  std::string patient_id;
  double truth = 0.0;
  double prediction = 0.0;
  double baseline = 0.0;

  friend bool operator==(const EvalRow&, const EvalRow&) = default;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  double mae = 0.0;
  double baseline_mae = 0.0;
  /// (baseline_mae - mae) / baseline_mae; 0 when baseline_mae is 0.
  double relative_reduction = 0.0;
  /// Ordinary least squares of prediction on truth.
  double fit_slope = 0.0;
  double fit_intercept = 0.0;
  /// RMS distance of the points from the 1-to-1 line, in eGFR units.
  double identity_residual_rms = 0.0;
};

/// The reference predictor: 12-month eGFR equals baseline eGFR.
inline double baseline_propagation(const PatientRecord& p) { return p.baseline_egfr; }

/// Needs at least two rows and non-constant truths (DataError otherwise).
EvalReport evaluate(std::vector<EvalRow> rows);

/// `patient_id,truth,prediction,baseline`
std::vector<EvalRow> read_predictions(const std::filesystem::path& path);
std::string format_predictions(const std::vector<EvalRow>& rows);

/// Scatter of truth (x) vs prediction (y) with the 1-to-1 line and the
/// fitted line; one <circle> per patient.
std::string render_scatter_svg(const EvalReport& report, const std::string& title);

/// Plain-text metric summary, one `name = value` per line.
std::string format_summary(const EvalReport& report);

struct ReportFiles {
  std::filesystem::path csv;
  std::filesystem::path svg;
};

/// Writes `<stem>.csv` and `<stem>.svg` into `out_dir`. An empty report is
/// rejected before anything touches the disk.
ReportFiles export_report(const EvalReport& report, const std::filesystem::path& out_dir,
                          const std::string& stem = "predictions",
                          const std::string& title = "12-month eGFR");

}  // namespace glomnet

#endif  // GLOMNET_HARNESS_EVALUATE_H_
