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

#include "glomnet/harness/evaluate.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "glomnet/csv.h"
#include "glomnet/error.h"

namespace glomnet {

namespace {

const std::vector<std::string> kPredictionHeader = {"patient_id", "truth", "prediction", "baseline"};

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

EvalReport evaluate(std::vector<EvalRow> rows) {
  if (rows.size() < 2) throw DataError("evaluate: need at least 2 rows");
  const double n = static_cast<double>(rows.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (const auto& r : rows) {
    if (!std::isfinite(r.truth) || !std::isfinite(r.prediction) || !std::isfinite(r.baseline)) {
      throw NumericError("evaluate: non-finite value for patient " + r.patient_id);
    }
    mean_x += r.truth;
    mean_y += r.prediction;
  }
  mean_x /= n;
  mean_y /= n;

  EvalReport report;
  double sxx = 0.0, sxy = 0.0, sq = 0.0;
  for (const auto& r : rows) {
    report.mae += std::abs(r.truth - r.prediction);
    report.baseline_mae += std::abs(r.truth - r.baseline);
    const double dx = r.truth - mean_x;
    sxx += dx * dx;
    sxy += dx * (r.prediction - mean_y);
    sq += (r.prediction - r.truth) * (r.prediction - r.truth);
  }
  if (sxx == 0.0) throw DataError("evaluate: truths are constant; the fit is undefined");
  report.mae /= n;
  report.baseline_mae /= n;
  report.relative_reduction =
      report.baseline_mae > 0.0 ? (report.baseline_mae - report.mae) / report.baseline_mae : 0.0;
  report.fit_slope = sxy / sxx;
  report.fit_intercept = mean_y - report.fit_slope * mean_x;
  report.identity_residual_rms = std::sqrt(sq / n);
  report.rows = std::move(rows);
  return report;
}

std::vector<EvalRow> read_predictions(const std::filesystem::path& path) {
  const auto table = csv::read(path, kPredictionHeader);
  std::vector<EvalRow> rows;
  for (const auto& f : table.rows) {
    rows.push_back({f[0], csv::parse_double(f[1], "truth"), csv::parse_double(f[2], "prediction"),
                    csv::parse_double(f[3], "baseline")});
  }
  return rows;
}

std::string format_predictions(const std::vector<EvalRow>& rows) {
  std::string text = "patient_id,truth,prediction,baseline\n";
  for (const auto& r : rows) {
    text += r.patient_id + "," + csv::format_double(r.truth) + "," +
            csv::format_double(r.prediction) + "," + csv::format_double(r.baseline) + "\n";
  }
  return text;
}

std::string render_scatter_svg(const EvalReport& report, const std::string& title) {
  constexpr double kSize = 480.0, kMargin = 60.0;
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& r : report.rows) {
    lo = std::min({lo, r.truth, r.prediction});
    hi = std::max({hi, r.truth, r.prediction});
  }
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const double span = kSize - 2 * kMargin;
  auto px = [&](double v) { return kMargin + (v - lo) / (hi - lo) * span; };
  auto py = [&](double v) { return kSize - kMargin - (v - lo) / (hi - lo) * span; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" viewBox=\"0 0 480 480\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"480\" height=\"480\" fill=\"white\"/>\n";
  svg += "<text x=\"240\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">" + escape_xml(title) + "</text>\n";
  // axes
  svg += "<line x1=\"" + fixed(kMargin) + "\" y1=\"" + fixed(kSize - kMargin) + "\" x2=\"" +
         fixed(kSize - kMargin) + "\" y2=\"" + fixed(kSize - kMargin) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fixed(kMargin) + "\" y1=\"" + fixed(kMargin) + "\" x2=\"" + fixed(kMargin) +
         "\" y2=\"" + fixed(kSize - kMargin) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    svg += "<text x=\"" + fixed(px(v)) + "\" y=\"" + fixed(kSize - kMargin + 18) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + fixed(v) + "</text>\n";
    svg += "<text x=\"" + fixed(kMargin - 6) + "\" y=\"" + fixed(py(v) + 4) +
           "\" text-anchor=\"end\" font-size=\"11\">" + fixed(v) + "</text>\n";
  }
  svg += "<text x=\"240\" y=\"" + fixed(kSize - 16) +
         "\" text-anchor=\"middle\" font-size=\"13\">True eGFR (mL/min/1.73 m&#178;)</text>\n";
  svg += "<text x=\"18\" y=\"240\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 240)\">"
         "Predicted eGFR (mL/min/1.73 m&#178;)</text>\n";
  // 1-to-1 reference
  svg += "<line class=\"identity\" x1=\"" + fixed(px(lo)) + "\" y1=\"" + fixed(py(lo)) + "\" x2=\"" +
         fixed(px(hi)) + "\" y2=\"" + fixed(py(hi)) +
         "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
  // least-squares fit, clipped to the plot range in x
  const double y_lo = report.fit_intercept + report.fit_slope * lo;
  const double y_hi = report.fit_intercept + report.fit_slope * hi;
  svg += "<line class=\"fit\" x1=\"" + fixed(px(lo)) + "\" y1=\"" + fixed(py(y_lo)) + "\" x2=\"" +
         fixed(px(hi)) + "\" y2=\"" + fixed(py(y_hi)) + "\" stroke=\"steelblue\" stroke-width=\"2\"/>\n";
  svg += "<g class=\"points\">\n";
  for (const auto& r : report.rows) {
    svg += "<circle cx=\"" + fixed(px(r.truth)) + "\" cy=\"" + fixed(py(r.prediction)) +
           "\" r=\"4\" fill=\"firebrick\" fill-opacity=\"0.7\"><title>" + escape_xml(r.patient_id) +
           "</title></circle>\n";
  }
  svg += "</g>\n";
  svg += "<text x=\"" + fixed(kMargin + 8) + "\" y=\"" + fixed(kMargin + 14) + "\" font-size=\"12\">MAE " +
         fixed(report.mae) + " | baseline " + fixed(report.baseline_mae) + " | slope " +
         fixed(report.fit_slope) + "</text>\n";
  svg += "</svg>\n";
  return svg;
}

std::string format_summary(const EvalReport& report) {
  std::string s;
  s += "patients = " + std::to_string(report.rows.size()) + "\n";
  s += "mae = " + csv::format_double(report.mae) + "\n";
  s += "baseline_mae = " + csv::format_double(report.baseline_mae) + "\n";
  s += "relative_reduction = " + csv::format_double(report.relative_reduction) + "\n";
  s += "fit_slope = " + csv::format_double(report.fit_slope) + "\n";
  s += "fit_intercept = " + csv::format_double(report.fit_intercept) + "\n";
  s += "identity_residual_rms = " + csv::format_double(report.identity_residual_rms) + "\n";
  return s;
}

ReportFiles export_report(const EvalReport& report, const std::filesystem::path& out_dir,
                          const std::string& stem, const std::string& title) {
  if (report.rows.empty()) throw DataError("export_report: report has no rows");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create " + out_dir.string() + ": " + ec.message());
  ReportFiles files{out_dir / (stem + ".csv"), out_dir / (stem + ".svg")};
  csv::write_text(files.csv, format_predictions(report.rows));
  csv::write_text(files.svg, render_scatter_svg(report, title));
  return files;
}

}  // namespace glomnet
