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

#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "glomnet/chipper/chipper.h"
#include "glomnet/chipper/records.h"
#include "glomnet/csv.h"
#include "glomnet/error.h"
#include "glomnet/harness/config.h"
#include "glomnet/harness/evaluate.h"
#include "glomnet/harness/folds.h"
#include "glomnet/harness/synth.h"
#include "glomnet/harness/training.h"
#include "glomnet/imgcore/image_io.h"
#include "glomnet/log.h"
#include "glomnet/nn/checkpoint.h"
#include "glomnet/segment/segment.h"

namespace fs = std::filesystem;
using namespace glomnet;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

PipelineConfig config_from(const std::string& path) {
  return path.empty() ? PipelineConfig{} : load_config(path);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::string format_log(const std::vector<EpochLog>& log) {
  std::string text = "epoch,lr,train_loss,val_mae\n";
  for (const auto& e : log) {
    text += std::to_string(e.epoch) + "," + csv::format_double(e.lr) + "," +
            csv::format_double(e.train_loss) + "," + csv::format_double(e.val_mae) + "\n";
  }
  return text;
}

ChipDataset load_dataset(const fs::path& manifest_path, const PipelineConfig& cfg) {
  const Manifest manifest = read_manifest(manifest_path);
  return ChipDataset::load(manifest, manifest_path.parent_path(), cfg.aug.load_downsample);
}

TrainHooks progress_hooks(int fold) {
  TrainHooks hooks;
  hooks.on_epoch = [fold](const EpochLog& e) {
    std::ostringstream msg;
    msg << "fold " << fold << " epoch " << e.epoch << " lr " << e.lr << " loss " << e.train_loss
        << " val_mae " << e.val_mae;
    log_info(msg.str());
  };
  return hooks;
}

void write_model(const fs::path& out, const Model& model, const PipelineConfig& cfg) {
  save_checkpoint(out / "params.glom", model.net, model.params);
  std::string info = format_config(cfg);
  for (std::size_t i = 0; i < model.scaling.mean.size(); ++i) {
    info += "# aux[" + std::to_string(i) + "] mean = " + csv::format_double(model.scaling.mean[i]) +
            ", std = " + csv::format_double(model.scaling.std[i]) + "\n";
  }
  csv::write_text(out / "model.cfg", info);
}

// ------------------------------------------------------------ commands ---

int cmd_synth(const std::string& config, const fs::path& out) {
  const PipelineConfig cfg = config_from(config);
  ensure_dir(out);
  const SynthOutput result = synth_generate(cfg.synth, out);
  std::cout << "wrote " << result.patients.size() << " patients and " << result.rois.size()
            << " ROIs to " << out.string() << "\n";
  return 0;
}

int cmd_segment(const fs::path& slide, const std::string& config, const fs::path& out) {
  const PipelineConfig cfg = config_from(config);
  const Image img = load_image(slide);
  if (img.channels() != 3) throw DataError("slide must be RGB");
  const int ds = cfg.seg_downsample;
  SegmentConfig seg = cfg.seg;
  seg.min_area_px = cfg.seg.min_area_px / (static_cast<std::int64_t>(ds) * ds);

  std::vector<SlideSegment> segments;
  if (ds == 1) {
    segments = segment_slide(img, seg);
  } else {
    // Analyse a reduced copy, then cut the crops from the full image.
    const std::array<std::uint8_t, 3> white = {255, 255, 255};
    for (auto s : segment_slide(downsample(img, ds), seg)) {
      s.box.center_x = s.box.center_x * ds + (ds - 1) / 2.0;
      s.box.center_y = s.box.center_y * ds + (ds - 1) / 2.0;
      s.box.length *= ds;
      s.box.width *= ds;
      s.area_px *= static_cast<std::int64_t>(ds) * ds;
      s.crop = extract_rotated(img, s.box, white);
      segments.push_back(std::move(s));
    }
  }

  ensure_dir(out);
  const std::string slide_id = slide.stem().string();
  std::string text = "slide_id,component_idx,center_x,center_y,length,width,angle_deg,area_px\n";
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    save_image(s.crop, out / (slide_id + "_c" + std::to_string(i) + ".png"));
    text += slide_id + "," + std::to_string(i) + "," + csv::format_double(s.box.center_x) + "," +
            csv::format_double(s.box.center_y) + "," + csv::format_double(s.box.length) + "," +
            csv::format_double(s.box.width) + "," + csv::format_double(s.box.angle_deg) + "," +
            std::to_string(s.area_px) + "\n";
  }
  csv::write_text(out / "boxes.csv", text);
  std::cout << segments.size() << " components written to " << out.string() << "\n";
  return 0;
}

struct ChipArgs {
  fs::path rois, patients, out;
  std::string config;
  std::optional<int> window, downsample;
  std::optional<double> overlap;
  bool lenient = false;
  int threads = 1;
};

int cmd_chip(const ChipArgs& a) {
  const PipelineConfig base = config_from(a.config);
  ChipConfig chip = base.chip;
  if (a.window) chip.window_px = *a.window;
  if (a.overlap) chip.overlap_frac = *a.overlap;
  if (a.downsample) chip.downsample_factor = *a.downsample;
  chip.validate();
  const auto rois = read_roi_csv(a.rois);
  const auto patients = read_patient_csv(a.patients);
  ChipDbOptions options;
  options.strict = !a.lenient;
  options.threads = a.threads;
  ensure_dir(a.out);
  const Manifest manifest = build_chip_db(rois, patients, chip, a.out, options);
  std::cout << manifest.size() << " chips written; manifest " << (a.out / "manifest.csv").string()
            << "\n";
  return 0;
}

struct TrainArgs {
  fs::path manifest, out;
  std::string config, aux;
  int fold = 0;
  int k = 5;
  std::uint64_t seed = 0;
  int threads = 0;
};

PipelineConfig training_config(const TrainArgs& a) {
  PipelineConfig cfg = config_from(a.config);
  if (!a.aux.empty()) {
    cfg.aux = parse_aux_mode(a.aux);
    cfg.net.aux_dim = cfg.aux == AuxMode::kOff ? 0 : 1;
  }
  if (a.threads > 0) cfg.threads = a.threads;
  cfg.validate_training();
  return cfg;
}

int cmd_train(const TrainArgs& a) {
  const PipelineConfig cfg = training_config(a);
  const ChipDataset data = load_dataset(a.manifest, cfg);
  const FoldSplit split = assign_folds(data.patient_ids(), a.k, a.seed);
  if (a.fold < 0 || a.fold >= a.k) throw UsageError("--fold must be in [0, k)");
  const TrainResult result = train_fold(data, split, a.fold, cfg, a.seed, progress_hooks(a.fold));
  ensure_dir(a.out);
  write_model(a.out, result.model, cfg);
  csv::write_text(a.out / "train_log.csv", format_log(result.log));
  csv::write_text(a.out / "predictions.csv", format_predictions(result.validation));
  std::cout << "fold " << a.fold << " val_mae " << result.log.back().val_mae << "\n";
  return 0;
}

int cmd_cv(const TrainArgs& a) {
  const PipelineConfig cfg = training_config(a);
  const ChipDataset data = load_dataset(a.manifest, cfg);
  TrainHooks hooks;
  int fold_counter = 0;
  hooks.on_epoch = [&fold_counter, &cfg](const EpochLog& e) {
    std::ostringstream msg;
    msg << "fold " << fold_counter << " epoch " << e.epoch << " loss " << e.train_loss << " val_mae "
        << e.val_mae;
    log_info(msg.str());
    if (e.epoch + 1 == cfg.opt.epochs) ++fold_counter;
  };
  const CvResult cv = run_cv(data, a.k, a.seed, cfg, hooks);
  ensure_dir(a.out);
  std::string summary = "aux = " + std::string(aux_mode_name(cfg.aux)) + "\n";
  for (const auto& f : cv.folds) {
    const fs::path dir = a.out / ("fold" + std::to_string(f.fold));
    ensure_dir(dir);
    export_report(f.report, dir, "predictions", "fold " + std::to_string(f.fold));
    csv::write_text(dir / "train_log.csv", format_log(f.result.log));
    write_model(dir, f.result.model, cfg);
    summary += "[fold " + std::to_string(f.fold) + "]\n" + format_summary(f.report);
  }
  export_report(cv.pooled, a.out, "predictions", "pooled 12-month eGFR");
  summary += "[pooled]\n" + format_summary(cv.pooled);
  csv::write_text(a.out / "summary.txt", summary);
  std::cout << "[pooled]\n" << format_summary(cv.pooled);
  return 0;
}

int cmd_eval(const fs::path& predictions, const fs::path& out) {
  const EvalReport report = evaluate(read_predictions(predictions));
  ensure_dir(out);
  export_report(report, out);
  csv::write_text(out / "summary.txt", format_summary(report));
  std::cout << format_summary(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"glomnet: biopsy image to 12-month eGFR regression pipeline"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress progress messages");

  std::string config;
  fs::path out;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic ROI dataset");
  synth->add_option("--config", config, "Config file")->check(CLI::ExistingFile);
  synth->add_option("--out", out, "Output directory")->required();

  fs::path slide;
  auto* segment = app.add_subcommand("segment", "Segment tissue cores on a slide image");
  segment->add_option("--slide", slide, "Slide image (PNG or TIFF)")->required()->check(CLI::ExistingFile);
  segment->add_option("--config", config, "Config file")->check(CLI::ExistingFile);
  segment->add_option("--out", out, "Output directory")->required();

  ChipArgs chip_args;
  auto* chip = app.add_subcommand("chip", "Tile ROIs into a chip database");
  chip->add_option("--rois", chip_args.rois, "ROI CSV")->required()->check(CLI::ExistingFile);
  chip->add_option("--patients", chip_args.patients, "Patient CSV")->required()->check(CLI::ExistingFile);
  chip->add_option("--window", chip_args.window, "Window side in pixels (default 2000)");
  chip->add_option("--overlap", chip_args.overlap, "Window overlap fraction (default 0.5)");
  chip->add_option("--downsample", chip_args.downsample, "Chip downsample factor (default 2)");
  chip->add_option("--config", chip_args.config, "Config file")->check(CLI::ExistingFile);
  chip->add_option("--threads", chip_args.threads, "Worker threads (0 = all cores)");
  chip->add_flag("--lenient", chip_args.lenient, "Skip bad ROIs instead of aborting");
  chip->add_option("--out", chip_args.out, "Output directory")->required();

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train one cross-validation fold");
  train->add_option("--manifest", train_args.manifest, "Chip manifest CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--fold", train_args.fold, "Held-out fold index")->required();
  train->add_option("--k", train_args.k, "Fold count");
  train->add_option("--seed", train_args.seed, "Split and training seed");
  train->add_option("--config", train_args.config, "Config file")->check(CLI::ExistingFile);
  train->add_option("--aux", train_args.aux, "Aux input: off or baseline_egfr");
  train->add_option("--threads", train_args.threads, "Worker threads (overrides train.threads)");
  train->add_option("--out", train_args.out, "Output directory")->required();

  TrainArgs cv_args;
  auto* cv = app.add_subcommand("cv", "Run patient-level k-fold cross-validation");
  cv->add_option("--manifest", cv_args.manifest, "Chip manifest CSV")->required()->check(CLI::ExistingFile);
  cv->add_option("--k", cv_args.k, "Fold count");
  cv->add_option("--seed", cv_args.seed, "Split and training seed");
  cv->add_option("--config", cv_args.config, "Config file")->check(CLI::ExistingFile);
  cv->add_option("--aux", cv_args.aux, "Aux input: off or baseline_egfr");
  cv->add_option("--threads", cv_args.threads, "Worker threads (overrides train.threads)");
  cv->add_option("--out", cv_args.out, "Output directory")->required();

  fs::path predictions;
  auto* eval = app.add_subcommand("eval", "Score a predictions CSV");
  eval->add_option("--predictions", predictions, "CSV with patient_id,truth,prediction,baseline")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  set_quiet(quiet);

  try {
    if (*synth) return cmd_synth(config, out);
    if (*segment) return cmd_segment(slide, config, out);
    if (*chip) return cmd_chip(chip_args);
    if (*train) return cmd_train(train_args);
    if (*cv) return cmd_cv(cv_args);
    if (*eval) return cmd_eval(predictions, out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
