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

/// @file training.h
/// @brief Patient-level cross-validated training of the regressor.
///
/// Targets are egfr_12mo / 100. Aux features (baseline eGFR) are z-scored
/// with statistics from the training chips of the fold. Training views are
/// random augmentations drawn from stream (seed, epoch, manifest row);
/// validation uses the deterministic centre view and averages chip
/// predictions per patient.

#ifndef GLOMNET_HARNESS_TRAINING_H_
#define GLOMNET_HARNESS_TRAINING_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "glomnet/chipper/records.h"
#include "glomnet/harness/config.h"
#include "glomnet/harness/evaluate.h"
#include "glomnet/harness/folds.h"
#include "glomnet/imgcore/image.h"
#include "glomnet/nn/network.h"

namespace glomnet {

inline constexpr double kTargetScale = 100.0;

/// Manifest rows with their chips, pre-downsampled by aug.load_downsample.
struct ChipDataset {
  Manifest rows;
  std::vector<Image> views;
  int load_downsample = 1;

  /// Loads every chip referenced by `manifest`; relative chip paths are
  /// resolved against `base_dir`.
  static ChipDataset load(const Manifest& manifest, const std::filesystem::path& base_dir,
                          int load_downsample);
  std::vector<std::string> patient_ids() const;
};

struct Model {
  NetworkConfig net;
  NetworkParams params;
  AuxScaling scaling;
};

struct EpochLog {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double val_mae = 0.0;
};

struct TrainResult {
  Model model;
  std::vector<EpochLog> log;
  /// Held-out patient predictions after the final epoch.
  std::vector<EvalRow> validation;
};

struct TrainHooks {
  /// Called after each epoch; may be empty.
  std::function<void(const EpochLog&)> on_epoch;
};

/// Converts an 8-bit HWC view into one NCHW batch slot scaled to [0, 1].
void write_chw(const Image& view, std::span<double> out);

/// Averages chip-level predictions; throws DataError on an empty list.
double average_chip_predictions(std::span<const double> chip_predictions);

/// Network predictions in eGFR units for already prepared views.
std::vector<double> predict_views(const Model& model, std::span<const Image> views,
                                  double baseline_egfr, int threads = 1);

/// Mean prediction over a patient's raw chips using the centre view.
double predict_patient(const Model& model, std::span<const Image> chips, double baseline_egfr,
                       const AugmentConfig& aug, int threads = 1);

/// Trains on every chip whose patient is outside `fold` and evaluates on
/// the patients inside it.
TrainResult train_fold(const ChipDataset& data, const FoldSplit& split, int fold,
                       const PipelineConfig& cfg, std::uint64_t seed, const TrainHooks& hooks = {});

struct FoldOutcome {
  int fold = 0;
  TrainResult result;
  EvalReport report;
};

struct CvResult {
  FoldSplit split;
  std::vector<FoldOutcome> folds;
  EvalReport pooled;
};

/// Runs every fold and pools the per-patient rows (each patient once,
/// sorted by patient id).
CvResult run_cv(const ChipDataset& data, int k, std::uint64_t seed, const PipelineConfig& cfg,
                const TrainHooks& hooks = {});

/// Seed for fold-local streams (init, shuffling, augmentation).
std::uint64_t fold_seed(std::uint64_t seed, int fold);

}  // namespace glomnet

#endif  // GLOMNET_HARNESS_TRAINING_H_
