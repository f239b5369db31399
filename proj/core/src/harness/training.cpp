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

#include "glomnet/harness/training.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <set>
#include <thread>

#include "glomnet/augment/augment.h"
#include "glomnet/error.h"
#include "glomnet/imgcore/image_io.h"
#include "glomnet/nn/layers.h"
#include "glomnet/optim/rmsprop.h"
#include "glomnet/random.h"

namespace glomnet {

namespace {

// Samples per gradient shard. Shard gradients are summed in shard order,
// so results do not depend on the number of worker threads.
constexpr std::size_t kShardSize = 8;
constexpr std::size_t kPredictBatch = 32;

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  {
    std::vector<std::jthread> workers;
    const int n = std::min<int>(threads, static_cast<int>(count));
    for (int t = 0; t < n; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Tensor aux_batch(const Model& model, std::span<const double> baselines) {
  const auto a = static_cast<std::size_t>(model.net.aux_dim);
  Tensor aux({baselines.size(), a});
  if (a == 0) return aux;
  if (a != 1) throw UsageError("only baseline eGFR is supported as an aux feature");
  for (std::size_t i = 0; i < baselines.size(); ++i) aux[i] = baselines[i];
  return model.scaling.apply(aux);
}

double mean_abs_error(const std::vector<EvalRow>& rows) {
  double sum = 0.0;
  for (const auto& r : rows) sum += std::abs(r.truth - r.prediction);
  return rows.empty() ? 0.0 : sum / static_cast<double>(rows.size());
}

// Per-patient predictions for the given manifest rows.
std::vector<EvalRow> predict_rows(const Model& model, const ChipDataset& data,
                                  const std::vector<std::size_t>& indices,
                                  const AugmentConfig& aug, int threads) {
  std::map<std::string, std::vector<std::size_t>> by_patient;
  for (auto i : indices) by_patient[data.rows[i].patient_id].push_back(i);
  std::vector<EvalRow> rows;
  for (const auto& [patient, chips] : by_patient) {
    std::vector<Image> views;
    views.reserve(chips.size());
    for (auto i : chips) views.push_back(center_crop(data.views[i], aug.crop_px, aug.crop_px));
    const auto& first = data.rows[chips.front()];
    const auto preds = predict_views(model, views, first.baseline_egfr, threads);
    rows.push_back({patient, first.egfr_12mo, average_chip_predictions(preds), first.baseline_egfr});
  }
  return rows;
}

EvalReport lenient_report(std::vector<EvalRow> rows) {
  std::set<double> truths;
  for (const auto& r : rows) truths.insert(r.truth);
  if (rows.size() >= 2 && truths.size() >= 2) return evaluate(std::move(rows));
  EvalReport report;
  report.mae = mean_abs_error(rows);
  double b = 0.0;
  for (const auto& r : rows) b += std::abs(r.truth - r.baseline);
  report.baseline_mae = rows.empty() ? 0.0 : b / static_cast<double>(rows.size());
  report.relative_reduction =
      report.baseline_mae > 0.0 ? (report.baseline_mae - report.mae) / report.baseline_mae : 0.0;
  report.fit_slope = report.fit_intercept = std::nan("");
  double sq = 0.0;
  for (const auto& r : rows) sq += (r.prediction - r.truth) * (r.prediction - r.truth);
  report.identity_residual_rms = rows.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(rows.size()));
  report.rows = std::move(rows);
  return report;
}

}  // namespace

ChipDataset ChipDataset::load(const Manifest& manifest, const std::filesystem::path& base_dir,
                              int load_downsample) {
  if (manifest.empty()) throw DataError("manifest is empty");
  ChipDataset data;
  data.rows = manifest;
  data.load_downsample = load_downsample;
  data.views.reserve(manifest.size());
  std::map<std::string, std::pair<double, double>> targets;
  for (const auto& row : manifest) {
    const auto [it, inserted] = targets.emplace(row.patient_id, std::make_pair(row.baseline_egfr, row.egfr_12mo));
    if (!inserted && it->second != std::make_pair(row.baseline_egfr, row.egfr_12mo)) {
      throw DataError("patient " + row.patient_id + " has inconsistent eGFR values across chips");
    }
    const auto path = row.chip_path.is_absolute() ? row.chip_path : base_dir / row.chip_path;
    Image chip = load_image(path);
    if (chip.channels() != 3) throw DataError("chip " + path.string() + " is not RGB");
    data.views.push_back(downsample(chip, load_downsample));
  }
  return data;
}

std::vector<std::string> ChipDataset::patient_ids() const {
  std::set<std::string> ids;
  for (const auto& r : rows) ids.insert(r.patient_id);
  return {ids.begin(), ids.end()};
}

void write_chw(const Image& view, std::span<double> out) {
  const int w = view.width(), h = view.height(), ch = view.channels();
  if (out.size() != static_cast<std::size_t>(w) * h * ch) throw DataError("write_chw: size mismatch");
  const auto src = view.data();
  const std::size_t plane = static_cast<std::size_t>(w) * h;
  for (std::size_t p = 0; p < plane; ++p) {
    for (int c = 0; c < ch; ++c) out[c * plane + p] = src[p * ch + c] / 255.0;
  }
}

double average_chip_predictions(std::span<const double> chip_predictions) {
  if (chip_predictions.empty()) throw DataError("cannot average zero chip predictions");
  double sum = 0.0;
  for (double v : chip_predictions) sum += v;
  return sum / static_cast<double>(chip_predictions.size());
}

std::vector<double> predict_views(const Model& model, std::span<const Image> views,
                                  double baseline_egfr, int threads) {
  const auto side = static_cast<std::size_t>(model.net.input_side);
  const auto ch = static_cast<std::size_t>(model.net.input_channels);
  const std::size_t per_sample = ch * side * side;
  std::vector<double> out(views.size());
  const std::size_t batches = (views.size() + kPredictBatch - 1) / kPredictBatch;
  parallel_for(batches, threads, [&](std::size_t b) {
    const std::size_t start = b * kPredictBatch;
    const std::size_t n = std::min(kPredictBatch, views.size() - start);
    Tensor images({n, ch, side, side});
    for (std::size_t i = 0; i < n; ++i) {
      write_chw(views[start + i], images.values().subspan(i * per_sample, per_sample));
    }
    const std::vector<double> baselines(n, baseline_egfr);
    const auto result = forward(model.net, model.params, images, aux_batch(model, baselines));
    for (std::size_t i = 0; i < n; ++i) out[start + i] = result.predictions[i] * kTargetScale;
  });
  return out;
}

double predict_patient(const Model& model, std::span<const Image> chips, double baseline_egfr,
                       const AugmentConfig& aug, int threads) {
  if (chips.empty()) throw DataError("predict_patient: patient has no chips");
  std::vector<Image> views;
  views.reserve(chips.size());
  for (const auto& chip : chips) views.push_back(center_view(chip, aug));
  const auto preds = predict_views(model, views, baseline_egfr, threads);
  return average_chip_predictions(preds);
}

std::uint64_t fold_seed(std::uint64_t seed, int fold) {
  RandomStream rng(seed, stream_tag(StreamPurpose::kInit, 0xFFFFFFu), static_cast<std::uint64_t>(fold));
  return rng.next_u64();
}

TrainResult train_fold(const ChipDataset& data, const FoldSplit& split, int fold,
                       const PipelineConfig& cfg, std::uint64_t seed, const TrainHooks& hooks) {
  cfg.validate_training();
  if (fold < 0 || fold >= split.k) throw DataError("fold index out of range");
  if (data.load_downsample != cfg.aug.load_downsample) {
    throw UsageError("dataset was loaded with a different aug.load_downsample");
  }

  std::vector<std::size_t> train_idx, val_idx;
  std::set<std::string> train_patients, val_patients;
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const auto& id = data.rows[i].patient_id;
    if (split.fold_of(id) == fold) {
      val_idx.push_back(i);
      val_patients.insert(id);
    } else {
      train_idx.push_back(i);
      train_patients.insert(id);
    }
  }
  if (train_idx.empty()) throw DataError("fold " + std::to_string(fold) + " has no training chips");
  if (val_idx.empty()) throw DataError("fold " + std::to_string(fold) + " has no validation chips");
  for (const auto& id : val_patients) {
    if (train_patients.contains(id)) throw DataError("patient " + id + " leaks across the split");
  }

  const std::uint64_t fseed = fold_seed(seed, fold);
  TrainResult result;
  Model& model = result.model;
  model.net = cfg.net;
  model.params = init_params(cfg.net, fseed);
  if (cfg.net.aux_dim > 0) {
    Tensor train_aux({train_idx.size(), 1});
    for (std::size_t i = 0; i < train_idx.size(); ++i) train_aux[i] = data.rows[train_idx[i]].baseline_egfr;
    model.scaling = AuxScaling::fit(train_aux);
  }

  const auto side = static_cast<std::size_t>(cfg.net.input_side);
  const std::size_t per_sample = 3 * side * side;
  OptimizerState state = OptimizerState::for_params(model.params.tensors);
  const auto batch_size = static_cast<std::size_t>(cfg.opt.batch_size);

  for (int epoch = 0; epoch < cfg.opt.epochs; ++epoch) {
    const double lr = lr_at(epoch, cfg.opt);
    std::vector<std::size_t> order = train_idx;
    RandomStream shuffler(fseed, stream_tag(StreamPurpose::kShuffle, static_cast<std::uint32_t>(epoch)), 0);
    shuffler.shuffle(std::span<std::size_t>(order));

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t n = std::min(batch_size, order.size() - start);
      const std::size_t shards = (n + kShardSize - 1) / kShardSize;
      std::vector<NetworkParams> shard_grads(shards);
      std::vector<double> shard_loss(shards, 0.0);

      parallel_for(shards, cfg.threads, [&](std::size_t s) {
        const std::size_t lo = s * kShardSize;
        const std::size_t m = std::min(kShardSize, n - lo);
        Tensor images({m, 3, side, side});
        std::vector<double> baselines(m), targets(m);
        for (std::size_t i = 0; i < m; ++i) {
          const std::size_t row = order[start + lo + i];
          RandomStream rng(fseed, stream_tag(StreamPurpose::kAugment, static_cast<std::uint32_t>(epoch)), row);
          const Image view = augment_downsampled(data.views[row], rng, cfg.aug);
          write_chw(view, images.values().subspan(i * per_sample, per_sample));
          baselines[i] = data.rows[row].baseline_egfr;
          targets[i] = data.rows[row].egfr_12mo / kTargetScale;
        }
        auto fwd = forward(model.net, model.params, images, aux_batch(model, baselines));
        // Gradient of the batch-mean loss, evaluated shard by shard.
        std::vector<double> grad(m);
        double sq = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          const double d = fwd.predictions[i] - targets[i];
          sq += d * d;
          grad[i] = 2.0 * d / static_cast<double>(n);
        }
        shard_loss[s] = sq;
        shard_grads[s] = backward(model.net, model.params, fwd.cache, grad);
      });

      NetworkParams total = std::move(shard_grads[0]);
      double batch_sq = shard_loss[0];
      for (std::size_t s = 1; s < shards; ++s) {
        for (std::size_t t = 0; t < total.tensors.size(); ++t) {
          auto dst = total.tensors[t].values();
          const auto src = shard_grads[s].tensors[t].values();
          for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
        }
        batch_sq += shard_loss[s];
      }
      if (!std::isfinite(batch_sq)) {
        throw NumericError("non-finite training loss in fold " + std::to_string(fold) + ", epoch " +
                           std::to_string(epoch));
      }
      rmsprop_step(model.params, total, state, cfg.opt, lr);
      loss_sum += batch_sq;
    }

    result.validation = predict_rows(model, data, val_idx, cfg.aug, cfg.threads);
    EpochLog entry{epoch, lr, loss_sum / static_cast<double>(order.size()),
                   mean_abs_error(result.validation)};
    result.log.push_back(entry);
    if (hooks.on_epoch) hooks.on_epoch(entry);
  }
  return result;
}

CvResult run_cv(const ChipDataset& data, int k, std::uint64_t seed, const PipelineConfig& cfg,
                const TrainHooks& hooks) {
  CvResult cv;
  cv.split = assign_folds(data.patient_ids(), k, seed);
  std::vector<EvalRow> pooled;
  for (int fold = 0; fold < k; ++fold) {
    FoldOutcome outcome;
    outcome.fold = fold;
    outcome.result = train_fold(data, cv.split, fold, cfg, seed, hooks);
    outcome.report = lenient_report(outcome.result.validation);
    pooled.insert(pooled.end(), outcome.result.validation.begin(), outcome.result.validation.end());
    cv.folds.push_back(std::move(outcome));
  }
  std::sort(pooled.begin(), pooled.end(),
            [](const EvalRow& a, const EvalRow& b) { return a.patient_id < b.patient_id; });
  cv.pooled = evaluate(std::move(pooled));
  return cv;
}

}  // namespace glomnet
