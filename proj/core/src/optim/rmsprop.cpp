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

#include "glomnet/optim/rmsprop.h"

#include <cmath>
#include <string>

#include "glomnet/error.h"

namespace glomnet {

void OptimizerConfig::validate() const {
  if (!(rho > 0.0 && rho < 1.0)) throw UsageError("opt.rho must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw UsageError("opt.epsilon must be > 0");
  if (!(lr0 >= 0.0)) throw UsageError("opt.lr0 must be >= 0");
  if (epochs < 1) throw UsageError("opt.epochs must be >= 1");
  if (batch_size < 1) throw UsageError("opt.batch_size must be >= 1");
}

OptimizerState OptimizerState::for_params(std::span<const Tensor> params) {
  OptimizerState state;
  for (const auto& p : params) state.accumulators.emplace_back(p.shape());
  return state;
}

void rmsprop_step(std::span<Tensor> params, std::span<const Tensor> grads,
                  OptimizerState& state, const OptimizerConfig& cfg, double lr) {
  if (params.size() != grads.size()) throw DataError("rmsprop_step: tensor count mismatch");
  if (state.accumulators.empty()) state = OptimizerState::for_params(params);
  if (state.accumulators.size() != params.size()) {
    throw DataError("rmsprop_step: optimizer state does not match parameters");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].shape() != grads[i].shape() ||
        state.accumulators[i].shape() != params[i].shape()) {
      throw DataError("rmsprop_step: shape mismatch at tensor " + std::to_string(i));
    }
    if (!grads[i].all_finite()) {
      throw NumericError("rmsprop_step: non-finite gradient in tensor " + std::to_string(i));
    }
  }
  const double rho = cfg.rho;
  const double eps = cfg.epsilon;
  for (std::size_t i = 0; i < params.size(); ++i) {
    double* theta = params[i].data();
    double* acc = state.accumulators[i].data();
    const double* g = grads[i].data();
    for (std::size_t k = 0; k < params[i].size(); ++k) {
      acc[k] = rho * acc[k] + (1.0 - rho) * g[k] * g[k];
      theta[k] -= lr * g[k] / std::sqrt(acc[k] + eps);
    }
  }
  ++state.step_count;
}

void rmsprop_step(NetworkParams& params, const NetworkParams& grads, OptimizerState& state,
                  const OptimizerConfig& cfg, double lr) {
  rmsprop_step(std::span<Tensor>(params.tensors), std::span<const Tensor>(grads.tensors), state,
               cfg, lr);
  ++params.revision;
}

double lr_at(int epoch, const OptimizerConfig& cfg) {
  if (epoch < 0 || epoch >= cfg.epochs) {
    throw DataError("lr_at: epoch " + std::to_string(epoch) + " outside [0, " +
                    std::to_string(cfg.epochs) + ")");
  }
  return cfg.lr0 * (1.0 - static_cast<double>(epoch) / cfg.epochs);
}

}  // namespace glomnet
