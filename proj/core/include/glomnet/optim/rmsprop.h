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

/// @file rmsprop.h
/// @brief RMSProp with a linearly decaying learning rate.
///
/// Per element:  E <- rho E + (1 - rho) g^2;   theta <- theta - lr g / sqrt(E + eps)

#ifndef GLOMNET_OPTIM_RMSPROP_H_
#define GLOMNET_OPTIM_RMSPROP_H_

#include <cstdint>
#include <span>
#include <vector>

#include "glomnet/nn/network.h"
#include "glomnet/nn/tensor.h"

namespace glomnet {

struct OptimizerConfig {
  double rho = 0.9;
  double epsilon = 1e-6;
  double lr0 = 1e-4;
  int epochs = 10;
  int batch_size = 32;

  void validate() const;
};

struct OptimizerState {
  /// Running mean of squared gradients, one tensor per parameter tensor.
  std::vector<Tensor> accumulators;
  std::uint64_t step_count = 0;

  static OptimizerState for_params(std::span<const Tensor> params);
  friend bool operator==(const OptimizerState&, const OptimizerState&) = default;
};

/// One in-place update of `params`. Gradients are checked for finiteness
/// before anything is modified; a non-finite entry throws NumericError.
void rmsprop_step(std::span<Tensor> params, std::span<const Tensor> grads,
                  OptimizerState& state, const OptimizerConfig& cfg, double lr);

/// Convenience overload that also bumps params.revision.
void rmsprop_step(NetworkParams& params, const NetworkParams& grads, OptimizerState& state,
                  const OptimizerConfig& cfg, double lr);

/// lr0 * (1 - epoch / epochs) for epoch in [0, epochs).
double lr_at(int epoch, const OptimizerConfig& cfg);

}  // namespace glomnet

#endif  // GLOMNET_OPTIM_RMSPROP_H_
