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

/// @file layers.h
/// @brief Forward and backward kernels for the network's layer types.
///
/// Image tensors are NCHW. Backward functions accumulate (+=) into the
/// parameter-gradient tensors so callers can sum over shards.

#ifndef GLOMNET_NN_LAYERS_H_
#define GLOMNET_NN_LAYERS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "glomnet/nn/tensor.h"

namespace glomnet {

/// 3x3 cross-correlation, stride 1, zero padding 1. kernels: [O, C, 3, 3].
Tensor conv2d(const Tensor& input, const Tensor& kernels, const Tensor& bias);

/// `grad_input` may be null when the input gradient is not needed.
/// Parameter gradients are accumulated, so they must already have the
/// parameters' shapes.
void conv2d_backward(const Tensor& input, const Tensor& kernels, const Tensor& grad_output,
                     Tensor* grad_input, Tensor& grad_kernels, Tensor& grad_bias);

Tensor relu(const Tensor& x);
/// Zeroes `grad` wherever `activated` (the relu output) is not positive;
/// the subgradient at 0 is 0.
void relu_backward(const Tensor& activated, Tensor& grad);

struct PoolResult {
  Tensor output;
  /// Flat input index of each output's maximum; ties go to the first
  /// element of the window in row-major order.
  std::vector<std::uint32_t> argmax;
};

/// 2x2 max pooling with stride 2; spatial dims must be even.
PoolResult maxpool2(const Tensor& x);
Tensor maxpool2_backward(const Tensor& grad_output, std::span<const std::uint32_t> argmax,
                         const std::vector<std::size_t>& input_shape);

/// y = x W^T + b for a batch x: [N, in], W: [out, in], b: [out].
Tensor dense(const Tensor& x, const Tensor& weight, const Tensor& bias);
void dense_backward(const Tensor& x, const Tensor& weight, const Tensor& grad_output,
                    Tensor* grad_x, Tensor& grad_weight, Tensor& grad_bias);

struct LossResult {
  double loss = 0.0;
  std::vector<double> grad;
};

/// Mean squared error (1/N) sum (pred - target)^2 and its gradient.
LossResult mse_loss(std::span<const double> pred, std::span<const double> target);

}  // namespace glomnet

#endif  // GLOMNET_NN_LAYERS_H_
