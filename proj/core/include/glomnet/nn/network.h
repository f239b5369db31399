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

/// @file network.h
/// @brief VGG-style convolutional regressor with auxiliary-feature
/// injection.
///
/// Topology:
///
///   image [N,C,S,S]
///     -> for each conv group: convs x (3x3 conv -> ReLU), then 2x2 max pool
///     -> flatten
///     -> dense stack, ReLU after every layer
///     -> concat(penultimate activations [N,D], aux [N,A])
///     -> linear dense (D+A -> output_dim)
///
/// Aux values enter only the final linear layer, so the network combines
/// its learned image features with a-priori scalars such as baseline eGFR.
/// No gradient is propagated into the aux inputs.

#ifndef GLOMNET_NN_NETWORK_H_
#define GLOMNET_NN_NETWORK_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "glomnet/nn/layers.h"
#include "glomnet/nn/tensor.h"
#include "glomnet/random.h"

namespace glomnet {

struct ConvGroup {
  int filters = 0;
  int convs = 0;

  friend bool operator==(const ConvGroup&, const ConvGroup&) = default;
};

struct NetworkConfig {
  int input_side = 64;
  int input_channels = 3;
  std::vector<ConvGroup> conv_groups = {{8, 2}, {16, 2}, {32, 2}, {64, 2}};
  /// The last entry is the penultimate width D that aux features join.
  std::vector<int> dense_widths = {128, 64};
  int aux_dim = 1;
  int output_dim = 1;

  /// Desk-scale default (64 px input).
  static NetworkConfig desk();
  /// Closer to the original VGG-style scale (384 px input, the nearest size
  /// five pooling stages divide); slow on CPU.
  static NetworkConfig full_scale();

  void validate() const;
  /// Stable textual form, e.g. "in=64;ch=3;groups=8x2,16x2;dense=128,64;aux=1;out=1".
  std::string canonical() const;
  /// FNV-1a 64 of canonical().
  std::uint64_t digest() const;

  int conv_layer_count() const;
  /// Flattened feature count entering the first dense layer.
  int flattened_size() const;
  int penultimate_width() const { return dense_widths.back(); }

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

/// Parses "8x2,16x2" into conv groups and "128,64" into widths.
std::vector<ConvGroup> parse_conv_groups(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);
std::string format_conv_groups(const std::vector<ConvGroup>& groups);
std::string format_int_list(const std::vector<int>& values);

/// Weights and biases of every layer, flattened in evaluation order:
/// tensors[2l] is layer l's weight, tensors[2l+1] its bias. Layers are the
/// convolutions, then the hidden dense layers, then the output layer.
/// Conv weights are [O, C, 3, 3]; dense weights are [out, in].
struct NetworkParams {
  std::vector<Tensor> tensors;
  /// Bumped by every optimizer step; forward caches record it.
  std::uint64_t revision = 0;

  std::size_t layer_count() const { return tensors.size() / 2; }
  Tensor& weight(std::size_t layer) { return tensors[2 * layer]; }
  const Tensor& weight(std::size_t layer) const { return tensors[2 * layer]; }
  Tensor& bias(std::size_t layer) { return tensors[2 * layer + 1]; }
  const Tensor& bias(std::size_t layer) const { return tensors[2 * layer + 1]; }
  std::size_t parameter_count() const;

  /// Zero-filled tensors with the shapes `cfg` requires.
  static NetworkParams zeros(const NetworkConfig& cfg);
  /// Throws DataError if shapes disagree with `cfg`.
  void check_shapes(const NetworkConfig& cfg) const;
};

/// Glorot/Xavier uniform: every element drawn from the open interval
/// (-b, b) with b = sqrt(6 / (n_in + n_out)). Returns shape [n_out, n_in].
Tensor glorot_init(int n_in, int n_out, RandomStream& rng);

/// Fills `out` with Glorot-uniform draws for the given fan-in/fan-out.
void glorot_fill(std::span<double> out, int n_in, int n_out, RandomStream& rng);

/// Glorot-initialized weights and zero biases. Each layer draws from its
/// own stream (seed, init tag with the layer index). Conv fans count the
/// 3x3 receptive field: n_in = 9 C_in, n_out = 9 C_out.
NetworkParams init_params(const NetworkConfig& cfg, std::uint64_t seed);

struct ForwardCache {
  std::uint64_t config_digest = 0;
  std::uint64_t params_revision = 0;
  std::size_t batch = 0;
  /// Input and post-ReLU output of every conv layer.
  std::vector<Tensor> conv_inputs;
  std::vector<Tensor> conv_outputs;
  /// Pool outputs and argmax, one per conv group.
  std::vector<PoolResult> pools;
  /// Inputs to each hidden dense layer, then the hidden outputs (post-ReLU).
  std::vector<Tensor> dense_inputs;
  std::vector<Tensor> dense_outputs;
  /// [N, D + A] input to the output layer.
  Tensor head_input;
};

struct ForwardResult {
  /// N * output_dim predictions, row-major.
  std::vector<double> predictions;
  ForwardCache cache;
};

/// `images` is [N, C, S, S] scaled to [0, 1]; `aux` is [N, A] (A may be 0)
/// and already standardized. Throws NumericError on non-finite output.
ForwardResult forward(const NetworkConfig& cfg, const NetworkParams& params,
                      const Tensor& images, const Tensor& aux);

/// Exact gradient of a scalar loss given dL/dprediction (`loss_grad`, one
/// value per prediction). Throws DataError if the cache does not belong to
/// (cfg, params).
NetworkParams backward(const NetworkConfig& cfg, const NetworkParams& params,
                       const ForwardCache& cache, std::span<const double> loss_grad);

/// Per-column z-score standardization fitted on training rows.
struct AuxScaling {
  std::vector<double> mean;
  std::vector<double> std;

  /// Population statistics of `rows` ([N, A]); a zero-variance column gets
  /// std 1 so the transform stays defined.
  static AuxScaling fit(const Tensor& rows);
  Tensor apply(const Tensor& rows) const;
};

}  // namespace glomnet

#endif  // GLOMNET_NN_NETWORK_H_
