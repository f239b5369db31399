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

#include "glomnet/nn/network.h"

#include <cmath>
#include <sstream>

#include "glomnet/error.h"

namespace glomnet {

namespace {

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

void relu_inplace(Tensor& x) {
  for (auto& v : x.values()) v = v > 0.0 ? v : 0.0;
}

}  // namespace

NetworkConfig NetworkConfig::desk() { return NetworkConfig{}; }

NetworkConfig NetworkConfig::full_scale() {
  NetworkConfig cfg;
  cfg.input_side = 384;
  cfg.conv_groups = {{32, 2}, {64, 2}, {128, 3}, {256, 3}, {256, 3}};
  cfg.dense_widths = {1024, 256};
  return cfg;
}

void NetworkConfig::validate() const {
  if (input_side < 1 || input_channels < 1 || output_dim < 1 || aux_dim < 0) {
    throw UsageError("network sizes must be positive (aux_dim >= 0)");
  }
  if (conv_groups.empty()) throw UsageError("network needs at least one conv group");
  if (dense_widths.empty()) throw UsageError("network needs at least one dense layer");
  for (const auto& g : conv_groups) {
    if (g.filters < 1 || g.convs < 1) throw UsageError("conv group counts must be >= 1");
  }
  for (int d : dense_widths) {
    if (d < 1) throw UsageError("dense widths must be >= 1");
  }
  const int reduction = 1 << conv_groups.size();
  if (conv_groups.size() >= 30 || input_side % reduction != 0) {
    throw UsageError("input_side " + std::to_string(input_side) + " is not divisible by 2^" +
                     std::to_string(conv_groups.size()));
  }
}

std::string NetworkConfig::canonical() const {
  std::ostringstream out;
  out << "in=" << input_side << ";ch=" << input_channels
      << ";groups=" << format_conv_groups(conv_groups)
      << ";dense=" << format_int_list(dense_widths) << ";aux=" << aux_dim
      << ";out=" << output_dim;
  return out.str();
}

std::uint64_t NetworkConfig::digest() const { return fnv1a64(canonical()); }

int NetworkConfig::conv_layer_count() const {
  int n = 0;
  for (const auto& g : conv_groups) n += g.convs;
  return n;
}

int NetworkConfig::flattened_size() const {
  const int side = input_side >> conv_groups.size();
  return side * side * conv_groups.back().filters;
}

std::vector<ConvGroup> parse_conv_groups(const std::string& text) {
  std::vector<ConvGroup> groups;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto x = item.find('x');
    if (x == std::string::npos) throw UsageError("conv group '" + item + "' must look like 16x2");
    try {
      groups.push_back({std::stoi(item.substr(0, x)), std::stoi(item.substr(x + 1))});
    } catch (const std::exception&) {
      throw UsageError("conv group '" + item + "' must look like 16x2");
    }
  }
  return groups;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("'" + item + "' is not an integer");
    }
  }
  return values;
}

std::string format_conv_groups(const std::vector<ConvGroup>& groups) {
  std::string s;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (i > 0) s += ",";
    s += std::to_string(groups[i].filters) + "x" + std::to_string(groups[i].convs);
  }
  return s;
}

std::string format_int_list(const std::vector<int>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) s += ",";
    s += std::to_string(values[i]);
  }
  return s;
}

std::size_t NetworkParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors) n += t.size();
  return n;
}

NetworkParams NetworkParams::zeros(const NetworkConfig& cfg) {
  cfg.validate();
  NetworkParams p;
  std::size_t in_ch = static_cast<std::size_t>(cfg.input_channels);
  for (const auto& g : cfg.conv_groups) {
    for (int k = 0; k < g.convs; ++k) {
      const auto out_ch = static_cast<std::size_t>(g.filters);
      p.tensors.emplace_back(std::vector<std::size_t>{out_ch, in_ch, 3, 3});
      p.tensors.emplace_back(std::vector<std::size_t>{out_ch});
      in_ch = out_ch;
    }
  }
  auto in = static_cast<std::size_t>(cfg.flattened_size());
  for (int width : cfg.dense_widths) {
    const auto out = static_cast<std::size_t>(width);
    p.tensors.emplace_back(std::vector<std::size_t>{out, in});
    p.tensors.emplace_back(std::vector<std::size_t>{out});
    in = out;
  }
  const auto head_in = in + static_cast<std::size_t>(cfg.aux_dim);
  const auto head_out = static_cast<std::size_t>(cfg.output_dim);
  p.tensors.emplace_back(std::vector<std::size_t>{head_out, head_in});
  p.tensors.emplace_back(std::vector<std::size_t>{head_out});
  return p;
}

void NetworkParams::check_shapes(const NetworkConfig& cfg) const {
  const auto expected = zeros(cfg);
  if (tensors.size() != expected.tensors.size()) {
    throw DataError("parameter set has " + std::to_string(tensors.size()) + " tensors, config needs " +
                    std::to_string(expected.tensors.size()));
  }
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    if (tensors[i].shape() != expected.tensors[i].shape()) {
      throw DataError("parameter tensor " + std::to_string(i) + " has shape " +
                      tensors[i].shape_string() + ", config needs " +
                      expected.tensors[i].shape_string());
    }
  }
}

void glorot_fill(std::span<double> out, int n_in, int n_out, RandomStream& rng) {
  if (n_in < 1 || n_out < 1) throw DataError("glorot_init: fans must be >= 1");
  const double bound = std::sqrt(6.0 / (n_in + n_out));
  // uniform_open() never returns 0 or 1, so draws stay strictly inside.
  for (auto& v : out) v = bound * (2.0 * rng.uniform_open() - 1.0);
}

Tensor glorot_init(int n_in, int n_out, RandomStream& rng) {
  if (n_in < 1 || n_out < 1) throw DataError("glorot_init: fans must be >= 1");
  Tensor w({static_cast<std::size_t>(n_out), static_cast<std::size_t>(n_in)});
  glorot_fill(w.values(), n_in, n_out, rng);
  return w;
}

NetworkParams init_params(const NetworkConfig& cfg, std::uint64_t seed) {
  NetworkParams p = NetworkParams::zeros(cfg);
  for (std::size_t layer = 0; layer < p.layer_count(); ++layer) {
    Tensor& w = p.weight(layer);
    int n_in, n_out;
    if (w.rank() == 4) {
      n_in = static_cast<int>(w.dim(1) * 9);
      n_out = static_cast<int>(w.dim(0) * 9);
    } else {
      n_in = static_cast<int>(w.dim(1));
      n_out = static_cast<int>(w.dim(0));
    }
    RandomStream rng(seed, stream_tag(StreamPurpose::kInit, static_cast<std::uint32_t>(layer)), 0);
    glorot_fill(w.values(), n_in, n_out, rng);
  }
  return p;
}

ForwardResult forward(const NetworkConfig& cfg, const NetworkParams& params,
                      const Tensor& images, const Tensor& aux) {
  cfg.validate();
  if (images.rank() != 4 || images.dim(1) != static_cast<std::size_t>(cfg.input_channels) ||
      images.dim(2) != static_cast<std::size_t>(cfg.input_side) ||
      images.dim(3) != static_cast<std::size_t>(cfg.input_side)) {
    throw DataError("forward: image batch " + images.shape_string() + " does not match config " +
                    cfg.canonical());
  }
  const std::size_t n = images.dim(0);
  if (aux.rank() != 2 || aux.dim(0) != n || aux.dim(1) != static_cast<std::size_t>(cfg.aux_dim)) {
    throw DataError("forward: aux batch " + aux.shape_string() + " does not match aux_dim " +
                    std::to_string(cfg.aux_dim));
  }
  if (params.tensors.size() != 2 * (cfg.conv_layer_count() + cfg.dense_widths.size() + 1)) {
    throw DataError("forward: parameter set does not match config");
  }

  ForwardResult result;
  ForwardCache& cache = result.cache;
  cache.config_digest = cfg.digest();
  cache.params_revision = params.revision;
  cache.batch = n;

  std::size_t layer = 0;
  Tensor x = images;
  for (const auto& group : cfg.conv_groups) {
    for (int k = 0; k < group.convs; ++k, ++layer) {
      Tensor y = conv2d(x, params.weight(layer), params.bias(layer));
      relu_inplace(y);
      cache.conv_inputs.push_back(std::move(x));
      cache.conv_outputs.push_back(y);
      x = std::move(y);
    }
    PoolResult pooled = maxpool2(x);
    x = pooled.output;
    cache.pools.push_back(std::move(pooled));
  }

  const std::size_t flat = x.size() / n;
  Tensor h({n, flat}, std::vector<double>(x.values().begin(), x.values().end()));
  for (std::size_t j = 0; j < cfg.dense_widths.size(); ++j, ++layer) {
    Tensor y = dense(h, params.weight(layer), params.bias(layer));
    relu_inplace(y);
    cache.dense_inputs.push_back(std::move(h));
    cache.dense_outputs.push_back(y);
    h = std::move(y);
  }

  const std::size_t d = h.dim(1);
  const std::size_t a = static_cast<std::size_t>(cfg.aux_dim);
  Tensor head({n, d + a});
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < d; ++i) head[s * (d + a) + i] = h[s * d + i];
    for (std::size_t i = 0; i < a; ++i) head[s * (d + a) + d + i] = aux[s * a + i];
  }
  Tensor out = dense(head, params.weight(layer), params.bias(layer));
  cache.head_input = std::move(head);

  if (!out.all_finite()) throw NumericError("forward: non-finite prediction");
  result.predictions.assign(out.values().begin(), out.values().end());
  return result;
}

NetworkParams backward(const NetworkConfig& cfg, const NetworkParams& params,
                       const ForwardCache& cache, std::span<const double> loss_grad) {
  if (cache.config_digest != cfg.digest() || cache.params_revision != params.revision) {
    throw DataError("backward: stale forward cache");
  }
  const std::size_t n = cache.batch;
  const auto out_dim = static_cast<std::size_t>(cfg.output_dim);
  if (loss_grad.size() != n * out_dim) throw DataError("backward: loss gradient length mismatch");

  NetworkParams grads = NetworkParams::zeros(cfg);
  std::size_t layer = grads.layer_count() - 1;

  Tensor g_out({n, out_dim}, std::vector<double>(loss_grad.begin(), loss_grad.end()));
  Tensor g_head;
  dense_backward(cache.head_input, params.weight(layer), g_out, &g_head, grads.weight(layer),
                 grads.bias(layer));

  // Keep only the penultimate columns; aux columns receive no gradient.
  const std::size_t d = static_cast<std::size_t>(cfg.penultimate_width());
  const std::size_t width = g_head.dim(1);
  Tensor g({n, d});
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < d; ++i) g[s * d + i] = g_head[s * width + i];
  }

  for (std::size_t j = cfg.dense_widths.size(); j-- > 0;) {
    --layer;
    relu_backward(cache.dense_outputs[j], g);
    Tensor g_in;
    dense_backward(cache.dense_inputs[j], params.weight(layer), g, &g_in, grads.weight(layer),
                   grads.bias(layer));
    g = std::move(g_in);
  }

  std::size_t conv = cache.conv_inputs.size();
  for (std::size_t gi = cfg.conv_groups.size(); gi-- > 0;) {
    const PoolResult& pool = cache.pools[gi];
    g = maxpool2_backward(g, pool.argmax, cache.conv_outputs[conv - 1].shape());
    for (int k = 0; k < cfg.conv_groups[gi].convs; ++k) {
      --conv;
      --layer;
      relu_backward(cache.conv_outputs[conv], g);
      Tensor g_in;
      conv2d_backward(cache.conv_inputs[conv], params.weight(layer), g,
                      conv > 0 ? &g_in : nullptr, grads.weight(layer), grads.bias(layer));
      g = std::move(g_in);
    }
  }
  return grads;
}

AuxScaling AuxScaling::fit(const Tensor& rows) {
  if (rows.rank() != 2) throw DataError("AuxScaling::fit: expected [N, A] rows");
  const std::size_t n = rows.dim(0), a = rows.dim(1);
  AuxScaling s;
  s.mean.assign(a, 0.0);
  s.std.assign(a, 1.0);
  if (n == 0) return s;
  for (std::size_t j = 0; j < a; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += rows[i * a + j];
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dv = rows[i * a + j] - mean;
      ss += dv * dv;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    s.mean[j] = mean;
    s.std[j] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

Tensor AuxScaling::apply(const Tensor& rows) const {
  if (rows.rank() != 2 || rows.dim(1) != mean.size()) {
    throw DataError("AuxScaling::apply: width mismatch");
  }
  Tensor out = rows;
  const std::size_t a = mean.size();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (rows[i] - mean[i % a]) / std[i % a];
  }
  return out;
}

}  // namespace glomnet
