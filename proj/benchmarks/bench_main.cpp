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

#include <benchmark/benchmark.h>

#include "glomnet/augment/augment.h"
#include "glomnet/imgcore/image.h"
#include "glomnet/nn/layers.h"
#include "glomnet/nn/network.h"
#include "glomnet/random.h"
#include "glomnet/segment/segment.h"

namespace glomnet {
namespace {

Tensor noise_tensor(std::vector<std::size_t> shape, std::uint64_t seed) {
  Tensor t(std::move(shape));
  RandomStream r(seed, stream_tag(StreamPurpose::kTest), 0);
  for (auto& v : t.values()) v = r.uniform(-1.0, 1.0);
  return t;
}

Image noise_image(int side, std::uint64_t seed) {
  Image img(side, side, 3);
  RandomStream r(seed, stream_tag(StreamPurpose::kTest), 1);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(r.below(256));
  return img;
}

// Args: channels in, channels out, spatial side.
void BM_Conv2dForward(benchmark::State& state) {
  const auto ci = static_cast<std::size_t>(state.range(0));
  const auto co = static_cast<std::size_t>(state.range(1));
  const auto side = static_cast<std::size_t>(state.range(2));
  const Tensor x = noise_tensor({1, ci, side, side}, 1);
  const Tensor k = noise_tensor({co, ci, 3, 3}, 2);
  const Tensor b({co});
  for (auto _ : state) benchmark::DoNotOptimize(conv2d(x, k, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ci * co * side * side * 9));
}
BENCHMARK(BM_Conv2dForward)->Args({3, 8, 64})->Args({16, 16, 32})->Args({64, 64, 8});

void BM_Conv2dBackward(benchmark::State& state) {
  const auto ci = static_cast<std::size_t>(state.range(0));
  const auto co = static_cast<std::size_t>(state.range(1));
  const auto side = static_cast<std::size_t>(state.range(2));
  const Tensor x = noise_tensor({1, ci, side, side}, 1);
  const Tensor k = noise_tensor({co, ci, 3, 3}, 2);
  const Tensor g = noise_tensor({1, co, side, side}, 3);
  for (auto _ : state) {
    Tensor gx, gk(k.shape()), gb({co});
    conv2d_backward(x, k, g, &gx, gk, gb);
    benchmark::DoNotOptimize(gk);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ci * co * side * side * 9));
}
BENCHMARK(BM_Conv2dBackward)->Args({3, 8, 64})->Args({16, 16, 32})->Args({64, 64, 8});

void BM_DeskForwardBackward(benchmark::State& state) {
  const auto cfg = NetworkConfig::desk();
  const auto params = init_params(cfg, 1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor images = noise_tensor({n, 3, 64, 64}, 4);
  const Tensor aux({n, 1});
  const std::vector<double> grad(n, 1.0);
  for (auto _ : state) {
    const auto fwd = forward(cfg, params, images, aux);
    benchmark::DoNotOptimize(backward(cfg, params, fwd.cache, grad));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_DeskForwardBackward)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Downsample(benchmark::State& state) {
  const Image img = noise_image(static_cast<int>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(downsample(img, 2));
}
BENCHMARK(BM_Downsample)->Arg(256)->Arg(1000);

void BM_AugmentChip(benchmark::State& state) {
  const Image chip = noise_image(128, 6);
  AugmentConfig cfg;
  cfg.crop_px = 64;
  cfg.load_downsample = 2;
  std::uint64_t i = 0;
  for (auto _ : state) {
    RandomStream rng(7, stream_tag(StreamPurpose::kAugment), i++);
    benchmark::DoNotOptimize(augment_chip(chip, rng, cfg));
  }
}
BENCHMARK(BM_AugmentChip);

void BM_Otsu(benchmark::State& state) {
  const Image img = noise_image(512, 8);
  for (auto _ : state) benchmark::DoNotOptimize(otsu_threshold(img));
}
BENCHMARK(BM_Otsu);

}  // namespace
}  // namespace glomnet

BENCHMARK_MAIN();
