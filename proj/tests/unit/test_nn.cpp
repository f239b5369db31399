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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "glomnet/error.h"
#include "glomnet/nn/checkpoint.h"
#include "glomnet/nn/layers.h"
#include "glomnet/nn/network.h"
#include "glomnet/random.h"
#include "gradient_check.h"
#include "test_util.h"

namespace glomnet {
namespace {

Tensor random_tensor(std::vector<std::size_t> shape, std::uint64_t seed, double lo = -1.0,
                     double hi = 1.0) {
  Tensor t(std::move(shape));
  RandomStream r(seed, stream_tag(StreamPurpose::kTest, 7), 0);
  for (auto& v : t.values()) v = r.uniform(lo, hi);
  return t;
}

NetworkConfig tiny_config() {
  NetworkConfig cfg;
  cfg.input_side = 8;
  cfg.input_channels = 2;
  cfg.conv_groups = {{3, 2}};
  cfg.dense_widths = {5, 4};
  cfg.aux_dim = 1;
  return cfg;
}

// Glorot

TEST(GlorotTest, BoundsAndZeroBias) {
  RandomStream rng(1, stream_tag(StreamPurpose::kTest), 0);
  const Tensor w = glorot_init(100, 50, rng);
  ASSERT_EQ(w.size(), 5000u);
  const double b = std::sqrt(6.0 / 150.0);
  EXPECT_NEAR(b, 0.2, 1e-15);
  for (double v : w.values()) EXPECT_LT(std::abs(v), b);

  const NetworkParams p = init_params(NetworkConfig::desk(), 3);
  for (std::size_t l = 0; l < p.layer_count(); ++l) {
    for (double v : p.bias(l).values()) EXPECT_EQ(v, 0.0);
  }
}

TEST(GlorotTest, UnitBoundVarianceMatchesUniform) {
  RandomStream rng(2, stream_tag(StreamPurpose::kTest), 0);
  std::vector<double> samples(100000);
  glorot_fill(samples, 3, 3, rng);
  double sum = 0.0, sq = 0.0;
  for (double v : samples) {
    EXPECT_GT(v, -1.0);
    EXPECT_LT(v, 1.0);
    sum += v;
    sq += v * v;
  }
  const double n = static_cast<double>(samples.size());
  const double var = sq / n - (sum / n) * (sum / n);
  EXPECT_NEAR(var, 1.0 / 3.0, 0.03 / 3.0);
}

TEST(GlorotTest, RejectsEmptyFans) {
  RandomStream rng(2, stream_tag(StreamPurpose::kTest), 0);
  EXPECT_THROW(glorot_init(0, 3, rng), DataError);
}

TEST(GlorotTest, InitIsSeedDeterministic) {
  const auto cfg = tiny_config();
  EXPECT_EQ(init_params(cfg, 11).tensors, init_params(cfg, 11).tensors);
  EXPECT_NE(init_params(cfg, 11).tensors, init_params(cfg, 12).tensors);
}

// conv2d

TEST(Conv2dTest, DeltaKernelIsIdentity) {
  const Tensor x = random_tensor({2, 3, 5, 6}, 4);
  Tensor k({3, 3, 3, 3});
  for (std::size_t c = 0; c < 3; ++c) k[((c * 3 + c) * 3 + 1) * 3 + 1] = 1.0;
  const Tensor y = conv2d(x, k, Tensor({3}));
  EXPECT_EQ(y, x);
}

TEST(Conv2dTest, ZeroKernelGivesBias) {
  const Tensor x = random_tensor({1, 2, 4, 4}, 5);
  const Tensor y = conv2d(x, Tensor({2, 2, 3, 3}), Tensor({2}, {1.5, -2.0}));
  for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(y[i], 1.5);
  for (std::size_t i = 16; i < 32; ++i) EXPECT_EQ(y[i], -2.0);
}

TEST(Conv2dTest, OnesKernelCountsPaddedNeighbours) {
  const Tensor x({1, 1, 3, 3}, 1.0);
  const Tensor y = conv2d(x, Tensor({1, 1, 3, 3}, 1.0), Tensor({1}));
  const std::vector<double> expected = {4, 6, 4, 6, 9, 6, 4, 6, 4};
  EXPECT_EQ(std::vector<double>(y.values().begin(), y.values().end()), expected);
}

TEST(Conv2dTest, MatchesDirectCrossCorrelation) {
  const std::size_t n = 2, ci = 3, co = 5, h = 7, w = 9;
  const Tensor x = random_tensor({n, ci, h, w}, 6);
  const Tensor k = random_tensor({co, ci, 3, 3}, 7);
  const Tensor b = random_tensor({co}, 8);
  const Tensor y = conv2d(x, k, b);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t o = 0; o < co; ++o) {
      for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
          double acc = b[o];
          for (std::size_t i = 0; i < ci; ++i) {
            for (int dy = -1; dy <= 1; ++dy) {
              for (int dx = -1; dx <= 1; ++dx) {
                const long rr = static_cast<long>(r) + dy, cc = static_cast<long>(c) + dx;
                if (rr < 0 || cc < 0 || rr >= static_cast<long>(h) || cc >= static_cast<long>(w)) {
                  continue;
                }
                acc += k[((o * ci + i) * 3 + (dy + 1)) * 3 + (dx + 1)] *
                       x[((s * ci + i) * h + rr) * w + cc];
              }
            }
          }
          EXPECT_NEAR(y[((s * co + o) * h + r) * w + c], acc, 1e-12);
        }
      }
    }
  }
}

TEST(Conv2dTest, ShapeMismatchThrows) {
  const Tensor x({1, 2, 4, 4});
  EXPECT_THROW(conv2d(x, Tensor({1, 3, 3, 3}), Tensor({1})), DataError);
  EXPECT_THROW(conv2d(x, Tensor({1, 2, 5, 5}), Tensor({1})), DataError);
  EXPECT_THROW(conv2d(x, Tensor({1, 2, 3, 3}), Tensor({2})), DataError);
}

TEST(Conv2dTest, BackwardRejectsUnsizedParameterGradients) {
  const Tensor x({1, 2, 4, 4});
  const Tensor k({3, 2, 3, 3});
  const Tensor g({1, 3, 4, 4});
  Tensor gk, gb;
  EXPECT_THROW(conv2d_backward(x, k, g, nullptr, gk, gb), DataError);
  Tensor gk_ok(k.shape()), gb_short({2});
  EXPECT_THROW(conv2d_backward(x, k, g, nullptr, gk_ok, gb_short), DataError);
}

TEST(DenseTest, BackwardRejectsUnsizedParameterGradients) {
  const Tensor x({2, 3});
  const Tensor w({4, 3});
  const Tensor g({2, 4});
  Tensor gw, gb;
  EXPECT_THROW(dense_backward(x, w, g, nullptr, gw, gb), DataError);
}

// relu, pool, dense, loss

TEST(ReluTest, ClampsNegatives) {
  const Tensor y = relu(Tensor({3}, {-1.0, 0.0, 2.0}));
  EXPECT_EQ(y, Tensor({3}, {0.0, 0.0, 2.0}));
  const Tensor pos = random_tensor({10}, 9, 0.1, 1.0);
  EXPECT_EQ(relu(pos), pos);
}

TEST(ReluTest, BackwardMasksByPositiveOutput) {
  const Tensor act({4}, {0.0, 3.0, 0.0, 1e-9});
  Tensor g({4}, {1.0, 2.0, 3.0, 4.0});
  relu_backward(act, g);
  EXPECT_EQ(g, Tensor({4}, {0.0, 2.0, 0.0, 4.0}));
}

TEST(MaxPoolTest, PicksWindowMaximum) {
  const PoolResult r = maxpool2(Tensor({1, 1, 2, 2}, {1, 2, 3, 4}));
  EXPECT_EQ(r.output, Tensor({1, 1, 1, 1}, {4}));
  ASSERT_EQ(r.argmax.size(), 1u);
  EXPECT_EQ(r.argmax[0], 3u);
}

TEST(MaxPoolTest, ConstantInputHalvesAndTiesGoFirst) {
  const PoolResult r = maxpool2(Tensor({1, 2, 4, 6}, 2.5));
  EXPECT_EQ(r.output, Tensor({1, 2, 2, 3}, 2.5));
  // First element of the first window of channel 1 sits at 24.
  EXPECT_EQ(r.argmax[0], 0u);
  EXPECT_EQ(r.argmax[6], 24u);
}

TEST(MaxPoolTest, BackwardRoutesToArgmax) {
  const Tensor x({1, 1, 2, 4}, {1, 5, 7, 2, 0, 3, 1, 8});
  const PoolResult r = maxpool2(x);
  EXPECT_EQ(r.output, Tensor({1, 1, 1, 2}, {5, 8}));
  const Tensor g = maxpool2_backward(Tensor({1, 1, 1, 2}, {10, 20}), r.argmax, x.shape());
  EXPECT_EQ(g, Tensor({1, 1, 2, 4}, {0, 10, 0, 0, 0, 0, 0, 20}));
}

TEST(MaxPoolTest, OddDimsThrow) {
  EXPECT_THROW(maxpool2(Tensor({1, 1, 3, 4})), DataError);
}

TEST(DenseTest, IdentityAndBias) {
  const Tensor x({2, 3}, {1, 2, 3, 4, 5, 6});
  const Tensor eye({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  EXPECT_EQ(dense(x, eye, Tensor({3})), x);
  const Tensor b({2}, {0.5, -1});
  EXPECT_EQ(dense(Tensor({1, 3}), Tensor({2, 3}, 7.0), b), Tensor({1, 2}, {0.5, -1}));
}

TEST(DenseTest, HandMatrixMultiply) {
  const Tensor x({1, 3}, {1, -2, 0.5});
  const Tensor w({2, 3}, {0.5, 1, 2, -1, 0, 4});
  const Tensor y = dense(x, w, Tensor({2}, {0.25, 0}));
  EXPECT_DOUBLE_EQ(y[0], 0.5 - 2 + 1 + 0.25);
  EXPECT_DOUBLE_EQ(y[1], -1 + 0 + 2);
  EXPECT_THROW(dense(Tensor({1, 2}), w, Tensor({2})), DataError);
}

TEST(DenseTest, WeightGradientIsOuterProduct) {
  const Tensor x({1, 3}, {1, 2, 3});
  const Tensor w = random_tensor({2, 3}, 10);
  Tensor gw({2, 3}), gb({2}), gx;
  dense_backward(x, w, Tensor({1, 2}, {0.5, -1}), &gx, gw, gb);
  EXPECT_EQ(gw, Tensor({2, 3}, {0.5, 1, 1.5, -1, -2, -3}));
  EXPECT_EQ(gb, Tensor({2}, {0.5, -1}));
  EXPECT_DOUBLE_EQ(gx[1], 0.5 * w[1] - w[4]);
}

TEST(MseTest, Arithmetic) {
  const std::vector<double> t = {1, 2};
  LossResult r = mse_loss(t, t);
  EXPECT_EQ(r.loss, 0.0);
  EXPECT_EQ(r.grad, (std::vector<double>{0, 0}));
  r = mse_loss(std::vector<double>{2, 3}, t);
  EXPECT_DOUBLE_EQ(r.loss, 1.0);
  r = mse_loss(std::vector<double>{2, -1}, t);
  EXPECT_DOUBLE_EQ(r.loss, 5.0);
  EXPECT_EQ(r.grad, (std::vector<double>{1, -3}));
  EXPECT_THROW(mse_loss(std::vector<double>{}, std::vector<double>{}), DataError);
  EXPECT_THROW(mse_loss(std::vector<double>{1}, t), DataError);
}

// Network

TEST(NetworkConfigTest, DeskShapes) {
  const auto cfg = NetworkConfig::desk();
  EXPECT_EQ(cfg.conv_layer_count(), 8);
  EXPECT_EQ(cfg.flattened_size(), 64 * 4 * 4);
  const NetworkParams p = NetworkParams::zeros(cfg);
  EXPECT_EQ(p.layer_count(), 11u);
  EXPECT_EQ(p.weight(10).shape(), (std::vector<std::size_t>{1, 65}));
  EXPECT_NO_THROW(p.check_shapes(cfg));
  NetworkConfig other = cfg;
  other.aux_dim = 2;
  EXPECT_THROW(p.check_shapes(other), DataError);
}

TEST(NetworkConfigTest, Validation) {
  NetworkConfig cfg = tiny_config();
  EXPECT_NO_THROW(cfg.validate());
  cfg.input_side = 9;
  EXPECT_THROW(cfg.validate(), UsageError);
  cfg = tiny_config();
  cfg.dense_widths.clear();
  EXPECT_THROW(cfg.validate(), UsageError);
  cfg = tiny_config();
  cfg.conv_groups = {{0, 1}};
  EXPECT_THROW(cfg.validate(), UsageError);
  EXPECT_NO_THROW(NetworkConfig::desk().validate());
  EXPECT_NO_THROW(NetworkConfig::full_scale().validate());
}

TEST(NetworkConfigTest, GroupParsingRoundTrips) {
  const auto groups = parse_conv_groups("8x2,16x3");
  EXPECT_EQ(groups, (std::vector<ConvGroup>{{8, 2}, {16, 3}}));
  EXPECT_EQ(format_conv_groups(groups), "8x2,16x3");
  EXPECT_EQ(parse_int_list("128,64"), (std::vector<int>{128, 64}));
  EXPECT_THROW(parse_conv_groups("8y2"), UsageError);
  EXPECT_THROW(parse_int_list("12a"), UsageError);
  EXPECT_NE(NetworkConfig::desk().digest(), tiny_config().digest());
}

TEST(ForwardTest, ZeroHeadGivesBias) {
  const auto cfg = tiny_config();
  NetworkParams p = init_params(cfg, 1);
  const std::size_t head = p.layer_count() - 1;
  p.weight(head).fill(0.0);
  p.bias(head)[0] = 0.73;
  const auto r = forward(cfg, p, random_tensor({3, 2, 8, 8}, 2, 0, 1), random_tensor({3, 1}, 3));
  for (double v : r.predictions) EXPECT_EQ(v, 0.73);
}

TEST(ForwardTest, ZeroAuxColumnMakesAuxIrrelevant) {
  const auto cfg = tiny_config();
  NetworkParams p = init_params(cfg, 4);
  const std::size_t head = p.layer_count() - 1;
  EXPECT_EQ(p.weight(head).dim(1), 5u);
  const Tensor images = random_tensor({2, 2, 8, 8}, 5, 0, 1);
  const auto a = forward(cfg, p, images, Tensor({2, 1}, {0.3, -1.0}));
  const auto b = forward(cfg, p, images, Tensor({2, 1}, {5.0, 2.0}));
  EXPECT_NE(a.predictions, b.predictions);
  p.weight(head)[4] = 0.0;
  const auto c = forward(cfg, p, images, Tensor({2, 1}, {0.3, -1.0}));
  const auto d = forward(cfg, p, images, Tensor({2, 1}, {5.0, 2.0}));
  EXPECT_EQ(c.predictions, d.predictions);
}

TEST(ForwardTest, DeterministicAndShapeChecked) {
  const auto cfg = tiny_config();
  const NetworkParams p = init_params(cfg, 6);
  const Tensor images = random_tensor({4, 2, 8, 8}, 7, 0, 1);
  const Tensor aux = random_tensor({4, 1}, 8);
  EXPECT_EQ(forward(cfg, p, images, aux).predictions, forward(cfg, p, images, aux).predictions);
  EXPECT_THROW(forward(cfg, p, random_tensor({4, 3, 8, 8}, 1), aux), DataError);
  EXPECT_THROW(forward(cfg, p, images, Tensor({3, 1})), DataError);
}

TEST(BackwardTest, ZeroLossGradGivesZeroGradients) {
  const auto cfg = tiny_config();
  const NetworkParams p = init_params(cfg, 9);
  const auto r = forward(cfg, p, random_tensor({2, 2, 8, 8}, 1, 0, 1), random_tensor({2, 1}, 2));
  const NetworkParams g = backward(cfg, p, r.cache, std::vector<double>{0.0, 0.0});
  for (const auto& t : g.tensors) {
    for (double v : t.values()) EXPECT_EQ(v, 0.0);
  }
}

TEST(BackwardTest, StaleCacheIsRejected) {
  const auto cfg = tiny_config();
  NetworkParams p = init_params(cfg, 9);
  const auto r = forward(cfg, p, random_tensor({1, 2, 8, 8}, 1, 0, 1), Tensor({1, 1}));
  p.revision += 1;
  EXPECT_THROW(backward(cfg, p, r.cache, std::vector<double>{1.0}), DataError);
  NetworkConfig other = cfg;
  other.dense_widths = {5, 3};
  EXPECT_THROW(backward(other, NetworkParams::zeros(other), r.cache, std::vector<double>{1.0}),
               DataError);
}

// Central differences against backprop for every parameter of a tiny net.
TEST(BackwardTest, MatchesFiniteDifferences) {
  NetworkConfig cfg;
  cfg.input_side = 8;
  cfg.input_channels = 2;
  cfg.conv_groups = {{3, 2}};
  cfg.dense_widths = {6, 4};
  cfg.aux_dim = 1;
  NetworkParams p = init_params(cfg, 21);
  for (std::size_t l = 0; l < p.layer_count(); ++l) {
    RandomStream r(l, stream_tag(StreamPurpose::kTest, 9), 0);
    for (auto& v : p.bias(l).values()) v = r.uniform(0.05, 0.2);
  }
  const Tensor images = random_tensor({3, 2, 8, 8}, 22, 0, 1);
  const Tensor aux = random_tensor({3, 1}, 23);
  const auto check = testing::check_gradients(cfg, p, images, aux, {0.3, -0.2, 0.9});
  EXPECT_EQ(check.failures, 0u) << "worst relative error " << check.worst_relative;
  EXPECT_EQ(check.checked + check.skipped, p.parameter_count());
  EXPECT_LT(check.skipped, p.parameter_count() / 10);
}

TEST(BackwardTest, GradientCheckCatchesAWrongCoordinate) {
  NetworkConfig cfg = tiny_config();
  const NetworkParams p = init_params(cfg, 26);
  const Tensor images = random_tensor({2, 2, 8, 8}, 27, 0, 1);
  const Tensor aux = random_tensor({2, 1}, 28);
  const std::vector<double> target = {0.4, -0.3};
  const auto base = forward(cfg, p, images, aux);
  NetworkParams grads = backward(cfg, p, base.cache, mse_loss(base.predictions, target).grad);
  const std::size_t head = grads.tensors.size() - 2;
  grads.tensors[head][0] += 1e-3;
  const auto check = testing::compare_gradients(cfg, p, grads, images, aux, target);
  EXPECT_EQ(check.failures, 1u);
  EXPECT_GE(check.worst_absolute, 1e-3 * 0.99);
}

// Near a ReLU kink a wide probe disagrees with backprop and a narrow one
// agrees, so the skip rule above is not hiding a real error.
TEST(BackwardTest, NarrowProbesAgreeEverywhere) {
  NetworkConfig cfg = tiny_config();
  const NetworkParams p = init_params(cfg, 22);
  const Tensor images = random_tensor({2, 2, 8, 8}, 24, 0, 1);
  const Tensor aux = random_tensor({2, 1}, 25);
  const auto check = testing::check_gradients(cfg, p, images, aux, {0.5, 0.1}, 1e-7, 1e-4, 1e-8);
  EXPECT_EQ(check.failures, 0u) << "worst relative error " << check.worst_relative;
}

TEST(AuxScalingTest, StandardizesTrainingColumn) {
  const Tensor rows = random_tensor({50, 2}, 30, 20.0, 110.0);
  const AuxScaling s = AuxScaling::fit(rows);
  const Tensor z = s.apply(rows);
  for (std::size_t c = 0; c < 2; ++c) {
    double sum = 0.0, sq = 0.0;
    for (std::size_t r = 0; r < 50; ++r) sum += z[r * 2 + c];
    const double mean = sum / 50.0;
    for (std::size_t r = 0; r < 50; ++r) sq += (z[r * 2 + c] - mean) * (z[r * 2 + c] - mean);
    EXPECT_NEAR(mean, 0.0, 1e-9);
    EXPECT_NEAR(std::sqrt(sq / 50.0), 1.0, 1e-9);
  }
  const AuxScaling flat = AuxScaling::fit(Tensor({3, 1}, 4.0));
  EXPECT_EQ(flat.std[0], 1.0);
  EXPECT_THROW(s.apply(Tensor({2, 3})), DataError);
}

// Checkpoints

TEST(CheckpointTest, RoundTripsBitExactly) {
  const auto cfg = tiny_config();
  const NetworkParams p = init_params(cfg, 40);
  const auto bytes = encode_checkpoint(cfg, p);
  ASSERT_GE(bytes.size(), 4u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "GLOM");
  EXPECT_EQ(decode_checkpoint(bytes, cfg).tensors, p.tensors);

  testing::TempDir dir;
  save_checkpoint(dir / "p.glom", cfg, p);
  EXPECT_EQ(load_checkpoint(dir / "p.glom", cfg).tensors, p.tensors);
}

TEST(CheckpointTest, RejectsMismatchAndCorruption) {
  const auto cfg = tiny_config();
  const auto bytes = encode_checkpoint(cfg, init_params(cfg, 41));
  NetworkConfig other = cfg;
  other.aux_dim = 2;
  EXPECT_THROW(decode_checkpoint(bytes, other), DataError);

  auto truncated = bytes;
  truncated.resize(truncated.size() - 3);
  EXPECT_THROW(decode_checkpoint(truncated, cfg), DataError);

  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(decode_checkpoint(trailing, cfg), DataError);

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bad_magic, cfg), DataError);

  testing::TempDir dir;
  EXPECT_THROW(load_checkpoint(dir / "missing.glom", cfg), DataError);
}

}  // namespace
}  // namespace glomnet
