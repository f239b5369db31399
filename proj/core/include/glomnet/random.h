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

/// @file random.h
/// @brief Counter-based random streams (Philox4x32-10).
///
/// Every random decision in glomnet comes from a RandomStream identified by
/// (seed, tag, index). The stream is a pure function of that triple, so any
/// sample can be regenerated independently of thread count or visiting
/// order. Tags name the consumer (augmentation, shuffling, init, ...) and
/// carry a 24-bit minor value such as the epoch number.

#ifndef GLOMNET_RANDOM_H_
#define GLOMNET_RANDOM_H_

#include <array>
#include <cstdint>
#include <span>

namespace glomnet {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One Philox4x32 block with 10 rounds (Salmon et al., SC'11).
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

enum class StreamPurpose : std::uint32_t {
  kAugment = 1,
  kShuffle = 2,
  kInit = 3,
  kFolds = 4,
  kSynth = 5,
  kTest = 255,
};

/// Packs a purpose and a 24-bit minor value (epoch, layer, ...) into a tag.
constexpr std::uint32_t stream_tag(StreamPurpose purpose,
                                   std::uint32_t minor = 0) {
  return (static_cast<std::uint32_t>(purpose) << 24) | (minor & 0xFFFFFFu);
}

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint32_t tag, std::uint64_t index);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on the open interval (0, 1).
  double uniform_open();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform on [-magnitude, +magnitude]; exactly 0 when magnitude is 0.
  double symmetric(double magnitude);
  bool bernoulli(double p);
  /// Standard normal via Box-Muller.
  double normal();
  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  void refill();

  PhiloxKey key_;
  PhiloxCounter counter_;
  PhiloxCounter block_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace glomnet

#endif  // GLOMNET_RANDOM_H_
