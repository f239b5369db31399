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

/// @file checkpoint.h
/// @brief Versioned binary parameter checkpoints.
///
/// Layout (all integers and doubles little-endian):
///
///   char[4]  magic "GLOM"
///   u32      format version (1)
///   u64      NetworkConfig::digest() of the producing config
///   u32      tensor count
///   per tensor: u32 rank, u64 dims[rank], f64 values[prod(dims)]
///
/// Values round-trip bit-exactly.

#ifndef GLOMNET_NN_CHECKPOINT_H_
#define GLOMNET_NN_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "glomnet/nn/network.h"

namespace glomnet {

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> encode_checkpoint(const NetworkConfig& cfg,
                                            const NetworkParams& params);

/// Throws DataError on bad magic, unknown version, digest mismatch with
/// `cfg`, truncation, or shapes that disagree with `cfg`.
NetworkParams decode_checkpoint(std::span<const std::uint8_t> bytes, const NetworkConfig& cfg);

void save_checkpoint(const std::filesystem::path& path, const NetworkConfig& cfg,
                     const NetworkParams& params);
NetworkParams load_checkpoint(const std::filesystem::path& path, const NetworkConfig& cfg);

}  // namespace glomnet

#endif  // GLOMNET_NN_CHECKPOINT_H_
