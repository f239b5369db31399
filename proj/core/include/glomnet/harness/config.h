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

/// @file config.h
/// @brief `key = value` run configuration.
///
/// Lines are `key = value`; `#` starts a comment; `[section]` headers
/// prefix the keys that follow (so `[aug]` + `crop_px = 64` is the same as
/// `aug.crop_px = 64`). Unknown keys are errors.

#ifndef GLOMNET_HARNESS_CONFIG_H_
#define GLOMNET_HARNESS_CONFIG_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "glomnet/augment/augment.h"
#include "glomnet/chipper/chipper.h"
#include "glomnet/harness/synth.h"
#include "glomnet/nn/network.h"
#include "glomnet/optim/rmsprop.h"
#include "glomnet/segment/segment.h"

namespace glomnet {

enum class AuxMode { kOff, kBaselineEgfr };

AuxMode parse_aux_mode(std::string_view text);
std::string_view aux_mode_name(AuxMode mode);

struct PipelineConfig {
  NetworkConfig net;
  OptimizerConfig opt;
  /// Crop follows the default network input so that an empty config is
  /// runnable.
  AugmentConfig aug{.crop_px = NetworkConfig{}.input_side};
  ChipConfig chip;
  SegmentConfig seg;
  /// Analysis downsample for the segment command; min_area_px is divided
  /// by its square.
  int seg_downsample = 1;
  SynthConfig synth;
  AuxMode aux = AuxMode::kBaselineEgfr;
  /// Worker threads for batch evaluation (1 = sequential).
  int threads = 1;

  /// Cross-module consistency: crop_px == net.input_side, aux_dim matches
  /// the aux mode, per-module validation.
  void validate_training() const;
};

/// Applies the key/value lines in `text` on top of `base`. `origin` names
/// the source in error messages.
PipelineConfig parse_config(std::string_view text, PipelineConfig base = {},
                            std::string_view origin = "config");
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

/// Every accepted key, sorted.
std::vector<std::string> config_keys();

/// Renders `cfg` as a config file that parse_config reads back to `cfg`.
std::string format_config(const PipelineConfig& cfg);

}  // namespace glomnet

#endif  // GLOMNET_HARNESS_CONFIG_H_
