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

#include "glomnet/harness/config.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "glomnet/csv.h"
#include "glomnet/error.h"

namespace glomnet {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

long long to_int(std::string_view v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw UsageError("expected an integer");
  return out;
}

double to_double(std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw UsageError("expected a number");
  return out;
}

bool to_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw UsageError("expected true or false");
}

std::array<std::uint8_t, 3> to_color(std::string_view v) {
  const auto parts = csv::split(v);
  if (parts.size() != 3) throw UsageError("expected a colour r,g,b");
  std::array<std::uint8_t, 3> rgb{};
  for (int i = 0; i < 3; ++i) {
    const auto c = to_int(trim(parts[i]));
    if (c < 0 || c > 255) throw UsageError("colour components must lie in 0..255");
    rgb[i] = static_cast<std::uint8_t>(c);
  }
  return rgb;
}

std::string color_text(const std::array<std::uint8_t, 3>& c) {
  return std::to_string(c[0]) + "," + std::to_string(c[1]) + "," + std::to_string(c[2]);
}

std::string num(double v) { return csv::format_double(v); }

struct Key {
  std::string_view name;
  std::function<void(PipelineConfig&, std::string_view)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

#define GLOMNET_INT_KEY(NAME, FIELD)                                                  \
  Key {                                                                               \
    NAME, [](PipelineConfig& c, std::string_view v) { c.FIELD = static_cast<decltype(c.FIELD)>(to_int(v)); }, \
        [](const PipelineConfig& c) { return std::to_string(c.FIELD); }               \
  }
#define GLOMNET_DOUBLE_KEY(NAME, FIELD)                                               \
  Key {                                                                               \
    NAME, [](PipelineConfig& c, std::string_view v) { c.FIELD = to_double(v); },      \
        [](const PipelineConfig& c) { return num(c.FIELD); }                          \
  }

const std::vector<Key>& key_table() {
  static const std::vector<Key> keys = {
      GLOMNET_INT_KEY("net.input_side", net.input_side),
      Key{"net.conv_groups",
          [](PipelineConfig& c, std::string_view v) { c.net.conv_groups = parse_conv_groups(std::string(v)); },
          [](const PipelineConfig& c) { return format_conv_groups(c.net.conv_groups); }},
      Key{"net.dense_widths",
          [](PipelineConfig& c, std::string_view v) { c.net.dense_widths = parse_int_list(std::string(v)); },
          [](const PipelineConfig& c) { return format_int_list(c.net.dense_widths); }},
      Key{"net.aux",
          [](PipelineConfig& c, std::string_view v) {
            c.aux = parse_aux_mode(v);
            c.net.aux_dim = c.aux == AuxMode::kOff ? 0 : 1;
          },
          [](const PipelineConfig& c) { return std::string(aux_mode_name(c.aux)); }},
      GLOMNET_DOUBLE_KEY("opt.rho", opt.rho),
      GLOMNET_DOUBLE_KEY("opt.epsilon", opt.epsilon),
      GLOMNET_DOUBLE_KEY("opt.lr0", opt.lr0),
      GLOMNET_INT_KEY("opt.epochs", opt.epochs),
      GLOMNET_INT_KEY("opt.batch_size", opt.batch_size),
      GLOMNET_DOUBLE_KEY("aug.rotation_deg", aug.rotation_deg),
      GLOMNET_DOUBLE_KEY("aug.translate_frac", aug.translate_frac),
      GLOMNET_DOUBLE_KEY("aug.zoom_frac", aug.zoom_frac),
      GLOMNET_DOUBLE_KEY("aug.flip_prob", aug.flip_prob),
      GLOMNET_INT_KEY("aug.crop_px", aug.crop_px),
      GLOMNET_INT_KEY("aug.load_downsample", aug.load_downsample),
      Key{"aug.fill", [](PipelineConfig& c, std::string_view v) { c.aug.fill = to_color(v); },
          [](const PipelineConfig& c) { return color_text(c.aug.fill); }},
      GLOMNET_INT_KEY("chip.window_px", chip.window_px),
      GLOMNET_DOUBLE_KEY("chip.overlap_frac", chip.overlap_frac),
      GLOMNET_INT_KEY("chip.downsample_factor", chip.downsample_factor),
      GLOMNET_INT_KEY("seg.erode_iters", seg.erode_iters),
      GLOMNET_INT_KEY("seg.dilate_iters", seg.dilate_iters),
      Key{"seg.structuring_element",
          [](PipelineConfig& c, std::string_view v) {
            if (v == "square") c.seg.structuring_element = kFullSquare;
            else if (v == "cross") c.seg.structuring_element = kCross;
            else throw UsageError("expected square or cross");
          },
          [](const PipelineConfig& c) {
            return std::string(c.seg.structuring_element == kCross ? "cross" : "square");
          }},
      GLOMNET_INT_KEY("seg.min_area_px", seg.min_area_px),
      GLOMNET_INT_KEY("seg.downsample", seg_downsample),
      GLOMNET_INT_KEY("synth.n_patients", synth.n_patients),
      GLOMNET_INT_KEY("synth.rois_per_patient", synth.rois_per_patient),
      GLOMNET_INT_KEY("synth.roi_px", synth.roi_px),
      Key{"synth.seed",
          [](PipelineConfig& c, std::string_view v) {
            std::uint64_t s = 0;
            const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
            if (ec != std::errc() || ptr != v.data() + v.size()) throw UsageError("expected an unsigned integer");
            c.synth.seed = s;
          },
          [](const PipelineConfig& c) { return std::to_string(c.synth.seed); }},
      GLOMNET_DOUBLE_KEY("synth.noise_egfr_sd", synth.noise_egfr_sd),
      GLOMNET_INT_KEY("synth.max_blobs", synth.max_blobs),
      GLOMNET_DOUBLE_KEY("synth.blob_radius_min", synth.blob_radius_min),
      GLOMNET_DOUBLE_KEY("synth.blob_radius_max", synth.blob_radius_max),
      Key{"synth.blob_color", [](PipelineConfig& c, std::string_view v) { c.synth.blob_color = to_color(v); },
          [](const PipelineConfig& c) { return color_text(c.synth.blob_color); }},
      GLOMNET_INT_KEY("synth.pixel_noise", synth.pixel_noise),
      Key{"synth.ablate_image_signal",
          [](PipelineConfig& c, std::string_view v) { c.synth.ablate_image_signal = to_bool(v); },
          [](const PipelineConfig& c) { return std::string(c.synth.ablate_image_signal ? "true" : "false"); }},
      GLOMNET_INT_KEY("train.threads", threads),
  };
  return keys;
}

#undef GLOMNET_INT_KEY
#undef GLOMNET_DOUBLE_KEY

}  // namespace

AuxMode parse_aux_mode(std::string_view text) {
  if (text == "off") return AuxMode::kOff;
  if (text == "baseline_egfr") return AuxMode::kBaselineEgfr;
  throw UsageError("aux mode must be 'off' or 'baseline_egfr', got '" + std::string(text) + "'");
}

std::string_view aux_mode_name(AuxMode mode) {
  return mode == AuxMode::kOff ? "off" : "baseline_egfr";
}

void PipelineConfig::validate_training() const {
  net.validate();
  opt.validate();
  aug.validate();
  if (aug.crop_px != net.input_side) {
    throw UsageError("aug.crop_px (" + std::to_string(aug.crop_px) + ") must equal net.input_side (" +
                     std::to_string(net.input_side) + ")");
  }
  if (net.input_channels != 3) throw UsageError("training expects 3-channel chips");
  const int want_aux = aux == AuxMode::kOff ? 0 : 1;
  if (net.aux_dim != want_aux) {
    throw UsageError("net aux width " + std::to_string(net.aux_dim) + " does not match aux mode " +
                     std::string(aux_mode_name(aux)));
  }
  if (threads < 1) throw UsageError("train.threads must be >= 1");
}

PipelineConfig parse_config(std::string_view text, PipelineConfig base, std::string_view origin) {
  const auto& keys = key_table();
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const std::string where = std::string(origin) + ":" + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw UsageError(where + "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw UsageError(where + "expected 'key = value'");
    std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!section.empty()) key = section + "." + key;
    const auto it = std::find_if(keys.begin(), keys.end(), [&](const Key& k) { return k.name == key; });
    if (it == keys.end()) throw UsageError(where + "unknown key '" + key + "'");
    try {
      it->set(base, value);
    } catch (const UsageError& e) {
      throw UsageError(where + key + ": " + e.what());
    }
    if (end == text.size()) break;
  }
  return base;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), std::move(base), path.string());
}

std::vector<std::string> config_keys() {
  std::vector<std::string> names;
  for (const auto& k : key_table()) names.emplace_back(k.name);
  std::sort(names.begin(), names.end());
  return names;
}

std::string format_config(const PipelineConfig& cfg) {
  std::string out;
  for (const auto& k : key_table()) out += std::string(k.name) + " = " + k.get(cfg) + "\n";
  return out;
}

}  // namespace glomnet
