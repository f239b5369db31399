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

#include "glomnet/segment/segment.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "glomnet/error.h"
#include "glomnet/imgcore/sampling.h"

namespace glomnet {

namespace {

// Shared body of erosion and dilation. Erosion keeps a pixel when every
// structuring-element neighbour is foreground (outside = background);
// dilation sets it when any neighbour is foreground (outside ignored).
Mask morph_once(const Mask& in, const StructuringElement& se, bool erode) {
  const int w = in.width();
  const int h = in.height();
  Mask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool result = erode;
      for (int k = 0; k < 9 && result == erode; ++k) {
        if (!se[k]) continue;
        const int nx = x + k % 3 - 1;
        const int ny = y + k / 3 - 1;
        const bool inside = nx >= 0 && ny >= 0 && nx < w && ny < h;
        const bool fg = inside && in.get(nx, ny);
        if (erode && !fg) result = false;
        if (!erode && fg) result = true;
      }
      out.set(x, y, result);
    }
  }
  return out;
}

double wrap_angle_deg(double angle) {
  while (angle <= -90.0) angle += 180.0;
  while (angle > 90.0) angle -= 180.0;
  return angle;
}

}  // namespace

void SegmentConfig::validate() const {
  if (erode_iters < 0 || dilate_iters < 0) {
    throw UsageError("segment iteration counts must be >= 0");
  }
  if (min_area_px < 0) throw UsageError("segment min_area_px must be >= 0");
}

std::vector<std::uint8_t> luminance(const Image& img) {
  const std::size_t n = static_cast<std::size_t>(img.width()) * img.height();
  std::vector<std::uint8_t> lum(n);
  const auto data = img.data();
  if (img.channels() == 1) {
    std::copy(data.begin(), data.end(), lum.begin());
    return lum;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t r = data[3 * i], g = data[3 * i + 1], b = data[3 * i + 2];
    lum[i] = static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
  }
  return lum;
}

ThresholdResult otsu_threshold(const Image& img) {
  const auto lum = luminance(img);
  std::array<std::uint64_t, 256> hist{};
  for (auto v : lum) ++hist[v];
  if (std::count_if(hist.begin(), hist.end(), [](auto c) { return c > 0; }) < 2) {
    throw DataError("degenerate histogram");
  }

  const double total = static_cast<double>(lum.size());
  double total_sum = 0.0;
  for (int i = 0; i < 256; ++i) total_sum += static_cast<double>(i) * hist[i];

  // Class 0 holds luminance < t.
  int best_t = 1;
  double best_var = -1.0;
  double n0 = 0.0, s0 = 0.0;
  for (int t = 1; t < 256; ++t) {
    n0 += static_cast<double>(hist[t - 1]);
    s0 += static_cast<double>(t - 1) * hist[t - 1];
    const double n1 = total - n0;
    if (n0 == 0.0 || n1 == 0.0) continue;
    const double mean_diff = s0 / n0 - (total_sum - s0) / n1;
    const double between = (n0 / total) * (n1 / total) * mean_diff * mean_diff;
    if (between > best_var) {
      best_var = between;
      best_t = t;
    }
  }

  ThresholdResult result{best_t, Mask(img.width(), img.height())};
  auto bits = result.mask.bits();
  for (std::size_t i = 0; i < lum.size(); ++i) bits[i] = lum[i] < best_t ? 1 : 0;
  return result;
}

Mask erode(const Mask& mask, const StructuringElement& se, int iters) {
  Mask out = mask;
  for (int i = 0; i < iters; ++i) out = morph_once(out, se, true);
  return out;
}

Mask dilate(const Mask& mask, const StructuringElement& se, int iters) {
  Mask out = mask;
  for (int i = 0; i < iters; ++i) out = morph_once(out, se, false);
  return out;
}

std::vector<Mask> connected_components(const Mask& mask, std::int64_t min_area_px) {
  const int w = mask.width();
  const int h = mask.height();
  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<std::int32_t> label(n, -1);
  std::vector<std::vector<std::size_t>> members;
  std::vector<std::size_t> stack;
  const auto bits = mask.bits();

  for (std::size_t start = 0; start < n; ++start) {
    if (!bits[start] || label[start] >= 0) continue;
    const auto id = static_cast<std::int32_t>(members.size());
    auto& pixels = members.emplace_back();
    label[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      pixels.push_back(p);
      const int px = static_cast<int>(p % w);
      const int py = static_cast<int>(p / w);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = px + dx, ny = py + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
          if (bits[q] && label[q] < 0) {
            label[q] = id;
            stack.push_back(q);
          }
        }
      }
    }
  }

  // members are discovered in row-major order of their first pixel, so a
  // stable sort on area alone yields the required tie-break.
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (static_cast<std::int64_t>(members[i].size()) >= min_area_px) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return members[a].size() > members[b].size();
  });

  std::vector<Mask> components;
  components.reserve(order.size());
  for (auto i : order) {
    Mask m(w, h);
    auto out = m.bits();
    for (auto p : members[i]) out[p] = 1;
    components.push_back(std::move(m));
  }
  return components;
}

OrientedBox oriented_bbox(const Mask& component) {
  const int w = component.width();
  const int h = component.height();
  double sx = 0.0, sy = 0.0, count = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!component.get(x, y)) continue;
      sx += x;
      sy += y;
      count += 1.0;
    }
  }
  if (count == 0.0) throw DataError("oriented_bbox: empty component");
  const double mx = sx / count;
  const double my = sy / count;
  double cxx = 0.0, cyy = 0.0, cxy = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!component.get(x, y)) continue;
      const double dx = x - mx, dy = y - my;
      cxx += dx * dx;
      cyy += dy * dy;
      cxy += dx * dy;
    }
  }
  const double theta = 0.5 * std::atan2(2.0 * cxy, cxx - cyy);
  const double ax = std::cos(theta), ay = std::sin(theta);

  double umin = INFINITY, umax = -INFINITY, vmin = INFINITY, vmax = -INFINITY;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!component.get(x, y)) continue;
      const double dx = x - mx, dy = y - my;
      const double u = dx * ax + dy * ay;
      const double v = -dx * ay + dy * ax;
      umin = std::min(umin, u);
      umax = std::max(umax, u);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  }
  const double uc = 0.5 * (umin + umax);
  const double vc = 0.5 * (vmin + vmax);

  OrientedBox box;
  box.center_x = mx + uc * ax - vc * ay;
  box.center_y = my + uc * ay + vc * ax;
  box.length = umax - umin + 1.0;
  box.width = vmax - vmin + 1.0;
  double angle = theta * 180.0 / std::numbers::pi;
  if (box.width > box.length) {
    std::swap(box.length, box.width);
    angle += 90.0;
  }
  box.angle_deg = wrap_angle_deg(angle);
  return box;
}

Image extract_rotated(const Image& img, const OrientedBox& box,
                      const std::array<std::uint8_t, 3>& background) {
  if (!(box.length >= 0.5) || !(box.width >= 0.5) || !std::isfinite(box.center_x) ||
      !std::isfinite(box.center_y) || !std::isfinite(box.angle_deg)) {
    throw DataError("extract_rotated: degenerate box");
  }
  const int out_w = static_cast<int>(std::lround(box.length));
  const int out_h = static_cast<int>(std::lround(box.width));
  const double theta = box.angle_deg * std::numbers::pi / 180.0;
  const double ax = box.angle_deg == 0.0 ? 1.0 : std::cos(theta);
  const double ay = box.angle_deg == 0.0 ? 0.0 : std::sin(theta);
  const double half_w = 0.5 * (out_w - 1);
  const double half_h = 0.5 * (out_h - 1);

  Image out(out_w, out_h, img.channels());
  auto dst = out.data();
  for (int j = 0; j < out_h; ++j) {
    const double v = j - half_h;
    for (int i = 0; i < out_w; ++i) {
      const double u = i - half_w;
      const double x = box.center_x + u * ax - v * ay;
      const double y = box.center_y + u * ay + v * ax;
      sample_bilinear(img, x, y, background, dst.data() + out.index(i, j));
    }
  }
  return out;
}

std::vector<SlideSegment> segment_slide(const Image& img, const SegmentConfig& cfg) {
  cfg.validate();
  std::vector<SlideSegment> segments;
  const auto lum = luminance(img);
  // A uniform slide holds no tissue.
  if (std::all_of(lum.begin(), lum.end(), [&](auto v) { return v == lum.front(); })) {
    return segments;
  }
  auto mask = otsu_threshold(img).mask;
  mask = erode(mask, cfg.structuring_element, cfg.erode_iters);
  mask = dilate(mask, cfg.structuring_element, cfg.dilate_iters);
  const std::array<std::uint8_t, 3> white = {255, 255, 255};
  for (const auto& component : connected_components(mask, cfg.min_area_px)) {
    SlideSegment seg;
    seg.box = oriented_bbox(component);
    seg.area_px = static_cast<std::int64_t>(component.count());
    seg.crop = extract_rotated(img, seg.box, white);
    segments.push_back(std::move(seg));
  }
  return segments;
}

}  // namespace glomnet
