/*
 * Copyright 2026 The NNC Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "nnc/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "nnc/error.hpp"

namespace nnc {

namespace {

constexpr double kBackground = 0.6;
constexpr double kBlobDarkness = 0.45;
constexpr double kDitherProbability = 0.02;
constexpr double kTextureProbability = 0.1;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Blob {
  double x0, y0, vx, vy, sigma;
  int start = 0;
  int end = 0;
  bool anomalous = false;
};

double wrap(double v, double period) {
  v = std::fmod(v, period);
  return v < 0 ? v + period : v;
}

// Squared toroidal distance between pixel centre (px,py) and (cx,cy).
double torus_dist2(double px, double py, double cx, double cy, double w, double h) {
  double dx = std::abs(px - cx);
  double dy = std::abs(py - cy);
  dx = std::min(dx, w - dx);
  dy = std::min(dy, h - dy);
  return dx * dx + dy * dy;
}

Blob make_blob(double x, double y, double size, double speed, double direction_deg) {
  const double rad = direction_deg * std::numbers::pi / 180.0;
  return Blob{x, y, speed * std::cos(rad), speed * std::sin(rad), size / 4.0};
}

}  // namespace

void SynthSpec::validate() const {
  if (width < 1 || height < 1) throw InputError("synth: frame size must be positive");
  if (n_frames < 1) throw InputError("synth: n_frames must be positive");
  for (const auto& a : normal_actors) {
    if (a.size <= 0) throw InputError("synth: actor size must be positive");
    if (a.lane_y && !(*a.lane_y >= 0.0 && *a.lane_y < height)) {
      throw InputError("synth: actor lane lies outside the frame");
    }
  }
  for (const auto& a : anomalies) {
    if (a.start_frame < 0 || a.end_frame > n_frames || a.start_frame >= a.end_frame) {
      throw InputError("synth: anomaly interval [" + std::to_string(a.start_frame) + "," +
                       std::to_string(a.end_frame) + ") outside [0," + std::to_string(n_frames) + ")");
    }
    const auto& r = a.region;
    if (r.width < 1 || r.height < 1 || r.x < 0 || r.y < 0 || r.x + r.width > width ||
        r.y + r.height > height) {
      throw InputError("synth: anomaly region outside frame bounds");
    }
  }
}

void GroundTruth::validate() const {
  if (!has_masks()) return;
  if (pixel_masks.size() != frame_labels.size()) {
    throw InputError("ground truth: " + std::to_string(pixel_masks.size()) + " masks for " +
                     std::to_string(frame_labels.size()) + " labels");
  }
  for (std::size_t t = 0; t < pixel_masks.size(); ++t) {
    const auto& m = pixel_masks[t];
    if (m.size() != static_cast<std::size_t>(mask_width) * mask_height) {
      throw InputError("ground truth: mask " + std::to_string(t) + " has wrong size");
    }
    bool any = false;
    for (auto v : m) any = any || v != 0;
    if (any != (frame_labels[t] != 0)) {
      throw InputError("ground truth: frame " + std::to_string(t) + " label " +
                       std::to_string(frame_labels[t]) + " inconsistent with its mask");
    }
  }
}

SynthVideo generate(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const double w = spec.width;
  const double h = spec.height;

  // Sparse static texture: one pixel in ten is one grey level off. Dense
  // texture would push empty-background cubes towards the static threshold.
  std::vector<double> background(static_cast<std::size_t>(spec.width) * spec.height);
  for (auto& v : background) {
    v = kBackground;
    if (uniform01(rng) < kTextureProbability) v += (rng() & 1u) ? 1.0 / 255.0 : -1.0 / 255.0;
  }

  std::vector<Blob> blobs;
  for (const auto& a : spec.normal_actors) {
    const double x = uniform01(rng) * w;
    const double random_y = a.size + uniform01(rng) * std::max(0.0, h - 2 * a.size);
    const double y = a.lane_y.value_or(random_y);
    Blob b = make_blob(x, y, a.size, a.speed, a.direction);
    b.end = spec.n_frames;
    blobs.push_back(b);
  }
  for (const auto& a : spec.anomalies) {
    const auto& r = a.region;
    Blob b = make_blob(r.x + r.width / 2.0, r.y + r.height / 2.0, std::min(r.width, r.height),
                       a.speed, a.direction);
    b.start = a.start_frame;
    b.end = a.end_frame;
    b.anomalous = true;
    blobs.push_back(b);
  }

  SynthVideo out;
  out.truth.mask_width = spec.width;
  out.truth.mask_height = spec.height;
  out.truth.frame_labels.assign(spec.n_frames, 0);
  out.truth.pixel_masks.assign(spec.n_frames, {});
  out.frames.frames.reserve(spec.n_frames);

  std::vector<double> shade(background.size());
  for (int t = 0; t < spec.n_frames; ++t) {
    auto& mask = out.truth.pixel_masks[t];
    mask.assign(background.size(), 0);
    std::fill(shade.begin(), shade.end(), 0.0);
    for (const auto& b : blobs) {
      if (t < b.start || t >= b.end) continue;
      const double dt = t - b.start;
      const double cx = wrap(b.x0 + b.vx * dt, w);
      const double cy = wrap(b.y0 + b.vy * dt, h);
      const double inv2s2 = 1.0 / (2.0 * b.sigma * b.sigma);
      const double cutoff2 = 4.0 * b.sigma * b.sigma;  // 2 sigma footprint
      for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
          const double d2 = torus_dist2(x + 0.5, y + 0.5, cx, cy, w, h);
          if (d2 > 25.0 * b.sigma * b.sigma) continue;
          const std::size_t i = static_cast<std::size_t>(y) * spec.width + x;
          shade[i] += std::exp(-d2 * inv2s2);
          if (b.anomalous && d2 <= cutoff2) mask[i] = 1;
        }
      }
    }
    GrayFrame frame(spec.width, spec.height, t);
    for (std::size_t i = 0; i < background.size(); ++i) {
      double v = background[i] - kBlobDarkness * std::min(shade[i], 1.0);
      if (uniform01(rng) < kDitherProbability) v += (rng() & 1u) ? 1.0 / 255.0 : -1.0 / 255.0;
      v = std::clamp(v, 0.0, 1.0);
      frame.pixels[i] = static_cast<float>(std::lround(v * 255.0)) / 255.0f;
    }
    bool any = false;
    for (auto m : mask) any = any || m != 0;
    out.truth.frame_labels[t] = any ? 1 : 0;
    out.frames.frames.push_back(std::move(frame));
  }
  if (spec.anomalies.empty()) {
    out.truth.pixel_masks.clear();
    out.truth.mask_width = out.truth.mask_height = 0;
  }
  return out;
}

SynthSpec benchmark_training_spec() {
  SynthSpec spec;
  spec.width = 160;
  spec.height = 120;
  spec.n_frames = 600;
  spec.seed = 43;
  spec.normal_actors = {
      {12.0, 1.0, 0.0, 25.0},
      {12.0, 1.0, 180.0, 50.0},
      {10.0, 1.0, 0.0, 75.0},
      {14.0, 1.0, 180.0, 100.0},
  };
  return spec;
}

SynthSpec benchmark_spec() {
  SynthSpec spec = benchmark_training_spec();
  spec.seed = 42;
  spec.anomalies = {
      // Runs along the third lane at four times the normal speed.
      {180, 240, Region{10, 68, 14, 14}, 4.0, 0.0},
      // Moves at normal speed but crosses the lanes vertically.
      {400, 460, Region{74, 10, 14, 14}, 1.0, 90.0},
  };
  return spec;
}

}  // namespace nnc
