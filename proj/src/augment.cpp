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

#include "nnc/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nnc/error.hpp"

namespace nnc::augment {

using cubes::kDepth;
using cubes::kGridCols;
using cubes::kGridRows;
using cubes::kPatchSize;
using cubes::voxel_index;

ActivationMaps::ActivationMaps(int r, int c, int ch)
    : rows(r), cols(c), channels(ch), values(static_cast<std::size_t>(r) * c * ch, 0.0f) {}

LocationVector location_encoding(int grid_row, int grid_col) {
  if (grid_row < 0 || grid_row >= kGridRows || grid_col < 0 || grid_col >= kGridCols) {
    throw InputError("grid cell (" + std::to_string(grid_row) + "," + std::to_string(grid_col) +
                     ") outside the 12x16 grid");
  }
  LocationVector loc{};
  const int coarse = (grid_row * 2 / kGridRows) * 2 + grid_col * 2 / kGridCols;
  const int fine = (grid_row * 4 / kGridRows) * 4 + grid_col * 4 / kGridCols;
  loc[coarse] = 1.0f;
  loc[4 + fine] = 1.0f;
  return loc;
}

namespace {

struct Centre {
  double x = 0, y = 0, mass = 0;
};

// Gradient-mass centre of [y0,y0+h) x [x0,x0+w) in temporal patch t.
Centre centre_of_mass(const cubes::GradientVector& g, int t, int y0, int x0, int h, int w) {
  Centre c;
  for (int y = y0; y < y0 + h; ++y) {
    for (int x = x0; x < x0 + w; ++x) {
      const double m = g[voxel_index(t, y, x)];
      c.mass += m;
      c.x += m * x;
      c.y += m * y;
    }
  }
  if (c.mass > 0) {
    c.x /= c.mass;
    c.y /= c.mass;
  }
  return c;
}

void accumulate(DirectionVector& hist, double dx, double dy) {
  const double len = std::hypot(dx, dy);
  if (len == 0) return;
  // Centres of mirrored/rotated fixtures differ in the last ulp; snap
  // near-axis components so axis-aligned motion lands in a single bin.
  if (std::abs(dx) < 1e-9 * len) dx = 0;
  if (std::abs(dy) < 1e-9 * len) dy = 0;
  double angle = std::atan2(dy, dx);
  if (angle < 0) angle += 2 * std::numbers::pi;
  int bin = static_cast<int>(std::floor(angle / (std::numbers::pi / 4) + 1e-9));
  bin = ((bin % 8) + 8) % 8;
  hist[bin] += len;
  hist[8] += len;
}

}  // namespace

DirectionVector mean_direction_from_gradient(const cubes::GradientVector& g) {
  DirectionVector hist{};
  constexpr int half = kPatchSize / 2;
  for (int t = 0; t + 1 < kDepth; ++t) {
    const Centre a = centre_of_mass(g, t, 0, 0, kPatchSize, kPatchSize);
    const Centre b = centre_of_mass(g, t + 1, 0, 0, kPatchSize, kPatchSize);
    if (a.mass > 0 && b.mass > 0) accumulate(hist, b.x - a.x, b.y - a.y);
    for (int sy = 0; sy < 2; ++sy) {
      for (int sx = 0; sx < 2; ++sx) {
        const Centre p = centre_of_mass(g, t, sy * half, sx * half, half, half);
        const Centre q = centre_of_mass(g, t + 1, sy * half, sx * half, half, half);
        if (p.mass > 0 && q.mass > 0) accumulate(hist, q.x - p.x, q.y - p.y);
      }
    }
  }
  return hist;
}

DirectionVector mean_direction_features(const cubes::Voxels& voxels) {
  return mean_direction_from_gradient(cubes::gradient_features(voxels));
}

ActivationMaps resize_activation_maps(const ActivationMaps& maps) {
  if (maps.rows != 13 || maps.cols != 13 || maps.channels <= 0 ||
      maps.values.size() != static_cast<std::size_t>(13 * 13) * maps.channels) {
    throw InputError("activation maps must be 13x13xC, got " + std::to_string(maps.rows) + "x" +
                     std::to_string(maps.cols) + "x" + std::to_string(maps.channels));
  }
  ActivationMaps out(kGridRows, kGridCols, maps.channels);
  std::vector<float> plane(13 * 13);
  for (int ch = 0; ch < maps.channels; ++ch) {
    for (int i = 0; i < 13 * 13; ++i) plane[i] = maps.values[static_cast<std::size_t>(i) * maps.channels + ch];
    const auto resized = resize_plane(plane, 13, 13, kGridCols, kGridRows, Interpolation::kBicubic);
    for (int i = 0; i < kGridRows * kGridCols; ++i) {
      out.values[static_cast<std::size_t>(i) * maps.channels + ch] = resized[i];
    }
  }
  return out;
}

AugmentedCube augment_cube(const cubes::SpatioTemporalCube& cube, const ActivationMaps& appearance,
                           const AugmentOptions& options) {
  if (!cube.active) throw InputError("cannot augment a static cube");
  if (appearance.rows != kGridRows || appearance.cols != kGridCols ||
      appearance.channels != kAppearanceChannels) {
    throw InputError("appearance grid must be 12x16x256");
  }
  AugmentedCube out;
  out.grid_row = cube.grid_row;
  out.grid_col = cube.grid_col;
  out.end_frame = cube.end_frame;
  auto& f = out.features;
  std::copy(cube.features.begin(), cube.features.end(), f.begin());

  const auto loc = location_encoding(cube.grid_row, cube.grid_col);
  std::copy(loc.begin(), loc.end(), f.begin() + kLocationOffset);

  auto dir = mean_direction_from_gradient(cube.raw_gradient);
  if (options.normalize_direction) cubes::l2_normalize_in_place(std::span<double>(dir));
  for (int i = 0; i < kDirectionDim; ++i) f[kDirectionOffset + i] = static_cast<float>(dir[i]);

  const auto cell = appearance.cell(cube.grid_row, cube.grid_col);
  std::copy(cell.begin(), cell.end(), f.begin() + kAppearanceOffset);
  if (options.normalize_appearance) {
    cubes::l2_normalize_in_place(std::span<float>(f.data() + kAppearanceOffset, kAppearanceChannels));
  }
  return out;
}

AugmentedCube augment_cube(const cubes::SpatioTemporalCube& cube, const AppearanceProvider& provider,
                           const AugmentOptions& options) {
  return augment_cube(cube, provider.provide(cube.end_frame), options);
}

}  // namespace nnc::augment
