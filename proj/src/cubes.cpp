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

#include "nnc/cubes.hpp"

#include <cmath>

#include "nnc/error.hpp"

namespace nnc::cubes {

GradientVector gradient_features(const Voxels& v) {
  GradientVector out{};
  constexpr int n = kPatchSize;
  for (int t = 0; t < kDepth; ++t) {
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        double gx, gy, gt;
        if (x == 0) {
          gx = static_cast<double>(v[voxel_index(t, y, 1)]) - v[voxel_index(t, y, 0)];
        } else if (x == n - 1) {
          gx = static_cast<double>(v[voxel_index(t, y, n - 1)]) - v[voxel_index(t, y, n - 2)];
        } else {
          gx = (static_cast<double>(v[voxel_index(t, y, x + 1)]) - v[voxel_index(t, y, x - 1)]) / 2.0;
        }
        if (y == 0) {
          gy = static_cast<double>(v[voxel_index(t, 1, x)]) - v[voxel_index(t, 0, x)];
        } else if (y == n - 1) {
          gy = static_cast<double>(v[voxel_index(t, n - 1, x)]) - v[voxel_index(t, n - 2, x)];
        } else {
          gy = (static_cast<double>(v[voxel_index(t, y + 1, x)]) - v[voxel_index(t, y - 1, x)]) / 2.0;
        }
        if (t == 0) {
          gt = static_cast<double>(v[voxel_index(1, y, x)]) - v[voxel_index(0, y, x)];
        } else if (t == kDepth - 1) {
          gt = static_cast<double>(v[voxel_index(kDepth - 1, y, x)]) - v[voxel_index(kDepth - 2, y, x)];
        } else {
          gt = (static_cast<double>(v[voxel_index(t + 1, y, x)]) - v[voxel_index(t - 1, y, x)]) / 2.0;
        }
        out[voxel_index(t, y, x)] = std::sqrt(gx * gx + gy * gy + gt * gt);
      }
    }
  }
  return out;
}

namespace {

template <typename T>
double norm2(std::span<const T> v) {
  double s = 0.0;
  for (T x : v) s += static_cast<double>(x) * x;
  return std::sqrt(s);
}

}  // namespace

std::vector<double> l2_normalize(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  l2_normalize_in_place(std::span<double>(out));
  return out;
}

double l2_normalize_in_place(std::span<double> v) {
  const double n = norm2<double>(v);
  if (n > 0) {
    for (double& x : v) x /= n;
  }
  return n;
}

double l2_normalize_in_place(std::span<float> v) {
  const double n = norm2<float>(v);
  if (n > 0) {
    for (float& x : v) x = static_cast<float>(x / n);
  }
  return n;
}

bool is_static(std::span<const double> raw_gradient, double tau_static) {
  return norm2<double>(raw_gradient) < tau_static;
}

Voxels gather_voxels(const FrameSequence& seq, int grid_row, int grid_col, int end_frame) {
  Voxels v{};
  const int y0 = grid_row * kPatchSize;
  const int x0 = grid_col * kPatchSize;
  for (int t = 0; t < kDepth; ++t) {
    const auto& f = seq.frames[end_frame - (kDepth - 1) + t];
    for (int y = 0; y < kPatchSize; ++y) {
      for (int x = 0; x < kPatchSize; ++x) v[voxel_index(t, y, x)] = f.at(x0 + x, y0 + y);
    }
  }
  return v;
}

SpatioTemporalCube make_cube(const FrameSequence& seq, int grid_row, int grid_col, int end_frame,
                             double tau_static) {
  SpatioTemporalCube c;
  c.grid_row = grid_row;
  c.grid_col = grid_col;
  c.end_frame = end_frame;
  c.voxels = gather_voxels(seq, grid_row, grid_col, end_frame);
  c.raw_gradient = gradient_features(c.voxels);
  c.raw_norm = norm2<double>(c.raw_gradient);
  c.active = !(c.raw_norm < tau_static) && c.raw_norm > 0;
  if (c.active) {
    for (int i = 0; i < kVoxelCount; ++i) c.features[i] = static_cast<float>(c.raw_gradient[i] / c.raw_norm);
  }
  return c;
}

std::vector<int> cube_end_frames(int n_frames, int temporal_stride) {
  if (temporal_stride < 1) throw InputError("temporal stride must be >= 1");
  std::vector<int> ends;
  for (int t = kDepth - 1; t < n_frames; t += temporal_stride) ends.push_back(t);
  return ends;
}

void check_working_sequence(const FrameSequence& seq) {
  if (seq.size() < static_cast<std::size_t>(kDepth)) {
    throw InputError("need at least 5 frames, got " + std::to_string(seq.size()));
  }
  if (seq.width() != kFrameWidth || seq.height() != kFrameHeight) {
    throw InputError("cube extraction needs 160x120 frames, got " + std::to_string(seq.width()) +
                     "x" + std::to_string(seq.height()));
  }
}

std::vector<SpatioTemporalCube> extract_frame_cubes(const FrameSequence& seq, int end_frame,
                                                    double tau_static) {
  std::vector<SpatioTemporalCube> out(kCellsPerFrame);
  for (int cell = 0; cell < kCellsPerFrame; ++cell) {
    out[cell] = make_cube(seq, cell / kGridCols, cell % kGridCols, end_frame, tau_static);
  }
  return out;
}

std::vector<SpatioTemporalCube> extract_cubes(const FrameSequence& seq, int temporal_stride,
                                              double tau_static) {
  check_working_sequence(seq);
  const auto ends = cube_end_frames(static_cast<int>(seq.size()), temporal_stride);
  const long total = static_cast<long>(ends.size()) * kCellsPerFrame;
  std::vector<SpatioTemporalCube> out(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(static)
  for (long i = 0; i < total; ++i) {
    const int cell = static_cast<int>(i % kCellsPerFrame);
    out[i] = make_cube(seq, cell / kGridCols, cell % kGridCols, ends[i / kCellsPerFrame], tau_static);
  }
  return out;
}

namespace serial {

std::vector<SpatioTemporalCube> extract_cubes(const FrameSequence& seq, int temporal_stride,
                                              double tau_static) {
  check_working_sequence(seq);
  std::vector<SpatioTemporalCube> out;
  for (int end : cube_end_frames(static_cast<int>(seq.size()), temporal_stride)) {
    for (int r = 0; r < kGridRows; ++r) {
      for (int c = 0; c < kGridCols; ++c) out.push_back(make_cube(seq, r, c, end, tau_static));
    }
  }
  return out;
}

}  // namespace serial

}  // namespace nnc::cubes
