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

#pragma once

// Spatio-temporal cubes: 10x10 patches on a 12x16 grid over 120x160
// frames, stacked over 5 consecutive frames.

#include <array>
#include <span>
#include <vector>

#include "nnc/ingest.hpp"

namespace nnc::cubes {

inline constexpr int kFrameHeight = 120;
inline constexpr int kFrameWidth = 160;
inline constexpr int kPatchSize = 10;
inline constexpr int kDepth = 5;
inline constexpr int kGridRows = kFrameHeight / kPatchSize;
inline constexpr int kGridCols = kFrameWidth / kPatchSize;
inline constexpr int kCellsPerFrame = kGridRows * kGridCols;
inline constexpr int kVoxelCount = kPatchSize * kPatchSize * kDepth;

static_assert(kGridRows == 12 && kGridCols == 16);
static_assert(kVoxelCount == 500);

// Voxel raster order: index = (t * 10 + y) * 10 + x, t = 0 is the oldest frame.
using Voxels = std::array<float, kVoxelCount>;
using GradientVector = std::array<double, kVoxelCount>;

constexpr int voxel_index(int t, int y, int x) { return (t * kPatchSize + y) * kPatchSize + x; }

struct SpatioTemporalCube {
  int grid_row = 0;
  int grid_col = 0;
  int end_frame = 0;
  Voxels voxels{};
  GradientVector raw_gradient{};  // unnormalized per-voxel gradient magnitudes
  std::array<float, kVoxelCount> features{};  // unit norm when active, zero otherwise
  double raw_norm = 0.0;
  bool active = false;
};

// Per-voxel 3D gradient magnitude sqrt(gx^2 + gy^2 + gt^2). Central
// differences in the interior, one-sided differences on the cube faces.
GradientVector gradient_features(const Voxels& voxels);

// Returns v / ||v||_2, or v unchanged when its norm is zero.
std::vector<double> l2_normalize(std::span<const double> v);

// In-place variant; returns the original norm.
double l2_normalize_in_place(std::span<double> v);
double l2_normalize_in_place(std::span<float> v);

bool is_static(std::span<const double> raw_gradient, double tau_static);

Voxels gather_voxels(const FrameSequence& seq, int grid_row, int grid_col, int end_frame);

SpatioTemporalCube make_cube(const FrameSequence& seq, int grid_row, int grid_col, int end_frame,
                             double tau_static);

// End frames 4, 4 + stride, 4 + 2 * stride, ... below n_frames.
std::vector<int> cube_end_frames(int n_frames, int temporal_stride);

// Throws InputError unless the sequence is 120x160 with at least 5 frames.
void check_working_sequence(const FrameSequence& seq);

// All 192 cubes ending at `end_frame`, in row-major grid order.
std::vector<SpatioTemporalCube> extract_frame_cubes(const FrameSequence& seq, int end_frame,
                                                    double tau_static);

// One cube per grid cell per temporal position; ordered by end frame, then
// row-major grid cell. OpenMP-parallel over (frame, cell).
std::vector<SpatioTemporalCube> extract_cubes(const FrameSequence& seq, int temporal_stride,
                                              double tau_static);

namespace serial {

// Single-threaded reference for extract_cubes.
std::vector<SpatioTemporalCube> extract_cubes(const FrameSequence& seq, int temporal_stride,
                                              double tau_static);

}  // namespace serial

}  // namespace nnc::cubes
