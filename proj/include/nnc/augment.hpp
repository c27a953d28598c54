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

// Cube augmentation: spatial-pyramid location, mean motion direction and
// per-cell appearance channels appended to the 500 gradient features.

#include <array>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "nnc/cubes.hpp"
#include "nnc/ingest.hpp"

namespace nnc::augment {

inline constexpr int kGradientDim = cubes::kVoxelCount;
inline constexpr int kLocationDim = 20;
inline constexpr int kDirectionDim = 9;
inline constexpr int kAppearanceChannels = 256;
inline constexpr int kFeatureDim = kGradientDim + kLocationDim + kDirectionDim + kAppearanceChannels;

inline constexpr int kLocationOffset = kGradientDim;
inline constexpr int kDirectionOffset = kLocationOffset + kLocationDim;
inline constexpr int kAppearanceOffset = kDirectionOffset + kDirectionDim;

static_assert(kFeatureDim == 785);

using LocationVector = std::array<float, kLocationDim>;
using DirectionVector = std::array<double, kDirectionDim>;
using FeatureVector = std::array<float, kFeatureDim>;

struct AugmentedCube {
  int grid_row = 0;
  int grid_col = 0;
  int end_frame = 0;
  FeatureVector features{};
};

// Activation maps stored channel-minor: value(r, c, ch) = values[(r * cols + c) * channels + ch].
struct ActivationMaps {
  int rows = 0;
  int cols = 0;
  int channels = 0;
  std::vector<float> values;

  ActivationMaps() = default;
  ActivationMaps(int r, int c, int ch);

  std::span<const float> cell(int r, int c) const {
    return {values.data() + (static_cast<std::size_t>(r) * cols + c) * channels,
            static_cast<std::size_t>(channels)};
  }
  std::span<float> cell(int r, int c) {
    return {values.data() + (static_cast<std::size_t>(r) * cols + c) * channels,
            static_cast<std::size_t>(channels)};
  }
};

// Two-level pyramid one-hot: entries [0,4) index the 2x2 level, [4,20) the
// 4x4 level. Throws InputError for cells outside the 12x16 grid.
LocationVector location_encoding(int grid_row, int grid_col);

// 8-bin histogram of centre-of-mass displacement vectors between consecutive
// patches (whole patch and each 2x2 sub-bin, 20 vectors), weighted by
// displacement length, plus the total length in entry 8. Bin b covers
// [b*45, (b+1)*45) degrees measured from +x with y pointing down.
DirectionVector mean_direction_features(const cubes::Voxels& voxels);
DirectionVector mean_direction_from_gradient(const cubes::GradientVector& gradient);

// Channel-wise bicubic resize of 13x13 conv maps onto the 12x16 cube grid.
ActivationMaps resize_activation_maps(const ActivationMaps& maps);

// Per-cell descriptor of oriented gradient energy: 4 scales x 16 orientations
// x 2x2 sub-cells = 256 channels. Stand-in for CNN conv maps.
ActivationMaps handcrafted_appearance(const GrayFrame& frame);

class AppearanceProvider {
 public:
  virtual ~AppearanceProvider() = default;
  // 12x16x256 maps for a frame; throws InputError when the frame is not covered.
  virtual ActivationMaps provide(int frame_index) const = 0;
  virtual bool covers(int frame_index) const = 0;
};

// Always zeros; used for the motion-only path.
class ZeroAppearanceProvider final : public AppearanceProvider {
 public:
  ActivationMaps provide(int frame_index) const override;
  bool covers(int) const override { return true; }
};

// Computes handcrafted_appearance on the fly from a 120x160 sequence.
class HandcraftedAppearanceProvider final : public AppearanceProvider {
 public:
  explicit HandcraftedAppearanceProvider(const FrameSequence& working_frames);
  ActivationMaps provide(int frame_index) const override;
  bool covers(int frame_index) const override;

 private:
  const FrameSequence* frames_;
};

// NNCF layout: "NNCF", u32 LE version (1), n_frames, rows, cols, channels,
// then per frame rows*cols*channels float32 LE in channel-minor order.
// 13x13 maps are resized on read; 12x16 maps pass through.
class FileAppearanceProvider final : public AppearanceProvider {
 public:
  explicit FileAppearanceProvider(std::filesystem::path path);
  ActivationMaps provide(int frame_index) const override;
  bool covers(int frame_index) const override;

  int frame_count() const { return n_frames_; }
  // Maps exactly as stored, without resizing.
  ActivationMaps read_raw(int frame_index) const;
  int stored_rows() const { return rows_; }
  int stored_cols() const { return cols_; }

 private:
  std::filesystem::path path_;
  int n_frames_ = 0;
  int rows_ = 0;
  int cols_ = 0;
  int channels_ = 0;
};

std::unique_ptr<AppearanceProvider> file_appearance_provider(const std::filesystem::path& path);

void write_nncf(const std::filesystem::path& path, std::span<const ActivationMaps> frames);

struct AugmentOptions {
  bool normalize_direction = true;
  bool normalize_appearance = true;
};

// Concatenates [gradient | location | direction | appearance]. The cube
// must be active; `appearance` is the 12x16x256 grid for cube.end_frame.
AugmentedCube augment_cube(const cubes::SpatioTemporalCube& cube, const ActivationMaps& appearance,
                           const AugmentOptions& options = {});

// Convenience overload that asks the provider for the cube's end frame.
AugmentedCube augment_cube(const cubes::SpatioTemporalCube& cube, const AppearanceProvider& provider,
                           const AugmentOptions& options = {});

}  // namespace nnc::augment
