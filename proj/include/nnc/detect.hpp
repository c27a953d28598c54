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

// Training orchestration and inference for the narrowed-normality-cluster
// detector: cubes -> augmentation -> k-means pruning -> per-cluster
// one-class SVMs, and max-normality scoring of test video.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "nnc/augment.hpp"
#include "nnc/cluster.hpp"
#include "nnc/config.hpp"
#include "nnc/ingest.hpp"
#include "nnc/matrix.hpp"
#include "nnc/ocsvm.hpp"

namespace nnc::detect {

struct FeatureConfig {
  std::uint32_t gradient_dim = augment::kGradientDim;
  std::uint32_t location_dim = augment::kLocationDim;
  std::uint32_t direction_dim = augment::kDirectionDim;
  std::uint32_t appearance_dim = augment::kAppearanceChannels;
  bool normalize_direction = true;
  bool normalize_appearance = true;
  AppearanceSource appearance = AppearanceSource::kHandcrafted;
  float tau_static = 0.1f;
  std::uint32_t k = 0;
  std::uint32_t min_cluster_size = 500;

  std::uint32_t feature_dim() const { return gradient_dim + location_dim + direction_dim + appearance_dim; }
  bool operator==(const FeatureConfig&) const = default;
};

// A trained one-class SVM reduced to what linear scoring needs.
struct LinearScorer {
  std::vector<float> w;
  float rho = 0.0f;

  double decision(std::span<const float> x) const;
  bool operator==(const LinearScorer&) const = default;
};

struct NormalityModel {
  static constexpr std::uint32_t kFormatVersion = 1;

  FeatureConfig config;
  std::vector<LinearScorer> models;  // one per retained cluster

  std::size_t retained() const { return models.size(); }
  bool operator==(const NormalityModel&) const = default;
};

struct ClusterReport {
  std::size_t size = 0;
  bool retained = false;
  double outlier_fraction = 0.0;  // training decisions below -tol (retained clusters only)
  double support_fraction = 0.0;
  bool nu_property_holds = true;
};

struct TrainingReport {
  std::size_t n_cubes = 0;
  int k = 0;
  std::size_t r = 0;
  double energy = 0.0;
  double nu = 0.0;
  std::vector<ClusterReport> clusters;
};

struct TrainResult {
  NormalityModel model;
  TrainingReport report;
};

// Augmented features of every active cube ending at the strided frames,
// ordered by end frame then grid cell. Parallel over frames.
FeatureMatrix collect_features(const FrameSequence& working, const augment::AppearanceProvider& provider,
                               const RunConfig& cfg, int temporal_stride,
                               MissingAppearance missing);

// The sequence must already be at the 120x160 working size.
TrainResult train(const FrameSequence& working, const augment::AppearanceProvider& provider,
                  const RunConfig& cfg);

// Negated maximum normality score over all narrowed clusters; positive
// means the cube lies outside every cluster boundary.
double score_cube(const NormalityModel& model, std::span<const float> x);

struct AnomalyMap {
  static constexpr int kRows = cubes::kGridRows;
  static constexpr int kCols = cubes::kGridCols;

  int frame_index = 0;
  std::array<double, kRows * kCols> grid{};
  std::array<std::uint8_t, kRows * kCols> active{};

  double at(int r, int c) const { return grid[r * kCols + c]; }
  double max() const;
};

struct FrameScoreSeries {
  std::vector<double> raw;
  std::vector<double> smoothed;
  std::vector<double> normalized;
};

struct ScoreResult {
  std::vector<AnomalyMap> maps;  // one per frame (held maps repeated)
  FrameScoreSeries series;
  std::size_t computed_frames = 0;
};

// Abnormality grid for the cubes ending at `end_frame`, before the static
// floor is applied (inactive cells hold 0 and active[] = 0).
AnomalyMap raw_map(const NormalityModel& model, const FrameSequence& working,
                   const augment::AppearanceProvider& provider, int end_frame,
                   MissingAppearance missing);

// Maps at end frames 4, 4+stride, ... computed in parallel; other frames
// hold the most recent computed map (frames 0..3 take the first one).
// Static cells take the lowest active abnormality of their frame; frames
// with no active cell take the lowest active abnormality of the video, or 0.
ScoreResult score_sequence(const NormalityModel& model, const FrameSequence& working,
                           const augment::AppearanceProvider& provider, const RunConfig& cfg);

// 1-D Gaussian smoothing, radius ceil(3 sigma), half-sample reflection at
// the ends. sigma = 0 returns the input.
std::vector<double> temporal_smooth(std::span<const double> series, double sigma);

// Min-max scaling to [0,1]; a constant series maps to zeros.
std::vector<double> normalize_scores(std::span<const double> series);

// Bilinear upsampling of the 12x16 grid to width x height pixels.
std::vector<float> upsample_map(const AnomalyMap& map, int width, int height);

void save_model(const NormalityModel& model, const std::filesystem::path& path);
NormalityModel load_model(const std::filesystem::path& path);

// CSV with header frame_index,raw,smoothed,normalized.
void write_scores_csv(const FrameScoreSeries& series, const std::filesystem::path& path);
FrameScoreSeries read_scores_csv(const std::filesystem::path& path);

// NNCG grid file: "NNCG", u32 LE version (1), cols, rows, n_frames, then
// rows*cols float32 LE per frame, row-major.
void write_maps(std::span<const AnomalyMap> maps, const std::filesystem::path& path);
std::vector<AnomalyMap> read_maps(const std::filesystem::path& path);

namespace serial {

// Single-threaded reference for score_sequence.
ScoreResult score_sequence(const NormalityModel& model, const FrameSequence& working,
                           const augment::AppearanceProvider& provider, const RunConfig& cfg);

}  // namespace serial

}  // namespace nnc::detect
