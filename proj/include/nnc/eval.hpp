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

// Frame-level and pixel-level ROC / AUC.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nnc/detect.hpp"
#include "nnc/synth.hpp"

namespace nnc::eval {

struct RocResult {
  std::vector<double> thresholds;  // descending; thresholds[0] = +inf
  std::vector<double> tpr;
  std::vector<double> fpr;
  double auc = 0.0;
};

// A frame is positive when its label is 1; a threshold t flags every frame
// with score >= t. Throws InputError for mismatched lengths or when only one
// class is present.
RocResult frame_level_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

// Trapezoidal area under (fpr, tpr) points given in sweep order.
double trapezoid_auc(std::span<const double> fpr, std::span<const double> tpr);

struct PixelMaps {
  int width = 0;
  int height = 0;
  std::vector<std::vector<float>> frames;
};

// Bilinear upsampling of every grid to width x height.
PixelMaps pixel_maps_from_grids(std::span<const detect::AnomalyMap> maps, int width, int height);

// Separable 2-D Gaussian, radius ceil(3 sigma), half-sample reflection.
std::vector<float> gaussian_blur(std::span<const float> image, int width, int height, double sigma);

// Per-frame gaussian_blur, parallel over frames. sigma = 0 is the identity.
PixelMaps smooth_pixel_maps(const PixelMaps& maps, double sigma);

// Threshold at which a frame stops being detected: for an anomalous frame
// the largest t with more than 40% of its mask pixels >= t; for a normal
// frame its maximum pixel value.
double detection_threshold(std::span<const float> map, std::span<const std::uint8_t> mask, bool positive);

// Pixel-level ROC: an anomalous frame is a true positive at threshold t when
// pixels >= t cover more than 40% of its mask; a normal frame is a false
// positive when any pixel is >= t. Thresholds sweep the distinct map values,
// evenly subsampled to at most max_thresholds (0 = all).
RocResult pixel_level_auc(const PixelMaps& maps, const GroundTruth& truth, int max_thresholds = 1000);

namespace serial {

RocResult pixel_level_auc(const PixelMaps& maps, const GroundTruth& truth, int max_thresholds = 1000);

}  // namespace serial

// Accepts either one `frame_index,label` pair per line (optional header) or
// a single comma-separated line of labels.
std::vector<std::uint8_t> parse_label_csv(const std::string& text);

// Labels from a CSV and/or masks from an NNCV file or PGM directory
// (nonzero = anomalous). With masks only, labels are derived from them.
GroundTruth load_ground_truth(const std::optional<std::filesystem::path>& labels_csv,
                              const std::optional<std::filesystem::path>& masks,
                              std::optional<std::size_t> expected_frames = std::nullopt);

void write_ground_truth(const GroundTruth& truth, const std::filesystem::path& labels_csv,
                        const std::optional<std::filesystem::path>& masks_nncv);

struct EvalReport {
  std::optional<double> frame_auc;
  std::optional<double> pixel_auc;
};

// metric,value rows; when `roc` curves are given they follow as
// curve,threshold,fpr,tpr rows.
void write_report(const EvalReport& report, const std::filesystem::path& path,
                  const RocResult* frame_roc = nullptr, const RocResult* pixel_roc = nullptr);

}  // namespace nnc::eval
