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

// Score timelines rendered as standalone SVG, with ground-truth abnormal
// intervals shaded pink behind the curve.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nnc::cli {

// Maximal runs of label 1 as half-open [start, end) frame intervals.
std::vector<std::pair<int, int>> label_runs(std::span<const std::uint8_t> labels);

struct PlotOptions {
  int width = 900;
  int height = 260;
  std::string title = "anomaly score";
};

// One polyline over the series (expected in [0,1]; values are clamped for
// drawing) and one <rect class="gt" data-start=".." data-end=".."> per
// label run. `labels` may be empty.
std::string render_timeline(std::span<const double> scores, std::span<const std::uint8_t> labels,
                            const PlotOptions& options = {});

}  // namespace nnc::cli
