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

#include <cstdint>
#include <optional>
#include <vector>

#include "nnc/ingest.hpp"

namespace nnc {

// A dark Gaussian blob that translates across the frame, wrapping toroidally.
struct ActorSpec {
  double size = 10.0;       // blob diameter in pixels (sigma = size / 4)
  double speed = 1.0;       // pixels per frame
  double direction = 0.0;   // degrees from +x, y pointing down
  // Vertical centre at frame 0; drawn from the seed when unset. Fixing it
  // keeps videos with different seeds on the same scene layout.
  std::optional<double> lane_y;
};

struct Region {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

// An anomalous blob present during [start_frame, end_frame). It starts
// centred in `region`, with diameter min(width, height), and moves like an
// actor.
struct AnomalySpec {
  int start_frame = 0;
  int end_frame = 0;
  Region region;
  double speed = 4.0;
  double direction = 0.0;
};

struct SynthSpec {
  int width = 160;
  int height = 120;
  int n_frames = 600;
  std::uint64_t seed = 42;
  std::vector<ActorSpec> normal_actors;
  std::vector<AnomalySpec> anomalies;

  // Throws InputError when an interval or region falls outside the video.
  void validate() const;
};

// Per-frame labels plus optional full-resolution binary masks (1 = anomalous).
struct GroundTruth {
  std::vector<std::uint8_t> frame_labels;
  std::vector<std::vector<std::uint8_t>> pixel_masks;
  int mask_width = 0;
  int mask_height = 0;

  bool has_masks() const { return !pixel_masks.empty(); }
  // Throws InputError unless a mask has anomalous pixels exactly when its
  // frame label is 1.
  void validate() const;
};

struct SynthVideo {
  FrameSequence frames;
  GroundTruth truth;
};

// Masks are left empty when the spec has no anomalies.
SynthVideo generate(const SynthSpec& spec);

// The standard benchmark: 160x120, 600 frames, four lanes of horizontal
// traffic and two anomaly bursts (a fast mover in a lane and a mover crossing
// the lanes vertically), seed 42.
SynthSpec benchmark_spec();

// Anomaly-free companion video on the same lanes (seed 43), used for
// training on the benchmark scene.
SynthSpec benchmark_training_spec();

}  // namespace nnc
