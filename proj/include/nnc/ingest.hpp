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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nnc {

// One grayscale frame, row-major intensities in [0, 1].
struct GrayFrame {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;
  int index = 0;

  GrayFrame() = default;
  GrayFrame(int w, int h, int idx = 0, float fill = 0.0f);

  float at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  float& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

struct FrameSequence {
  std::vector<GrayFrame> frames;
  std::optional<double> source_fps;

  std::size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }
  int width() const { return frames.empty() ? 0 : frames.front().width; }
  int height() const { return frames.empty() ? 0 : frames.front().height; }

  // Throws InputError unless all frames share dimensions, indices run 0..n-1
  // and every intensity lies in [0, 1].
  void validate() const;
};

enum class FrameFormat { kPgmDir, kPngDir, kRawGray };
enum class Interpolation { kBilinear, kBicubic };

FrameFormat parse_frame_format(const std::string& name);

// Frames come in lexicographic filename order for directory formats and in
// stream order for raw-gray. 8-bit samples are mapped to [0,1] by /255.
FrameSequence load_sequence(const std::filesystem::path& path, FrameFormat format);

// Raw-gray container: "NNCV", u32 LE width, height, frame count, then
// width*height bytes per frame. Intensities are quantized by round(v*255).
void save_raw_gray(const FrameSequence& seq, const std::filesystem::path& path);
FrameSequence load_raw_gray(const std::filesystem::path& path);

GrayFrame load_pgm(const std::filesystem::path& path);
void save_pgm(const GrayFrame& frame, const std::filesystem::path& path);
GrayFrame load_png_gray(const std::filesystem::path& path);

// Generic single-channel resize with pixel-center (align-corners=false)
// sampling. Bilinear clamps the source coordinate to the image; bicubic uses
// the Keys kernel (a = -0.5) with edge-replicated taps and may overshoot.
std::vector<float> resize_plane(std::span<const float> src, int src_w, int src_h, int dst_w,
                                int dst_h, Interpolation method);

// Resize with the output clamped to [0, 1].
GrayFrame resize_frame(const GrayFrame& frame, int width, int height, Interpolation method);

FrameSequence resize_sequence(const FrameSequence& seq, int width, int height,
                              Interpolation method);

// Luma for 8-bit RGB: 0.299 R + 0.587 G + 0.114 B, scaled to [0,1].
float luma(unsigned char r, unsigned char g, unsigned char b);

}  // namespace nnc
