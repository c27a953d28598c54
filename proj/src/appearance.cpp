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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "nnc/augment.hpp"
#include "nnc/binary_io.hpp"
#include "nnc/error.hpp"

namespace nnc::augment {

namespace {

constexpr int kScales = 4;
constexpr int kOrientations = 16;
constexpr int kQuadrants = 4;
constexpr int kBlurRadius[kScales] = {0, 1, 2, 4};
static_assert(kScales * kOrientations * kQuadrants == kAppearanceChannels);

// Separable box blur with edge clamping.
std::vector<double> box_blur(const std::vector<double>& src, int w, int h, int radius) {
  if (radius == 0) return src;
  std::vector<double> tmp(src.size()), dst(src.size());
  const double norm = 1.0 / (2 * radius + 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0;
      for (int k = -radius; k <= radius; ++k) s += src[y * w + std::clamp(x + k, 0, w - 1)];
      tmp[y * w + x] = s * norm;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0;
      for (int k = -radius; k <= radius; ++k) s += tmp[std::clamp(y + k, 0, h - 1) * w + x];
      dst[y * w + x] = s * norm;
    }
  }
  return dst;
}

}  // namespace

ActivationMaps handcrafted_appearance(const GrayFrame& frame) {
  constexpr int w = cubes::kFrameWidth;
  constexpr int h = cubes::kFrameHeight;
  if (frame.width != w || frame.height != h) {
    throw InputError("handcrafted appearance needs a 160x120 frame");
  }
  ActivationMaps out(cubes::kGridRows, cubes::kGridCols, kAppearanceChannels);
  std::vector<double> base(frame.pixels.begin(), frame.pixels.end());
  constexpr int half = cubes::kPatchSize / 2;
  const double bin_width = 2 * std::numbers::pi / kOrientations;

  for (int s = 0; s < kScales; ++s) {
    const auto img = box_blur(base, w, h, kBlurRadius[s]);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double gx = (img[y * w + std::min(x + 1, w - 1)] - img[y * w + std::max(x - 1, 0)]) / 2;
        const double gy = (img[std::min(y + 1, h - 1) * w + x] - img[std::max(y - 1, 0) * w + x]) / 2;
        const double mag = std::hypot(gx, gy);
        if (mag == 0) continue;
        double angle = std::atan2(gy, gx);
        if (angle < 0) angle += 2 * std::numbers::pi;
        // Axis-aligned and diagonal gradients sit exactly on bin edges;
        // snap them so blur rounding cannot flip their bin.
        double pos = angle / bin_width;
        if (std::abs(pos - std::round(pos)) < 1e-7) pos = std::round(pos);
        const int orient = static_cast<int>(pos) % kOrientations;
        const int cy = y / cubes::kPatchSize;
        const int cx = x / cubes::kPatchSize;
        const int quadrant = ((y % cubes::kPatchSize) / half) * 2 + (x % cubes::kPatchSize) / half;
        const int channel = (s * kOrientations + orient) * kQuadrants + quadrant;
        out.cell(cy, cx)[channel] += static_cast<float>(mag);
      }
    }
  }
  return out;
}

ActivationMaps ZeroAppearanceProvider::provide(int) const {
  return ActivationMaps(cubes::kGridRows, cubes::kGridCols, kAppearanceChannels);
}

HandcraftedAppearanceProvider::HandcraftedAppearanceProvider(const FrameSequence& working_frames)
    : frames_(&working_frames) {}

bool HandcraftedAppearanceProvider::covers(int frame_index) const {
  return frame_index >= 0 && static_cast<std::size_t>(frame_index) < frames_->size();
}

ActivationMaps HandcraftedAppearanceProvider::provide(int frame_index) const {
  if (!covers(frame_index)) {
    throw InputError("handcrafted provider has no frame " + std::to_string(frame_index));
  }
  return handcrafted_appearance(frames_->frames[frame_index]);
}

namespace {
constexpr std::uintmax_t kNncfHeaderBytes = 24;
}

FileAppearanceProvider::FileAppearanceProvider(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) throw InputError("missing feature file: " + path_.string());
  const auto size = io::file_size_checked(path_);
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw InputError("cannot open " + path_.string());
  const std::string what = "NNCF header in " + path_.string();
  const auto magic = io::read_magic(in, what);
  if (std::string(magic.data(), 4) != "NNCF") throw FormatError(path_.string() + ": bad magic (expected NNCF)");
  const auto version = io::read_u32(in, what);
  if (version != 1) {
    throw FormatError(path_.string() + ": unsupported NNCF version " + std::to_string(version));
  }
  n_frames_ = static_cast<int>(io::read_u32(in, what));
  rows_ = static_cast<int>(io::read_u32(in, what));
  cols_ = static_cast<int>(io::read_u32(in, what));
  channels_ = static_cast<int>(io::read_u32(in, what));
  const bool raw_conv = rows_ == 13 && cols_ == 13;
  const bool grid = rows_ == cubes::kGridRows && cols_ == cubes::kGridCols;
  if (!(raw_conv || grid) || channels_ != kAppearanceChannels) {
    throw FormatError(path_.string() + ": NNCF dims " + std::to_string(rows_) + "x" +
                      std::to_string(cols_) + "x" + std::to_string(channels_) +
                      " (expected 13x13x256 or 12x16x256)");
  }
  const std::uintmax_t expected =
      kNncfHeaderBytes + static_cast<std::uintmax_t>(n_frames_) * rows_ * cols_ * channels_ * 4;
  if (size != expected) {
    throw FormatError(path_.string() + ": expected " + std::to_string(expected) + " bytes, got " +
                      std::to_string(size));
  }
}

bool FileAppearanceProvider::covers(int frame_index) const {
  return frame_index >= 0 && frame_index < n_frames_;
}

ActivationMaps FileAppearanceProvider::read_raw(int frame_index) const {
  if (!covers(frame_index)) {
    throw InputError(path_.string() + ": frame " + std::to_string(frame_index) + " out of range [0," +
                     std::to_string(n_frames_) + ")");
  }
  ActivationMaps maps(rows_, cols_, channels_);
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw InputError("cannot open " + path_.string());
  in.seekg(static_cast<std::streamoff>(kNncfHeaderBytes + static_cast<std::uintmax_t>(frame_index) *
                                                             maps.values.size() * 4));
  io::read_f32_span(in, maps.values, "NNCF frame " + std::to_string(frame_index));
  return maps;
}

ActivationMaps FileAppearanceProvider::provide(int frame_index) const {
  auto maps = read_raw(frame_index);
  if (maps.rows == 13) return resize_activation_maps(maps);
  return maps;
}

std::unique_ptr<AppearanceProvider> file_appearance_provider(const std::filesystem::path& path) {
  return std::make_unique<FileAppearanceProvider>(path);
}

void write_nncf(const std::filesystem::path& path, std::span<const ActivationMaps> frames) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  const int rows = frames.empty() ? 13 : frames.front().rows;
  const int cols = frames.empty() ? 13 : frames.front().cols;
  const int channels = frames.empty() ? kAppearanceChannels : frames.front().channels;
  io::write_magic(out, "NNCF");
  io::write_u32(out, 1);
  io::write_u32(out, static_cast<std::uint32_t>(frames.size()));
  io::write_u32(out, static_cast<std::uint32_t>(rows));
  io::write_u32(out, static_cast<std::uint32_t>(cols));
  io::write_u32(out, static_cast<std::uint32_t>(channels));
  for (const auto& f : frames) {
    if (f.rows != rows || f.cols != cols || f.channels != channels) {
      throw InputError("write_nncf: all frames must share dimensions");
    }
    io::write_f32_span(out, f.values);
  }
  if (!out) throw InputError("write failed for " + path.string());
}

}  // namespace nnc::augment
