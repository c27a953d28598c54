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

#include "nnc/ingest.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nnc/binary_io.hpp"
#include "nnc/error.hpp"

namespace nnc {

namespace fs = std::filesystem;

GrayFrame::GrayFrame(int w, int h, int idx, float fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill), index(idx) {}

void FrameSequence::validate() const {
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    if (f.width != width() || f.height != height()) {
      throw InputError("inconsistent frame dimensions at frame " + std::to_string(i) + ": " +
                       std::to_string(f.width) + "x" + std::to_string(f.height) + " vs " +
                       std::to_string(width()) + "x" + std::to_string(height()));
    }
    if (f.index != static_cast<int>(i)) {
      throw InputError("frame indices must run 0..n-1, got " + std::to_string(f.index) +
                       " at position " + std::to_string(i));
    }
    if (f.pixels.size() != static_cast<std::size_t>(f.width) * f.height) {
      throw InputError("frame " + std::to_string(i) + " pixel buffer has wrong size");
    }
    for (float v : f.pixels) {
      if (!(v >= 0.0f && v <= 1.0f)) {
        throw InputError("frame " + std::to_string(i) + " has intensity outside [0,1]");
      }
    }
  }
}

FrameFormat parse_frame_format(const std::string& name) {
  if (name == "pgm-dir") return FrameFormat::kPgmDir;
  if (name == "png-dir") return FrameFormat::kPngDir;
  if (name == "raw-gray") return FrameFormat::kRawGray;
  throw InputError("unknown frame format '" + name + "' (expected pgm-dir, png-dir or raw-gray)");
}

float luma(unsigned char r, unsigned char g, unsigned char b) {
  return static_cast<float>((0.299 * r + 0.587 * g + 0.114 * b) / 255.0);
}

namespace {

std::string next_pnm_token(std::istream& in) {
  std::string token;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string skip;
      std::getline(in, skip);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) return token;
      continue;
    }
    token.push_back(c);
  }
  return token;
}

std::vector<fs::path> sorted_files(const fs::path& dir, const std::string& ext) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto e = entry.path().extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
    if (e == ext) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  return files;
}

}  // namespace

GrayFrame load_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  if (next_pnm_token(in) != "P5") throw FormatError(path.string() + ": not a binary P5 PGM");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(next_pnm_token(in));
    h = std::stoi(next_pnm_token(in));
    maxval = std::stoi(next_pnm_token(in));
  } catch (const std::exception&) {
    throw FormatError(path.string() + ": malformed PGM header");
  }
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) {
    throw FormatError(path.string() + ": unsupported PGM header (need 8-bit, positive size)");
  }
  std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw FormatError(path.string() + ": truncated PGM pixel data");
  }
  GrayFrame f(w, h);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    f.pixels[i] = static_cast<float>(raw[i]) / static_cast<float>(maxval);
  }
  return f;
}

void save_pgm(const GrayFrame& frame, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
  std::vector<unsigned char> raw(frame.pixels.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = static_cast<unsigned char>(std::lround(std::clamp(frame.pixels[i], 0.0f, 1.0f) * 255.0f));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

GrayFrame load_png_gray(const fs::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw InputError(path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<unsigned char> rgb(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgb.data(), 0, nullptr)) {
    png_image_free(&image);
    throw InputError(path.string() + ": " + image.message);
  }
  GrayFrame f(static_cast<int>(image.width), static_cast<int>(image.height));
  for (std::size_t i = 0; i < f.pixels.size(); ++i) {
    f.pixels[i] = luma(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
  }
  return f;
}

void save_raw_gray(const FrameSequence& seq, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  io::write_magic(out, "NNCV");
  io::write_u32(out, static_cast<std::uint32_t>(seq.width()));
  io::write_u32(out, static_cast<std::uint32_t>(seq.height()));
  io::write_u32(out, static_cast<std::uint32_t>(seq.size()));
  std::vector<unsigned char> raw;
  for (const auto& f : seq.frames) {
    raw.resize(f.pixels.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      raw[i] = static_cast<unsigned char>(std::lround(std::clamp(f.pixels[i], 0.0f, 1.0f) * 255.0f));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  }
  if (!out) throw InputError("write failed for " + path.string());
}

FrameSequence load_raw_gray(const fs::path& path) {
  if (!fs::exists(path)) throw InputError("missing path: " + path.string());
  const auto size = io::file_size_checked(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  const std::string what = "raw-gray header in " + path.string();
  const auto magic = io::read_magic(in, what);
  if (std::string(magic.data(), 4) != "NNCV") {
    throw FormatError(path.string() + ": bad magic (expected NNCV)");
  }
  const auto w = io::read_u32(in, what);
  const auto h = io::read_u32(in, what);
  const auto n = io::read_u32(in, what);
  const std::uintmax_t expected = 16 + static_cast<std::uintmax_t>(w) * h * n;
  if (size != expected) {
    throw FormatError(path.string() + ": expected " + std::to_string(expected) + " bytes, got " +
                      std::to_string(size));
  }
  FrameSequence seq;
  seq.frames.reserve(n);
  std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h);
  for (std::uint32_t t = 0; t < n; ++t) {
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    GrayFrame f(static_cast<int>(w), static_cast<int>(h), static_cast<int>(t));
    for (std::size_t i = 0; i < raw.size(); ++i) f.pixels[i] = static_cast<float>(raw[i]) / 255.0f;
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

FrameSequence load_sequence(const fs::path& path, FrameFormat format) {
  if (!fs::exists(path)) throw InputError("missing path: " + path.string());
  if (format == FrameFormat::kRawGray) return load_raw_gray(path);
  if (!fs::is_directory(path)) throw InputError(path.string() + " is not a directory");

  const auto files = sorted_files(path, format == FrameFormat::kPgmDir ? ".pgm" : ".png");
  if (files.empty()) throw InputError("no frames found in " + path.string());
  FrameSequence seq;
  seq.frames.resize(files.size());
  std::string error;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < files.size(); ++i) {
    try {
      seq.frames[i] = format == FrameFormat::kPgmDir ? load_pgm(files[i]) : load_png_gray(files[i]);
      seq.frames[i].index = static_cast<int>(i);
    } catch (const std::exception& e) {
#pragma omp critical(nnc_load_error)
      if (error.empty()) error = e.what();
    }
  }
  if (!error.empty()) throw InputError(error);
  for (std::size_t i = 1; i < files.size(); ++i) {
    if (seq.frames[i].width != seq.frames[0].width || seq.frames[i].height != seq.frames[0].height) {
      throw InputError("inconsistent frame dimensions in " + files[i].string());
    }
  }
  return seq;
}

namespace {

double cubic_weight(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

}  // namespace

std::vector<float> resize_plane(std::span<const float> src, int src_w, int src_h, int dst_w,
                                int dst_h, Interpolation method) {
  if (dst_w < 1 || dst_h < 1) throw InputError("resize target must be at least 1x1");
  if (src_w < 1 || src_h < 1 || src.size() != static_cast<std::size_t>(src_w) * src_h) {
    throw InputError("resize source has inconsistent dimensions");
  }
  std::vector<float> dst(static_cast<std::size_t>(dst_w) * dst_h);
  const double sx_scale = static_cast<double>(src_w) / dst_w;
  const double sy_scale = static_cast<double>(src_h) / dst_h;
  auto px = [&](int x, int y) {
    x = std::clamp(x, 0, src_w - 1);
    y = std::clamp(y, 0, src_h - 1);
    return static_cast<double>(src[static_cast<std::size_t>(y) * src_w + x]);
  };

  if (method == Interpolation::kBilinear) {
    for (int y = 0; y < dst_h; ++y) {
      const double sy = std::clamp((y + 0.5) * sy_scale - 0.5, 0.0, static_cast<double>(src_h - 1));
      const int y0 = static_cast<int>(std::floor(sy));
      const double fy = sy - y0;
      for (int x = 0; x < dst_w; ++x) {
        const double sx = std::clamp((x + 0.5) * sx_scale - 0.5, 0.0, static_cast<double>(src_w - 1));
        const int x0 = static_cast<int>(std::floor(sx));
        const double fx = sx - x0;
        double v = (1 - fy) * ((1 - fx) * px(x0, y0) + (fx > 0 ? fx * px(x0 + 1, y0) : 0.0));
        if (fy > 0) v += fy * ((1 - fx) * px(x0, y0 + 1) + (fx > 0 ? fx * px(x0 + 1, y0 + 1) : 0.0));
        dst[static_cast<std::size_t>(y) * dst_w + x] = static_cast<float>(v);
      }
    }
    return dst;
  }

  for (int y = 0; y < dst_h; ++y) {
    const double sy = (y + 0.5) * sy_scale - 0.5;
    const int y0 = static_cast<int>(std::floor(sy));
    double wy[4];
    for (int k = 0; k < 4; ++k) wy[k] = cubic_weight(sy - (y0 - 1 + k));
    for (int x = 0; x < dst_w; ++x) {
      const double sx = (x + 0.5) * sx_scale - 0.5;
      const int x0 = static_cast<int>(std::floor(sx));
      double wx[4];
      for (int k = 0; k < 4; ++k) wx[k] = cubic_weight(sx - (x0 - 1 + k));
      double v = 0.0;
      for (int j = 0; j < 4; ++j) {
        double row = 0.0;
        for (int i = 0; i < 4; ++i) row += wx[i] * px(x0 - 1 + i, y0 - 1 + j);
        v += wy[j] * row;
      }
      dst[static_cast<std::size_t>(y) * dst_w + x] = static_cast<float>(v);
    }
  }
  return dst;
}

GrayFrame resize_frame(const GrayFrame& frame, int width, int height, Interpolation method) {
  GrayFrame out;
  out.width = width;
  out.height = height;
  out.index = frame.index;
  if (width == frame.width && height == frame.height && method == Interpolation::kBilinear) {
    out.pixels = frame.pixels;
    return out;
  }
  out.pixels = resize_plane(frame.pixels, frame.width, frame.height, width, height, method);
  for (float& v : out.pixels) v = std::clamp(v, 0.0f, 1.0f);
  return out;
}

FrameSequence resize_sequence(const FrameSequence& seq, int width, int height,
                              Interpolation method) {
  FrameSequence out;
  out.source_fps = seq.source_fps;
  out.frames.resize(seq.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < seq.size(); ++i) {
    out.frames[i] = resize_frame(seq.frames[i], width, height, method);
  }
  return out;
}

}  // namespace nnc
