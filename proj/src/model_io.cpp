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

#include <cstdio>
#include <fstream>
#include <sstream>

#include "nnc/binary_io.hpp"
#include "nnc/detect.hpp"
#include "nnc/error.hpp"

namespace nnc::detect {

namespace {

constexpr std::uint32_t kFlagNormalizeDirection = 1u << 0;
constexpr std::uint32_t kFlagNormalizeAppearance = 1u << 1;
constexpr int kAppearanceShift = 8;

}  // namespace

// NNCM layout (all little-endian):
//   "NNCM" u32 version
//   u32 gradient_dim, location_dim, direction_dim, appearance_dim
//   u32 flags (bit 0/1: direction/appearance normalization, bits 8..15: appearance source)
//   f32 tau_static, u32 k, u32 min_cluster_size
//   u32 r, then r x { u32 m, f32 rho, f32[m] w }
void save_model(const NormalityModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write model " + path.string());
  const auto& c = model.config;
  io::write_magic(out, "NNCM");
  io::write_u32(out, NormalityModel::kFormatVersion);
  io::write_u32(out, c.gradient_dim);
  io::write_u32(out, c.location_dim);
  io::write_u32(out, c.direction_dim);
  io::write_u32(out, c.appearance_dim);
  std::uint32_t flags = 0;
  if (c.normalize_direction) flags |= kFlagNormalizeDirection;
  if (c.normalize_appearance) flags |= kFlagNormalizeAppearance;
  flags |= static_cast<std::uint32_t>(c.appearance) << kAppearanceShift;
  io::write_u32(out, flags);
  io::write_f32(out, c.tau_static);
  io::write_u32(out, c.k);
  io::write_u32(out, c.min_cluster_size);
  io::write_u32(out, static_cast<std::uint32_t>(model.models.size()));
  for (const auto& m : model.models) {
    io::write_u32(out, static_cast<std::uint32_t>(m.w.size()));
    io::write_f32(out, m.rho);
    io::write_f32_span(out, m.w);
  }
  if (!out) throw InputError("write failed for " + path.string());
}

NormalityModel load_model(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw InputError("missing model file: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open model " + path.string());
  const std::string what = "model " + path.string();
  const auto magic = io::read_magic(in, what);
  if (std::string(magic.data(), 4) != "NNCM") throw FormatError(what + ": bad magic (expected NNCM)");
  const auto version = io::read_u32(in, what);
  if (version != NormalityModel::kFormatVersion) {
    throw FormatError(what + ": unsupported model format version " + std::to_string(version) +
                      " (this build reads version " + std::to_string(NormalityModel::kFormatVersion) + ")");
  }
  NormalityModel model;
  auto& c = model.config;
  c.gradient_dim = io::read_u32(in, what);
  c.location_dim = io::read_u32(in, what);
  c.direction_dim = io::read_u32(in, what);
  c.appearance_dim = io::read_u32(in, what);
  const auto flags = io::read_u32(in, what);
  c.normalize_direction = (flags & kFlagNormalizeDirection) != 0;
  c.normalize_appearance = (flags & kFlagNormalizeAppearance) != 0;
  const auto source = (flags >> kAppearanceShift) & 0xFFu;
  if (source > static_cast<std::uint32_t>(AppearanceSource::kFile)) {
    throw FormatError(what + ": unknown appearance source " + std::to_string(source));
  }
  c.appearance = static_cast<AppearanceSource>(source);
  c.tau_static = io::read_f32(in, what);
  c.k = io::read_u32(in, what);
  c.min_cluster_size = io::read_u32(in, what);
  const auto r = io::read_u32(in, what);
  if (r == 0) throw FormatError(what + ": model holds no cluster scorers");
  for (std::uint32_t j = 0; j < r; ++j) {
    LinearScorer s;
    const auto m = io::read_u32(in, what);
    if (m != c.feature_dim()) {
      throw FormatError(what + ": scorer " + std::to_string(j) + " has dimension " + std::to_string(m) +
                        ", expected " + std::to_string(c.feature_dim()));
    }
    s.rho = io::read_f32(in, what);
    s.w.resize(m);
    io::read_f32_span(in, s.w, what);
    model.models.push_back(std::move(s));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError(what + ": trailing bytes after model");
  return model;
}

void write_scores_csv(const FrameScoreSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "frame_index,raw,smoothed,normalized\n";
  char buf[128];
  for (std::size_t i = 0; i < series.raw.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", i, series.raw[i], series.smoothed[i],
                  series.normalized[i]);
    out << buf;
  }
  if (!out) throw InputError("write failed for " + path.string());
}

FrameScoreSeries read_scores_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open score file " + path.string());
  FrameScoreSeries s;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("frame_index", 0) == 0) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<double> values;
    while (std::getline(row, field, ',')) {
      try {
        values.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw FormatError(path.string() + ":" + std::to_string(lineno) + ": bad number '" + field + "'");
      }
    }
    if (values.size() != 4) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected 4 columns");
    }
    if (static_cast<std::size_t>(values[0]) != s.raw.size()) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": frame indices must be consecutive");
    }
    s.raw.push_back(values[1]);
    s.smoothed.push_back(values[2]);
    s.normalized.push_back(values[3]);
  }
  return s;
}

void write_maps(std::span<const AnomalyMap> maps, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  io::write_magic(out, "NNCG");
  io::write_u32(out, 1);
  io::write_u32(out, AnomalyMap::kCols);
  io::write_u32(out, AnomalyMap::kRows);
  io::write_u32(out, static_cast<std::uint32_t>(maps.size()));
  std::vector<float> grid(AnomalyMap::kRows * AnomalyMap::kCols);
  for (const auto& m : maps) {
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = static_cast<float>(m.grid[i]);
    io::write_f32_span(out, grid);
  }
  if (!out) throw InputError("write failed for " + path.string());
}

std::vector<AnomalyMap> read_maps(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw InputError("missing map file: " + path.string());
  std::ifstream in(path, std::ios::binary);
  const std::string what = "map file " + path.string();
  const auto magic = io::read_magic(in, what);
  if (std::string(magic.data(), 4) != "NNCG") throw FormatError(what + ": bad magic (expected NNCG)");
  if (io::read_u32(in, what) != 1) throw FormatError(what + ": unsupported version");
  const auto cols = io::read_u32(in, what);
  const auto rows = io::read_u32(in, what);
  if (cols != AnomalyMap::kCols || rows != AnomalyMap::kRows) throw FormatError(what + ": grid must be 16x12");
  const auto n = io::read_u32(in, what);
  std::vector<AnomalyMap> maps(n);
  std::vector<float> grid(rows * cols);
  for (std::uint32_t f = 0; f < n; ++f) {
    io::read_f32_span(in, grid, what);
    maps[f].frame_index = static_cast<int>(f);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      maps[f].grid[i] = grid[i];
      maps[f].active[i] = 1;
    }
  }
  return maps;
}

}  // namespace nnc::detect
