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

#include "nnc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "nnc/error.hpp"

namespace nnc::eval {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_classes(std::size_t positives, std::size_t negatives) {
  if (positives == 0 || negatives == 0) {
    throw InputError("AUC undefined: labels contain a single class (" + std::to_string(positives) +
                     " positive, " + std::to_string(negatives) + " negative)");
  }
}

long reflect_index(long i, long n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return i;
}

// Distinct values in descending order, evenly subsampled to at most `limit`
// entries (first and last always kept).
std::vector<double> sweep_thresholds(const PixelMaps& maps, int limit) {
  std::vector<float> all;
  std::size_t total = 0;
  for (const auto& f : maps.frames) total += f.size();
  all.reserve(total);
  for (const auto& f : maps.frames) all.insert(all.end(), f.begin(), f.end());
  std::sort(all.begin(), all.end(), std::greater<>());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<double> out;
  if (limit > 0 && all.size() > static_cast<std::size_t>(limit)) {
    const std::size_t m = static_cast<std::size_t>(limit);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t idx = m == 1 ? all.size() - 1 : (i * (all.size() - 1)) / (m - 1);
      out.push_back(all[idx]);
    }
  } else {
    out.assign(all.begin(), all.end());
  }
  return out;
}

void check_pixel_inputs(const PixelMaps& maps, const GroundTruth& truth) {
  if (!truth.has_masks()) throw InputError("pixel-level AUC needs ground-truth masks");
  if (maps.frames.size() != truth.frame_labels.size() || truth.pixel_masks.size() != maps.frames.size()) {
    throw InputError("pixel-level AUC: " + std::to_string(maps.frames.size()) + " maps vs " +
                     std::to_string(truth.pixel_masks.size()) + " masks");
  }
  if (maps.width != truth.mask_width || maps.height != truth.mask_height) {
    throw InputError("pixel-level AUC: map size " + std::to_string(maps.width) + "x" +
                     std::to_string(maps.height) + " differs from mask size " +
                     std::to_string(truth.mask_width) + "x" + std::to_string(truth.mask_height));
  }
  for (std::size_t f = 0; f < maps.frames.size(); ++f) {
    if (maps.frames[f].size() != truth.pixel_masks[f].size()) {
      throw InputError("pixel-level AUC: frame " + std::to_string(f) + " map/mask shape mismatch");
    }
  }
}

RocResult roc_from_counts(const std::vector<double>& thresholds,
                          const std::vector<std::size_t>& tp, const std::vector<std::size_t>& fp,
                          std::size_t positives, std::size_t negatives) {
  RocResult roc;
  roc.thresholds.push_back(kInf);
  roc.tpr.push_back(0.0);
  roc.fpr.push_back(0.0);
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    roc.thresholds.push_back(thresholds[t]);
    roc.tpr.push_back(static_cast<double>(tp[t]) / positives);
    roc.fpr.push_back(static_cast<double>(fp[t]) / negatives);
  }
  roc.auc = trapezoid_auc(roc.fpr, roc.tpr);
  return roc;
}

}  // namespace

double trapezoid_auc(std::span<const double> fpr, std::span<const double> tpr) {
  double area = 0.0;
  for (std::size_t i = 1; i < fpr.size(); ++i) area += (fpr[i] - fpr[i - 1]) * (tpr[i] + tpr[i - 1]) / 2.0;
  return area;
}

RocResult frame_level_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw InputError("frame-level AUC: " + std::to_string(scores.size()) + " scores vs " +
                     std::to_string(labels.size()) + " labels");
  }
  std::size_t positives = 0;
  for (auto l : labels) positives += l != 0;
  const std::size_t negatives = labels.size() - positives;
  check_classes(positives, negatives);
  for (double s : scores) {
    if (std::isnan(s)) throw InputError("frame-level AUC: NaN score");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<double> thresholds;
  std::vector<std::size_t> tp, fp;
  std::size_t cur_tp = 0, cur_fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      if (labels[order[i]]) ++cur_tp; else ++cur_fp;
      ++i;
    }
    thresholds.push_back(s);
    tp.push_back(cur_tp);
    fp.push_back(cur_fp);
  }
  return roc_from_counts(thresholds, tp, fp, positives, negatives);
}

PixelMaps pixel_maps_from_grids(std::span<const detect::AnomalyMap> maps, int width, int height) {
  PixelMaps out;
  out.width = width;
  out.height = height;
  out.frames.resize(maps.size());
  const long n = static_cast<long>(maps.size());
#pragma omp parallel for schedule(static)
  for (long f = 0; f < n; ++f) out.frames[f] = detect::upsample_map(maps[f], width, height);
  return out;
}

std::vector<float> gaussian_blur(std::span<const float> image, int width, int height, double sigma) {
  std::vector<float> out(image.begin(), image.end());
  if (sigma <= 0.0) return out;
  const long radius = static_cast<long>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (long k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-static_cast<double>(k * k) / (2.0 * sigma * sigma));
    sum += kernel[k + radius];
  }
  for (double& v : kernel) v /= sum;

  std::vector<double> tmp(image.size());
  for (long y = 0; y < height; ++y) {
    for (long x = 0; x < width; ++x) {
      double acc = 0.0;
      for (long k = -radius; k <= radius; ++k) acc += kernel[k + radius] * image[y * width + reflect_index(x + k, width)];
      tmp[y * width + x] = acc;
    }
  }
  for (long y = 0; y < height; ++y) {
    for (long x = 0; x < width; ++x) {
      double acc = 0.0;
      for (long k = -radius; k <= radius; ++k) acc += kernel[k + radius] * tmp[reflect_index(y + k, height) * width + x];
      out[y * width + x] = static_cast<float>(acc);
    }
  }
  return out;
}

PixelMaps smooth_pixel_maps(const PixelMaps& maps, double sigma) {
  if (sigma < 0) throw InputError("sigma_s must be >= 0");
  PixelMaps out;
  out.width = maps.width;
  out.height = maps.height;
  out.frames.resize(maps.frames.size());
  const long n = static_cast<long>(maps.frames.size());
#pragma omp parallel for schedule(dynamic)
  for (long f = 0; f < n; ++f) out.frames[f] = gaussian_blur(maps.frames[f], maps.width, maps.height, sigma);
  return out;
}

double detection_threshold(std::span<const float> map, std::span<const std::uint8_t> mask, bool positive) {
  if (!positive) return *std::max_element(map.begin(), map.end());
  std::vector<float> inside;
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (mask[i]) inside.push_back(map[i]);
  }
  if (inside.empty()) return -kInf;
  // Need count(>= t) > 0.4 M, i.e. count >= floor(4M / 10) + 1.
  const std::size_t needed = (4 * inside.size()) / 10 + 1;
  std::nth_element(inside.begin(), inside.begin() + (needed - 1), inside.end(), std::greater<>());
  return inside[needed - 1];
}

RocResult pixel_level_auc(const PixelMaps& maps, const GroundTruth& truth, int max_thresholds) {
  check_pixel_inputs(maps, truth);
  const long n = static_cast<long>(maps.frames.size());
  std::vector<double> critical(maps.frames.size());
#pragma omp parallel for schedule(dynamic)
  for (long f = 0; f < n; ++f) {
    critical[f] = detection_threshold(maps.frames[f], truth.pixel_masks[f], truth.frame_labels[f] != 0);
  }
  std::vector<double> pos, neg;
  for (long f = 0; f < n; ++f) (truth.frame_labels[f] ? pos : neg).push_back(critical[f]);
  check_classes(pos.size(), neg.size());
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());

  const auto thresholds = sweep_thresholds(maps, max_thresholds);
  std::vector<std::size_t> tp(thresholds.size()), fp(thresholds.size());
  auto count_at_least = [](const std::vector<double>& sorted, double t) {
    return static_cast<std::size_t>(sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), t));
  };
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    tp[t] = count_at_least(pos, thresholds[t]);
    fp[t] = count_at_least(neg, thresholds[t]);
  }
  return roc_from_counts(thresholds, tp, fp, pos.size(), neg.size());
}

namespace serial {

RocResult pixel_level_auc(const PixelMaps& maps, const GroundTruth& truth, int max_thresholds) {
  check_pixel_inputs(maps, truth);
  std::size_t positives = 0;
  for (auto l : truth.frame_labels) positives += l != 0;
  const std::size_t negatives = truth.frame_labels.size() - positives;
  check_classes(positives, negatives);
  const auto thresholds = sweep_thresholds(maps, max_thresholds);
  std::vector<std::size_t> tp(thresholds.size(), 0), fp(thresholds.size(), 0);
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    const double theta = thresholds[t];
    for (std::size_t f = 0; f < maps.frames.size(); ++f) {
      const auto& map = maps.frames[f];
      const auto& mask = truth.pixel_masks[f];
      if (truth.frame_labels[f]) {
        std::size_t hit = 0, total = 0;
        for (std::size_t i = 0; i < map.size(); ++i) {
          if (!mask[i]) continue;
          ++total;
          if (map[i] >= theta) ++hit;
        }
        if (10 * hit > 4 * total) ++tp[t];
      } else {
        bool any = false;
        for (float v : map) any = any || v >= theta;
        if (any) ++fp[t];
      }
    }
  }
  return roc_from_counts(thresholds, tp, fp, positives, negatives);
}

}  // namespace serial

std::vector<std::uint8_t> parse_label_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> fields;
    std::istringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) {
      const auto b = field.find_first_not_of(" \t");
      const auto e = field.find_last_not_of(" \t");
      fields.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
    }
    rows.push_back(std::move(fields));
  }
  if (!rows.empty() && !rows.front().empty() && rows.front().front() == "frame_index") rows.erase(rows.begin());
  if (rows.empty()) throw FormatError("label CSV is empty");

  auto parse_label = [](const std::string& s, std::size_t where) -> std::uint8_t {
    if (s == "0") return 0;
    if (s == "1") return 1;
    throw FormatError("label CSV: entry " + std::to_string(where) + " is '" + s + "', expected 0 or 1");
  };

  std::vector<std::uint8_t> labels;
  if (rows.size() == 1 && rows.front().size() != 2) {
    for (std::size_t i = 0; i < rows.front().size(); ++i) labels.push_back(parse_label(rows.front()[i], i));
    return labels;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 2) {
      throw FormatError("label CSV: line " + std::to_string(i + 1) + " needs frame_index,label");
    }
    std::size_t idx = 0;
    try {
      std::size_t pos = 0;
      idx = std::stoul(rows[i][0], &pos);
      if (pos != rows[i][0].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw FormatError("label CSV: bad frame index '" + rows[i][0] + "'");
    }
    if (idx != labels.size()) {
      throw FormatError("label CSV: frame indices must run 0..n-1, got " + std::to_string(idx) + " at line " +
                        std::to_string(i + 1));
    }
    labels.push_back(parse_label(rows[i][1], i));
  }
  return labels;
}

GroundTruth load_ground_truth(const std::optional<std::filesystem::path>& labels_csv,
                              const std::optional<std::filesystem::path>& masks,
                              std::optional<std::size_t> expected_frames) {
  if (!labels_csv && !masks) throw InputError("ground truth needs a label CSV and/or masks");
  GroundTruth truth;
  if (labels_csv) {
    std::ifstream in(*labels_csv);
    if (!in) throw InputError("cannot open label CSV " + labels_csv->string());
    std::stringstream buf;
    buf << in.rdbuf();
    truth.frame_labels = parse_label_csv(buf.str());
  }
  if (masks) {
    const auto format = std::filesystem::is_directory(*masks) ? FrameFormat::kPgmDir : FrameFormat::kRawGray;
    const auto seq = load_sequence(*masks, format);
    truth.mask_width = seq.width();
    truth.mask_height = seq.height();
    for (const auto& f : seq.frames) {
      std::vector<std::uint8_t> m(f.pixels.size());
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = f.pixels[i] > 0.0f ? 1 : 0;
      truth.pixel_masks.push_back(std::move(m));
    }
    if (!labels_csv) {
      for (const auto& m : truth.pixel_masks) {
        truth.frame_labels.push_back(std::any_of(m.begin(), m.end(), [](auto v) { return v != 0; }) ? 1 : 0);
      }
    }
  }
  if (expected_frames && truth.frame_labels.size() != *expected_frames) {
    throw InputError("ground truth covers " + std::to_string(truth.frame_labels.size()) + " frames, video has " +
                     std::to_string(*expected_frames));
  }
  truth.validate();
  return truth;
}

void write_ground_truth(const GroundTruth& truth, const std::filesystem::path& labels_csv,
                        const std::optional<std::filesystem::path>& masks_nncv) {
  std::ofstream out(labels_csv);
  if (!out) throw InputError("cannot write " + labels_csv.string());
  out << "frame_index,label\n";
  for (std::size_t i = 0; i < truth.frame_labels.size(); ++i) out << i << "," << int(truth.frame_labels[i]) << "\n";
  if (masks_nncv && truth.has_masks()) {
    FrameSequence seq;
    for (std::size_t t = 0; t < truth.pixel_masks.size(); ++t) {
      GrayFrame f(truth.mask_width, truth.mask_height, static_cast<int>(t));
      for (std::size_t i = 0; i < f.pixels.size(); ++i) f.pixels[i] = truth.pixel_masks[t][i] ? 1.0f : 0.0f;
      seq.frames.push_back(std::move(f));
    }
    save_raw_gray(seq, *masks_nncv);
  }
}

void write_report(const EvalReport& report, const std::filesystem::path& path, const RocResult* frame_roc,
                  const RocResult* pixel_roc) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  char buf[160];
  out << "metric,value\n";
  if (report.frame_auc) {
    std::snprintf(buf, sizeof(buf), "frame_auc,%.17g\n", *report.frame_auc);
    out << buf;
  }
  if (report.pixel_auc) {
    std::snprintf(buf, sizeof(buf), "pixel_auc,%.17g\n", *report.pixel_auc);
    out << buf;
  }
  auto dump = [&](const char* name, const RocResult* roc) {
    if (!roc) return;
    for (std::size_t i = 0; i < roc->thresholds.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g\n", name, roc->thresholds[i], roc->fpr[i], roc->tpr[i]);
      out << buf;
    }
  };
  if (frame_roc || pixel_roc) out << "curve,threshold,fpr,tpr\n";
  dump("frame", frame_roc);
  dump("pixel", pixel_roc);
}

}  // namespace nnc::eval
