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

#include "nnc/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nnc/error.hpp"

namespace nnc::detect {

double LinearScorer::decision(std::span<const float> x) const {
  double s = 0.0;
  for (std::size_t d = 0; d < w.size(); ++d) s += static_cast<double>(w[d]) * x[d];
  return s - rho;
}

double AnomalyMap::max() const { return *std::max_element(grid.begin(), grid.end()); }

namespace {

augment::AugmentOptions augment_options(const FeatureConfig& fc) {
  return {fc.normalize_direction, fc.normalize_appearance};
}

augment::ActivationMaps appearance_for(const augment::AppearanceProvider& provider, int frame,
                                       MissingAppearance missing) {
  if (!provider.covers(frame)) {
    if (missing == MissingAppearance::kZeros) {
      return augment::ActivationMaps(cubes::kGridRows, cubes::kGridCols, augment::kAppearanceChannels);
    }
    throw InputError("appearance provider has no data for frame " + std::to_string(frame));
  }
  return provider.provide(frame);
}

// Runs body(i) for i in [0, n) under OpenMP, rethrowing the first failure.
template <typename Body>
void parallel_for_checked(long n, Body&& body) {
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(nnc_detect_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

std::vector<augment::FeatureVector> frame_features(const FrameSequence& working,
                                                   const augment::AppearanceProvider& provider,
                                                   double tau_static, const augment::AugmentOptions& opts,
                                                   int end_frame, MissingAppearance missing) {
  std::vector<augment::FeatureVector> out;
  const auto frame_cubes = cubes::extract_frame_cubes(working, end_frame, tau_static);
  if (std::none_of(frame_cubes.begin(), frame_cubes.end(), [](const auto& c) { return c.active; })) {
    return out;
  }
  const auto maps = appearance_for(provider, end_frame, missing);
  for (const auto& c : frame_cubes) {
    if (c.active) out.push_back(augment::augment_cube(c, maps, opts).features);
  }
  return out;
}

FeatureConfig feature_config_from(const RunConfig& cfg) {
  FeatureConfig fc;
  fc.normalize_direction = cfg.normalize_direction;
  fc.normalize_appearance = cfg.normalize_appearance;
  fc.appearance = cfg.appearance;
  fc.tau_static = static_cast<float>(cfg.tau_static);
  fc.min_cluster_size = static_cast<std::uint32_t>(cfg.min_cluster_size);
  return fc;
}

void check_model(const NormalityModel& model) {
  if (model.models.empty()) throw InputError("normality model has no cluster scorers");
  for (const auto& m : model.models) {
    if (m.w.size() != model.config.feature_dim()) {
      throw InputError("model scorer dimension " + std::to_string(m.w.size()) + " does not match feature dim " +
                       std::to_string(model.config.feature_dim()));
    }
  }
  if (model.config.feature_dim() != augment::kFeatureDim) {
    throw InputError("model feature dimension " + std::to_string(model.config.feature_dim()) +
                     " differs from the extractor's " + std::to_string(augment::kFeatureDim));
  }
}

void apply_floors_and_hold(std::vector<AnomalyMap>& computed, const std::vector<int>& ends, int n_frames,
                           const RunConfig& cfg, ScoreResult& result) {
  double video_min = std::numeric_limits<double>::infinity();
  for (const auto& m : computed) {
    for (int c = 0; c < AnomalyMap::kRows * AnomalyMap::kCols; ++c) {
      if (m.active[c]) video_min = std::min(video_min, m.grid[c]);
    }
  }
  if (!std::isfinite(video_min)) video_min = 0.0;
  for (auto& m : computed) {
    double frame_min = std::numeric_limits<double>::infinity();
    for (int c = 0; c < AnomalyMap::kRows * AnomalyMap::kCols; ++c) {
      if (m.active[c]) frame_min = std::min(frame_min, m.grid[c]);
    }
    const double floor = std::isfinite(frame_min) ? frame_min : video_min;
    for (int c = 0; c < AnomalyMap::kRows * AnomalyMap::kCols; ++c) {
      if (!m.active[c]) m.grid[c] = floor;
    }
  }

  result.maps.resize(static_cast<std::size_t>(n_frames));
  result.series.raw.resize(static_cast<std::size_t>(n_frames));
  std::size_t current = 0;
  for (int f = 0; f < n_frames; ++f) {
    while (current + 1 < ends.size() && ends[current + 1] <= f) ++current;
    result.maps[f] = computed[current];
    result.maps[f].frame_index = f;
    result.series.raw[f] = computed[current].max();
  }
  result.computed_frames = computed.size();
  result.series.smoothed = temporal_smooth(result.series.raw, cfg.sigma_t);
  result.series.normalized = normalize_scores(result.series.smoothed);
}

}  // namespace

FeatureMatrix collect_features(const FrameSequence& working, const augment::AppearanceProvider& provider,
                               const RunConfig& cfg, int temporal_stride, MissingAppearance missing) {
  cubes::check_working_sequence(working);
  const auto ends = cubes::cube_end_frames(static_cast<int>(working.size()), temporal_stride);
  const augment::AugmentOptions opts{cfg.normalize_direction, cfg.normalize_appearance};
  std::vector<std::vector<augment::FeatureVector>> per_frame(ends.size());
  parallel_for_checked(static_cast<long>(ends.size()), [&](long i) {
    per_frame[i] = frame_features(working, provider, cfg.tau_static, opts, ends[i], missing);
  });
  FeatureMatrix data;
  std::size_t total = 0;
  for (const auto& f : per_frame) total += f.size();
  data.values().reserve(total * augment::kFeatureDim);
  for (const auto& f : per_frame) {
    for (const auto& v : f) data.append_row(std::span<const float>(v));
  }
  return data;
}

TrainResult train(const FrameSequence& working, const augment::AppearanceProvider& provider,
                  const RunConfig& cfg) {
  cfg.validate();
  const FeatureMatrix data = collect_features(working, provider, cfg, cfg.train_stride, MissingAppearance::kFail);
  if (data.rows() == 0) throw PipelineError("every training cube is static; nothing to learn");

  TrainResult result;
  auto& report = result.report;
  report.n_cubes = data.rows();
  int k = cfg.k > 0 ? cfg.k : cluster::choose_k(data.rows(), cfg.samples_per_cluster);
  k = std::min<int>(k, static_cast<int>(data.rows()));
  report.k = k;

  auto clusters = cluster::best_of_restarts(data, k, cfg.restarts, cfg.seed,
                                            {cfg.kmeans_max_iter, cfg.kmeans_tol});
  clusters = cluster::prune_small_clusters(std::move(clusters), static_cast<std::size_t>(cfg.min_cluster_size));
  report.energy = clusters.energy;

  std::vector<int> retained;
  for (int j = 0; j < clusters.k(); ++j) {
    if (clusters.retained[j]) retained.push_back(j);
  }
  report.r = retained.size();
  std::vector<FeatureMatrix> members(retained.size());
  for (std::size_t t = 0; t < retained.size(); ++t) {
    members[t] = FeatureMatrix(0, data.cols());
    members[t].values().reserve(clusters.sizes[retained[t]] * data.cols());
  }
  std::vector<int> slot(clusters.k(), -1);
  for (std::size_t t = 0; t < retained.size(); ++t) slot[retained[t]] = static_cast<int>(t);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const int s = slot[clusters.assignments[i]];
    if (s >= 0) members[s].append_row(data.row(i));
  }
  for (std::size_t t = 0; t < retained.size(); ++t) {
    if (members[t].rows() < 2) {
      throw PipelineError("retained cluster " + std::to_string(retained[t]) + " has fewer than 2 cubes");
    }
  }

  std::vector<ocsvm::OneClassSvmModel> svms(retained.size());
  const ocsvm::SolverOptions solver{cfg.nu, cfg.svm_tol, cfg.svm_max_iter};
  parallel_for_checked(static_cast<long>(retained.size()),
                       [&](long t) { svms[t] = ocsvm::train_ocsvm(members[t], solver); });

  auto& model = result.model;
  model.config = feature_config_from(cfg);
  model.config.k = static_cast<std::uint32_t>(k);
  report.nu = cfg.nu;
  report.clusters.resize(clusters.k());
  for (int j = 0; j < clusters.k(); ++j) {
    report.clusters[j].size = clusters.sizes[j];
    report.clusters[j].retained = clusters.retained[j] != 0;
  }
  for (std::size_t t = 0; t < retained.size(); ++t) {
    const auto nu = ocsvm::nu_property(svms[t], members[t]);
    auto& cr = report.clusters[retained[t]];
    cr.outlier_fraction = static_cast<double>(nu.outliers) / nu.n;
    cr.support_fraction = static_cast<double>(nu.support_vectors) / nu.n;
    cr.nu_property_holds = nu.holds();

    LinearScorer scorer;
    scorer.w.assign(svms[t].w.begin(), svms[t].w.end());
    scorer.rho = static_cast<float>(svms[t].rho);
    model.models.push_back(std::move(scorer));
  }
  return result;
}

double score_cube(const NormalityModel& model, std::span<const float> x) {
  if (model.models.empty()) throw InputError("normality model has no cluster scorers");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& m : model.models) {
    if (x.size() != m.w.size()) {
      throw InputError("cube has " + std::to_string(x.size()) + " features, model expects " +
                       std::to_string(m.w.size()));
    }
    best = std::max(best, m.decision(x));
  }
  return -best;
}

AnomalyMap raw_map(const NormalityModel& model, const FrameSequence& working,
                   const augment::AppearanceProvider& provider, int end_frame, MissingAppearance missing) {
  AnomalyMap map;
  map.frame_index = end_frame;
  const auto frame_cubes = cubes::extract_frame_cubes(working, end_frame, model.config.tau_static);
  if (std::none_of(frame_cubes.begin(), frame_cubes.end(), [](const auto& c) { return c.active; })) {
    return map;
  }
  const auto maps = appearance_for(provider, end_frame, missing);
  const auto opts = augment_options(model.config);
  for (int cell = 0; cell < cubes::kCellsPerFrame; ++cell) {
    if (!frame_cubes[cell].active) continue;
    const auto aug = augment::augment_cube(frame_cubes[cell], maps, opts);
    map.grid[cell] = score_cube(model, aug.features);
    map.active[cell] = 1;
  }
  return map;
}

ScoreResult score_sequence(const NormalityModel& model, const FrameSequence& working,
                           const augment::AppearanceProvider& provider, const RunConfig& cfg) {
  check_model(model);
  cubes::check_working_sequence(working);
  const auto ends = cubes::cube_end_frames(static_cast<int>(working.size()), cfg.test_stride);
  std::vector<AnomalyMap> computed(ends.size());
  parallel_for_checked(static_cast<long>(ends.size()), [&](long i) {
    computed[i] = raw_map(model, working, provider, ends[i], cfg.missing_appearance);
  });
  ScoreResult result;
  apply_floors_and_hold(computed, ends, static_cast<int>(working.size()), cfg, result);
  return result;
}

namespace serial {

ScoreResult score_sequence(const NormalityModel& model, const FrameSequence& working,
                           const augment::AppearanceProvider& provider, const RunConfig& cfg) {
  check_model(model);
  cubes::check_working_sequence(working);
  const auto ends = cubes::cube_end_frames(static_cast<int>(working.size()), cfg.test_stride);
  std::vector<AnomalyMap> computed;
  for (int end : ends) computed.push_back(raw_map(model, working, provider, end, cfg.missing_appearance));
  ScoreResult result;
  apply_floors_and_hold(computed, ends, static_cast<int>(working.size()), cfg, result);
  return result;
}

}  // namespace serial

namespace {

long reflect_index(long i, long n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return i;
}

}  // namespace

std::vector<double> temporal_smooth(std::span<const double> series, double sigma) {
  std::vector<double> out(series.begin(), series.end());
  if (sigma <= 0.0 || series.empty()) return out;
  const long radius = static_cast<long>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (long k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-static_cast<double>(k * k) / (2.0 * sigma * sigma));
    sum += kernel[k + radius];
  }
  for (double& v : kernel) v /= sum;
  const long n = static_cast<long>(series.size());
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    for (long k = -radius; k <= radius; ++k) acc += kernel[k + radius] * series[reflect_index(i + k, n)];
    out[i] = acc;
  }
  return out;
}

std::vector<double> normalize_scores(std::span<const double> series) {
  if (series.empty()) throw InputError("cannot normalize an empty score series");
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  std::vector<double> out(series.size(), 0.0);
  const double range = *hi - *lo;
  if (range <= 0.0) return out;
  for (std::size_t i = 0; i < series.size(); ++i) out[i] = (series[i] - *lo) / range;
  return out;
}

std::vector<float> upsample_map(const AnomalyMap& map, int width, int height) {
  std::vector<float> grid(map.grid.begin(), map.grid.end());
  return resize_plane(grid, AnomalyMap::kCols, AnomalyMap::kRows, width, height, Interpolation::kBilinear);
}

}  // namespace nnc::detect
