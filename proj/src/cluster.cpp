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

#include "nnc/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nnc/error.hpp"

namespace nnc::cluster {

namespace {

double squared_distance(std::span<const float> x, std::span<const double> c) {
  double s = 0.0;
#pragma omp simd reduction(+ : s)
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = static_cast<double>(x[j]) - c[j];
    s += d * d;
  }
  return s;
}

std::pair<int, double> nearest(std::span<const float> x, const Matrix<double>& centroids) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < centroids.rows(); ++j) {
    const double d = squared_distance(x, centroids.row(j));
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(j);
    }
  }
  return {best, best_d};
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Recomputes centroids as member means; empty clusters are moved onto the
// farthest samples (distinct ones). Returns true if any cluster was empty.
bool update_centroids(const FeatureMatrix& data, const std::vector<int>& assignments,
                      const std::vector<double>& distances, Matrix<double>& centroids) {
  const std::size_t k = centroids.rows();
  const std::size_t m = centroids.cols();
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < assignments.size(); ++i) members[assignments[i]].push_back(i);

#pragma omp parallel for schedule(dynamic)
  for (std::size_t j = 0; j < k; ++j) {
    if (members[j].empty()) continue;
    auto c = centroids.row(j);
    std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i : members[j]) {
      const auto x = data.row(i);
      for (std::size_t d = 0; d < m; ++d) c[d] += x[d];
    }
    const double inv = 1.0 / static_cast<double>(members[j].size());
    for (double& v : c) v *= inv;
  }

  bool any_empty = false;
  std::vector<std::size_t> order;
  std::size_t next = 0;
  for (std::size_t j = 0; j < k; ++j) {
    if (!members[j].empty()) continue;
    if (!any_empty) {
      order.resize(distances.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return distances[a] > distances[b]; });
      any_empty = true;
    }
    const auto x = data.row(order[next++ % order.size()]);
    auto c = centroids.row(j);
    for (std::size_t d = 0; d < m; ++d) c[d] = x[d];
  }
  return any_empty;
}

double total(const std::vector<double>& values) {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

}  // namespace

std::size_t ClusterModel::retained_count() const {
  return static_cast<std::size_t>(std::count(retained.begin(), retained.end(), std::uint8_t{1}));
}

int choose_k(std::size_t n_samples, int samples_per_cluster) {
  if (samples_per_cluster < 1) throw InputError("samples per cluster must be >= 1");
  const auto k = std::llround(static_cast<double>(n_samples) / samples_per_cluster);
  return static_cast<int>(std::max<long long>(1, k));
}

void assign_nearest(const FeatureMatrix& data, const Matrix<double>& centroids,
                    std::vector<int>& assignments, std::vector<double>& distances) {
  const long n = static_cast<long>(data.rows());
  assignments.resize(data.rows());
  distances.resize(data.rows());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const auto [j, d] = nearest(data.row(i), centroids);
    assignments[i] = j;
    distances[i] = d;
  }
}

namespace serial {

void assign_nearest(const FeatureMatrix& data, const Matrix<double>& centroids,
                    std::vector<int>& assignments, std::vector<double>& distances) {
  assignments.assign(data.rows(), 0);
  distances.assign(data.rows(), 0.0);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto [j, d] = nearest(data.row(i), centroids);
    assignments[i] = j;
    distances[i] = d;
  }
}

}  // namespace serial

Matrix<double> kmeans_pp_init(const FeatureMatrix& data, int k, std::mt19937_64& rng) {
  const std::size_t n = data.rows();
  if (k < 1) throw InputError("k must be >= 1");
  if (static_cast<std::size_t>(k) > n) {
    throw InputError("k = " + std::to_string(k) + " exceeds the " + std::to_string(n) + " samples");
  }
  const std::size_t m = data.cols();
  Matrix<double> centroids(static_cast<std::size_t>(k), m);
  auto place = [&](std::size_t j, std::size_t i) {
    const auto x = data.row(i);
    std::copy(x.begin(), x.end(), centroids.row(j).begin());
  };

  place(0, std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * n)));
  std::vector<double> d2(n);
  const long ln = static_cast<long>(n);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < ln; ++i) d2[i] = squared_distance(data.row(i), centroids.row(0));

  for (int j = 1; j < k; ++j) {
    const double sum = total(d2);
    std::size_t pick = n - 1;
    if (sum > 0) {
      const double target = uniform01(rng) * sum;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0) {
          pick = i;
          break;
        }
      }
      // Rounding can leave `target` past the last positive weight.
      if (d2[pick] == 0) {
        for (std::size_t i = n; i-- > 0;) {
          if (d2[i] > 0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      pick = std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * n));
    }
    place(static_cast<std::size_t>(j), pick);
    const auto c = centroids.row(static_cast<std::size_t>(j));
#pragma omp parallel for schedule(static)
    for (long i = 0; i < ln; ++i) d2[i] = std::min(d2[i], squared_distance(data.row(i), c));
  }
  return centroids;
}

ClusterModel lloyd(const FeatureMatrix& data, Matrix<double> centroids, const LloydOptions& options) {
  if (data.empty()) throw InputError("lloyd: empty data");
  if (centroids.cols() != data.cols() || centroids.rows() == 0) {
    throw InputError("lloyd: centroid dimensions do not match the data");
  }
  for (double v : centroids.values()) {
    if (!std::isfinite(v)) throw InputError("lloyd: non-finite initial centroid");
  }
  ClusterModel model;
  std::vector<double> distances;
  assign_nearest(data, centroids, model.assignments, distances);
  model.energy = total(distances);
  model.energy_trace.push_back(model.energy);

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    model.iterations = iter;
    if (model.energy == 0.0) break;
    Matrix<double> next = centroids;
    update_centroids(data, model.assignments, distances, next);
    std::vector<int> next_assign;
    std::vector<double> next_dist;
    assign_nearest(data, next, next_assign, next_dist);
    const double next_energy = total(next_dist);
    const bool unchanged = next_assign == model.assignments;
    const double improvement = (model.energy - next_energy) / model.energy;
    centroids = std::move(next);
    model.assignments = std::move(next_assign);
    distances = std::move(next_dist);
    model.energy = next_energy;
    model.energy_trace.push_back(next_energy);
    if (unchanged || improvement < options.tol) break;
  }

  model.centroids = std::move(centroids);
  model.sizes.assign(model.centroids.rows(), 0);
  for (int a : model.assignments) ++model.sizes[a];
  model.retained.assign(model.centroids.rows(), 1);
  return model;
}

std::uint64_t restart_seed(std::uint64_t seed, int restart) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(restart + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

ClusterModel best_of_restarts(const FeatureMatrix& data, int k, int restarts, std::uint64_t seed,
                              const LloydOptions& options, std::vector<double>* restart_energies) {
  if (restarts < 1) throw InputError("restarts must be >= 1");
  std::vector<ClusterModel> runs(static_cast<std::size_t>(restarts));
  std::string error;
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < restarts; ++r) {
    try {
      std::mt19937_64 rng(restart_seed(seed, r));
      runs[r] = lloyd(data, kmeans_pp_init(data, k, rng), options);
    } catch (const std::exception& e) {
#pragma omp critical(nnc_restart_error)
      if (error.empty()) error = e.what();
    }
  }
  if (!error.empty()) throw InputError(error);
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].energy < runs[best].energy) best = r;
  }
  if (restart_energies) {
    restart_energies->clear();
    for (const auto& run : runs) restart_energies->push_back(run.energy);
  }
  return std::move(runs[best]);
}

ClusterModel prune_small_clusters(ClusterModel model, std::size_t min_size) {
  model.retained.assign(model.sizes.size(), 0);
  bool any = false;
  for (std::size_t j = 0; j < model.sizes.size(); ++j) {
    model.retained[j] = model.sizes[j] >= min_size ? 1 : 0;
    any = any || model.retained[j];
  }
  if (!any && !model.sizes.empty()) {
    const auto largest = std::max_element(model.sizes.begin(), model.sizes.end()) - model.sizes.begin();
    model.retained[largest] = 1;
  }
  return model;
}

}  // namespace nnc::cluster
