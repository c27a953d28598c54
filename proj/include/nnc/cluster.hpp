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

// First-stage outlier elimination: k-means++ seeded Lloyd iterations,
// minimum-energy restarts, and pruning of small clusters.

#include <cstdint>
#include <random>
#include <vector>

#include "nnc/matrix.hpp"

namespace nnc::cluster {

struct ClusterModel {
  Matrix<double> centroids;             // k x m
  std::vector<int> assignments;         // per sample
  std::vector<std::size_t> sizes;       // per cluster
  double energy = 0.0;                  // sum of squared distances to assigned centroids
  std::vector<std::uint8_t> retained;   // per cluster; all 1 until pruned
  std::vector<double> energy_trace;     // energy after every assignment step
  int iterations = 0;

  int k() const { return static_cast<int>(centroids.rows()); }
  std::size_t retained_count() const;
};

struct LloydOptions {
  int max_iter = 100;
  double tol = 1e-4;  // relative energy improvement
};

// max(1, round(n / samples_per_cluster)).
int choose_k(std::size_t n_samples, int samples_per_cluster = 1000);

// First centroid uniform, then each next one drawn with probability
// proportional to the squared distance to the nearest chosen centroid.
Matrix<double> kmeans_pp_init(const FeatureMatrix& data, int k, std::mt19937_64& rng);

// Lloyd iterations from the given centroids. Empty clusters are re-seeded
// to the sample farthest from its centroid. On return the assignments are
// nearest-centroid for the returned centroids (ties to the lowest index).
ClusterModel lloyd(const FeatureMatrix& data, Matrix<double> centroids, const LloydOptions& options = {});

// Runs `restarts` independent k-means++/Lloyd fits (in parallel) and keeps
// the lowest-energy one, ties to the earliest restart. Restart r draws from
// a generator seeded by mixing `seed` with r, so results do not depend on the
// thread count. Per-restart energies are reported through `restart_energies`.
ClusterModel best_of_restarts(const FeatureMatrix& data, int k, int restarts, std::uint64_t seed,
                              const LloydOptions& options = {},
                              std::vector<double>* restart_energies = nullptr);

// retained[j] = sizes[j] >= min_size; keeps the largest cluster when none
// qualifies.
ClusterModel prune_small_clusters(ClusterModel model, std::size_t min_size);

// Nearest-centroid assignment; distances[i] receives the squared distance.
// OpenMP-parallel over samples.
void assign_nearest(const FeatureMatrix& data, const Matrix<double>& centroids,
                    std::vector<int>& assignments, std::vector<double>& distances);

std::uint64_t restart_seed(std::uint64_t seed, int restart);

namespace serial {

void assign_nearest(const FeatureMatrix& data, const Matrix<double>& centroids,
                    std::vector<int>& assignments, std::vector<double>& distances);

}  // namespace serial

}  // namespace nnc::cluster
