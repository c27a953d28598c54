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

// Independent reference computations used only by the test suites. Nothing
// here calls into the code paths it is used to check.

#include <cstdint>
#include <span>
#include <vector>

#include "nnc/cubes.hpp"
#include "nnc/matrix.hpp"

namespace nnc::oracle {

struct QpSolution {
  std::vector<double> alphas;
  std::vector<double> w;
  double rho = 0.0;
  double objective = 0.0;
  double kkt_gap = 0.0;
  double duality_gap = 0.0;  // certified bound on objective - optimum
  long iterations = 0;
};

// Solves the one-class dual by accelerated projected gradient with exact
// projection onto the capped simplex, until the KKT gap drops below 1e-10
// or the Frank-Wolfe duality gap below 1e-13 (or the iteration budget runs
// out). Throws std::invalid_argument for n > 20.
QpSolution brute_force_qp(const FeatureMatrix& x, double nu);

// Euclidean projection onto { 0 <= a_i <= cap, sum a_i = 1 }.
std::vector<double> project_capped_simplex(std::span<const double> v, double cap);

// Straightforward triple loop over (t, y, x) with explicit boundary cases.
std::vector<double> gradient_magnitudes(const cubes::Voxels& voxels);

// P(score_pos > score_neg) + 0.5 P(score_pos == score_neg), by enumerating
// every positive/negative pair.
double pairwise_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct Partition {
  std::vector<double> centroids;  // sorted
  double energy = 0.0;
};

// Best k-partition of 1-D data by enumerating every assignment (k^n).
Partition exhaustive_kmeans_1d(std::span<const double> data, int k);

// Bilinear sample of a w x h plane at output pixel (x, y) of a dw x dh
// image, written out with explicit weights.
double bilinear_sample(std::span<const float> src, int w, int h, int dw, int dh, int x, int y);

// Keys (a = -0.5) cubic convolution sample with clamped taps.
double bicubic_sample(std::span<const float> src, int w, int h, int dw, int dh, int x, int y);

// Mean-direction histogram recomputed from first principles: centre of
// gradient mass per patch / sub-bin and the displacement between
// consecutive patches. Returns the 20 displacement vectors (dx, dy) with
// zero-mass pairs reported as (0, 0).
std::vector<std::pair<double, double>> displacement_vectors(const cubes::Voxels& voxels);

}  // namespace nnc::oracle
