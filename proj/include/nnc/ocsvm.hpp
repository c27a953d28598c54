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

// nu-one-class SVM with a linear kernel, trained on the dual
//
//   min_a  1/2 a^T Q a   s.t.  0 <= a_i <= 1/(nu n),  sum_i a_i = 1,
//
// with Q_ij = <x_i, x_j>. The solution collapses to w = sum_i a_i x_i and
// the score of a sample is <w, x> - rho (positive inside the boundary).

#include <cstdint>
#include <span>
#include <vector>

#include "nnc/matrix.hpp"

namespace nnc::ocsvm {

struct OneClassSvmModel {
  double nu = 0.01;            // effective nu (clamped to >= 1/n)
  double nu_requested = 0.01;
  std::vector<double> alphas;  // dual weights, one per training sample
  double rho = 0.0;
  std::vector<double> w;
  std::size_t n_train = 0;
  long iterations = 0;
  double objective = 0.0;      // 1/2 ||w||^2 at the returned alphas
  double tol = 0.0;            // KKT gap the solver stopped at (upper bound)

  double upper_bound() const { return 1.0 / (nu * static_cast<double>(n_train)); }
  std::size_t dim() const { return w.size(); }
};

struct SolverOptions {
  double nu = 0.01;
  double tol = 1e-4;            // maximal KKT violation at termination
  long max_iter = 100000;       // pair updates before giving up
  std::size_t cache_bytes = std::size_t{256} << 20;
};

// Kernel used by the solver. Only the linear kernel is provided; scoring
// relies on it collapsing to an explicit weight vector.
struct LinearKernel {
  double operator()(std::span<const float> a, std::span<const float> b) const {
    double s = 0.0;
#pragma omp simd reduction(+ : s)
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
    return s;
  }
};

// SMO with maximal-violating-pair selection. Throws InputError for n < 2
// or non-finite features and PipelineError if max_iter is exhausted.
OneClassSvmModel train_ocsvm(const FeatureMatrix& samples, const SolverOptions& options = {});

// <w, x> - rho. Throws InputError on a dimension mismatch.
double decision(const OneClassSvmModel& model, std::span<const float> x);

// 1/2 a^T Q a for arbitrary weights over `samples`.
double dual_objective(const FeatureMatrix& samples, std::span<const double> alphas);

// Recovers rho from a dual solution: mean gradient over free alphas, or the
// midpoint of the KKT bracket when every alpha sits on a bound.
double estimate_rho(std::span<const double> gradient, std::span<const double> alphas, double upper);

// A training sample counts as an outlier when its decision is below
// -model.tol: samples within the solver tolerance of the boundary cannot be
// told apart from margin support vectors, while any sample beyond it must
// sit at the upper bound, and at most nu n can.
struct NuPropertyReport {
  std::size_t outliers = 0;         // training samples with decision < -tol
  std::size_t support_vectors = 0;  // alpha > 0
  std::size_t n = 0;
  double nu = 0.0;
  // outliers / n <= nu + 1/n and support_vectors / n >= nu - 1/n.
  bool holds() const;
};

NuPropertyReport nu_property(const OneClassSvmModel& model, const FeatureMatrix& samples);

}  // namespace nnc::ocsvm
