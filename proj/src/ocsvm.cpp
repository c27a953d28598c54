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

#include "nnc/ocsvm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "nnc/error.hpp"

namespace nnc::ocsvm {

namespace {

// Kernel columns computed on demand. The cache is dropped wholesale once it
// outgrows its byte budget.
class ColumnCache {
 public:
  ColumnCache(const FeatureMatrix& x, std::size_t budget_bytes)
      : x_(x), columns_(x.rows()), max_columns_(std::max<std::size_t>(2, budget_bytes / (8 * std::max<std::size_t>(1, x.rows())))) {}

  // `keep` names a column that must survive an eviction.
  const std::vector<double>& column(std::size_t i, std::size_t keep) {
    auto& col = columns_[i];
    if (col.empty()) {
      if (cached_ >= max_columns_) {
        cached_ = 0;
        for (std::size_t c = 0; c < columns_.size(); ++c) {
          if (c == keep && !columns_[c].empty()) {
            ++cached_;
          } else {
            std::vector<double>().swap(columns_[c]);
          }
        }
      }
      col.resize(x_.rows());
      const auto xi = x_.row(i);
      const long n = static_cast<long>(x_.rows());
#pragma omp parallel for schedule(static) if (n > 4096)
      for (long k = 0; k < n; ++k) col[k] = kernel_(xi, x_.row(k));
      ++cached_;
    }
    return col;
  }

 private:
  const FeatureMatrix& x_;
  LinearKernel kernel_;
  std::vector<std::vector<double>> columns_;
  std::size_t max_columns_;
  std::size_t cached_ = 0;
};

void accumulate_w(const FeatureMatrix& x, std::span<const double> alphas, std::vector<double>& w) {
  w.assign(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (alphas[i] == 0.0) continue;
    const auto xi = x.row(i);
    for (std::size_t d = 0; d < w.size(); ++d) w[d] += alphas[i] * xi[d];
  }
}

double dot(std::span<const double> w, std::span<const float> x) {
  double s = 0.0;
#pragma omp simd reduction(+ : s)
  for (std::size_t d = 0; d < w.size(); ++d) s += w[d] * x[d];
  return s;
}

}  // namespace

double estimate_rho(std::span<const double> gradient, std::span<const double> alphas, double upper) {
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (alphas[i] >= upper) {
      lb = std::max(lb, gradient[i]);
    } else if (alphas[i] <= 0.0) {
      ub = std::min(ub, gradient[i]);
    } else {
      sum_free += gradient[i];
      ++n_free;
    }
  }
  if (n_free > 0) return sum_free / static_cast<double>(n_free);
  if (!std::isfinite(ub)) return lb;
  if (!std::isfinite(lb)) return ub;
  return (ub + lb) / 2.0;
}

OneClassSvmModel train_ocsvm(const FeatureMatrix& x, const SolverOptions& options) {
  const std::size_t n = x.rows();
  if (n < 2) throw InputError("one-class SVM needs at least 2 samples, got " + std::to_string(n));
  if (!(options.nu > 0.0 && options.nu <= 1.0)) throw InputError("nu must lie in (0, 1]");
  for (float v : x.values()) {
    if (!std::isfinite(v)) throw InputError("one-class SVM: non-finite feature value");
  }

  OneClassSvmModel model;
  model.n_train = n;
  model.nu_requested = options.nu;
  model.nu = std::max(options.nu, 1.0 / static_cast<double>(n));
  const double upper = model.upper_bound();

  // Feasible start: fill the first floor(nu n) weights to the bound and put
  // the remainder on the next one.
  auto& a = model.alphas;
  a.assign(n, 0.0);
  double remaining = 1.0;
  for (std::size_t i = 0; i < n && remaining > 0.0; ++i) {
    a[i] = std::min(upper, remaining);
    remaining -= a[i];
    if (remaining < 1e-15) remaining = 0.0;
  }

  accumulate_w(x, a, model.w);
  std::vector<double> g(n);
  const long ln = static_cast<long>(n);
#pragma omp parallel for schedule(static)
  for (long k = 0; k < ln; ++k) g[k] = dot(model.w, x.row(k));

  ColumnCache cache(x, options.cache_bytes);
  long iter = 0;
  for (;; ++iter) {
    // i: smallest gradient among weights that can grow; j: largest gradient
    // among weights that can shrink.
    std::size_t i = n, j = n;
    double g_min = std::numeric_limits<double>::infinity();
    double g_max = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      if (a[t] < upper && g[t] < g_min) {
        g_min = g[t];
        i = t;
      }
      if (a[t] > 0.0 && g[t] > g_max) {
        g_max = g[t];
        j = t;
      }
    }
    if (i == n || j == n || g_max - g_min < options.tol) break;
    if (iter >= options.max_iter) {
      throw PipelineError("one-class SVM did not converge within " + std::to_string(options.max_iter) +
                          " iterations (KKT gap " + std::to_string(g_max - g_min) + ")");
    }

    const auto& qi = cache.column(i, n);
    const auto& qj = cache.column(j, i);
    double eta = qi[i] + qj[j] - 2.0 * qi[j];
    if (eta <= 0.0) eta = 1e-12;
    const double limit = std::min(upper - a[i], a[j]);
    double delta = (g_max - g_min) / eta;
    if (delta >= limit) {
      delta = limit;
      if (limit == upper - a[i]) {
        a[j] -= delta;
        a[i] = upper;
      } else {
        a[i] += delta;
        a[j] = 0.0;
      }
    } else {
      a[i] += delta;
      a[j] -= delta;
    }
    if (a[j] < 0.0) a[j] = 0.0;
    if (a[i] > upper) a[i] = upper;

#pragma omp parallel for schedule(static) if (ln > 4096)
    for (long k = 0; k < ln; ++k) g[k] += delta * (qi[k] - qj[k]);
  }
  model.iterations = iter;
  model.tol = options.tol;

  accumulate_w(x, a, model.w);
  // Refresh gradients from w to shed drift accumulated by the updates.
#pragma omp parallel for schedule(static)
  for (long k = 0; k < ln; ++k) g[k] = dot(model.w, x.row(k));
  model.rho = estimate_rho(g, a, upper);
  double ww = 0.0;
  for (double v : model.w) ww += v * v;
  model.objective = 0.5 * ww;
  return model;
}

double decision(const OneClassSvmModel& model, std::span<const float> x) {
  if (x.size() != model.w.size()) {
    throw InputError("decision: sample has " + std::to_string(x.size()) + " features, model expects " +
                     std::to_string(model.w.size()));
  }
  return dot(model.w, x) - model.rho;
}

double dual_objective(const FeatureMatrix& samples, std::span<const double> alphas) {
  std::vector<double> w;
  accumulate_w(samples, alphas, w);
  double ww = 0.0;
  for (double v : w) ww += v * v;
  return 0.5 * ww;
}

bool NuPropertyReport::holds() const {
  const double dn = static_cast<double>(n);
  return static_cast<double>(outliers) / dn <= nu + 1.0 / dn + 1e-12 &&
         static_cast<double>(support_vectors) / dn >= nu - 1.0 / dn - 1e-12;
}

NuPropertyReport nu_property(const OneClassSvmModel& model, const FeatureMatrix& samples) {
  NuPropertyReport r;
  r.n = samples.rows();
  r.nu = model.nu;
  for (std::size_t i = 0; i < samples.rows(); ++i) {
    if (decision(model, samples.row(i)) < -model.tol) ++r.outliers;
    if (i < model.alphas.size() && model.alphas[i] > 0.0) ++r.support_vectors;
  }
  return r;
}

}  // namespace nnc::ocsvm
