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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "nnc/error.hpp"
#include "nnc/ocsvm.hpp"
#include "oracles.hpp"

namespace nnc::ocsvm {
namespace {

FeatureMatrix random_points(std::size_t n, std::size_t m, std::uint64_t seed, float shift = 1.0f) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g(0.0f, 1.0f);
  FeatureMatrix x(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < m; ++d) x(i, d) = g(rng) + (d == 0 ? shift : 0.0f);
  }
  return x;
}

void expect_feasible(const OneClassSvmModel& model) {
  const double c = model.upper_bound();
  const double sum = std::accumulate(model.alphas.begin(), model.alphas.end(), 0.0);
  EXPECT_NEAR(sum, 1.0, 1e-9);
  for (double a : model.alphas) {
    EXPECT_GE(a, -1e-9);
    EXPECT_LE(a, c + 1e-9);
  }
}

TEST(Ocsvm, TwoIdenticalPointsClosedForm) {
  FeatureMatrix x;
  x.append_row(std::vector<float>{0.6f, 0.8f});
  x.append_row(std::vector<float>{0.6f, 0.8f});
  const auto model = train_ocsvm(x, SolverOptions{1.0});
  EXPECT_NEAR(model.alphas[0], 0.5, 1e-12);
  EXPECT_NEAR(model.alphas[1], 0.5, 1e-12);
  EXPECT_NEAR(model.w[0], 0.6, 1e-7);
  EXPECT_NEAR(model.w[1], 0.8, 1e-7);
  EXPECT_NEAR(model.rho, 1.0, 1e-6);
  EXPECT_NEAR(decision(model, x.row(0)), 0.0, 1e-6);

  const auto brute = oracle::brute_force_qp(x, 1.0);
  EXPECT_NEAR(brute.alphas[0], 0.5, 1e-9);
  EXPECT_NEAR(brute.rho, 1.0, 1e-6);
}

// With m < n the kernel matrix is singular, so the optimal alphas need not
// be unique; w, rho and the objective are.
TEST(Ocsvm, SmallInstanceMatchesBruteForceSolution) {
  const auto x = random_points(12, 2, 17);
  const auto model = train_ocsvm(x, SolverOptions{0.25, 1e-10});
  const auto brute = oracle::brute_force_qp(x, 0.25);
  ASSERT_LT(brute.duality_gap, 1e-10);
  EXPECT_NEAR(model.objective, brute.objective, 1e-9);
  for (std::size_t d = 0; d < 2; ++d) EXPECT_NEAR(model.w[d], brute.w[d], 1e-5) << "w " << d;
  EXPECT_NEAR(model.rho, brute.rho, 1e-6);
  EXPECT_NEAR(dual_objective(x, brute.alphas), brute.objective, 1e-12);
  expect_feasible(model);
}

TEST(Ocsvm, FullRankInstanceMatchesBruteForceAlphas) {
  // n <= m with generic points: Q is positive definite and alphas are unique.
  const auto x = random_points(5, 5, 23);
  const auto model = train_ocsvm(x, SolverOptions{0.5, 1e-12});
  const auto brute = oracle::brute_force_qp(x, 0.5);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(model.alphas[i], brute.alphas[i], 1e-5) << "alpha " << i;
}

TEST(Ocsvm, BruteForceIsNeverBetterThanSmoByMoreThanTolerance) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto x = random_points(10, 3, 100 + seed);
    const double nu = 0.1 + 0.2 * static_cast<double>(seed % 4);
    const auto model = train_ocsvm(x, SolverOptions{nu});
    const auto brute = oracle::brute_force_qp(x, nu);
    EXPECT_LE(brute.objective, model.objective + 1e-6) << "seed " << seed;
    EXPECT_NEAR(dual_objective(x, model.alphas), model.objective, 1e-9);
    expect_feasible(model);
  }
}

TEST(Ocsvm, WeightVectorIsTheAlphaCombination) {
  const auto x = random_points(300, 8, 3);
  const auto model = train_ocsvm(x, SolverOptions{0.05});
  for (std::size_t d = 0; d < x.cols(); ++d) {
    double w = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) w += model.alphas[i] * x(i, d);
    EXPECT_NEAR(model.w[d], w, 1e-6);
  }
  expect_feasible(model);
}

TEST(Ocsvm, NuPropertyHoldsAcrossNu) {
  for (double nu : {0.01, 0.05, 0.1, 0.3, 0.7, 1.0}) {
    const auto x = random_points(400, 6, 9);
    const auto model = train_ocsvm(x, SolverOptions{nu});
    const auto report = nu_property(model, x);
    EXPECT_TRUE(report.holds()) << "nu " << nu << " outliers " << report.outliers << " svs "
                                << report.support_vectors;
    EXPECT_LE(report.outliers, static_cast<std::size_t>(std::ceil(nu * 400)));
    EXPECT_GE(report.support_vectors, static_cast<std::size_t>(std::floor(nu * 400)));
  }
}

TEST(Ocsvm, FreeSupportVectorsSitOnTheBoundary) {
  const auto x = random_points(200, 4, 21);
  const SolverOptions opts{0.1};
  const auto model = train_ocsvm(x, opts);
  int free = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (model.alphas[i] > 0 && model.alphas[i] < model.upper_bound()) {
      ++free;
      EXPECT_NEAR(decision(model, x.row(i)), 0.0, opts.tol);
    }
  }
  EXPECT_GT(free, 0);
}

TEST(Ocsvm, CentroidScoresAtLeastTheWorstTrainingPoint) {
  const auto x = random_points(150, 5, 8, 3.0f);
  const auto model = train_ocsvm(x, SolverOptions{0.1});
  std::vector<float> centroid(x.cols(), 0.0f);
  double worst = 1e300;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    worst = std::min(worst, decision(model, x.row(i)));
    for (std::size_t d = 0; d < x.cols(); ++d) centroid[d] += x(i, d) / static_cast<float>(x.rows());
  }
  EXPECT_GE(decision(model, centroid), worst);
}

TEST(Ocsvm, DecisionIsAffine) {
  const auto x = random_points(50, 3, 4);
  const auto model = train_ocsvm(x, SolverOptions{0.2});
  const std::vector<float> a{1.0f, -2.0f, 0.5f}, b{-0.5f, 3.0f, 2.0f}, mid{0.25f, 0.5f, 1.25f};
  EXPECT_NEAR(decision(model, mid), (decision(model, a) + decision(model, b)) / 2, 1e-9);
  EXPECT_THROW(decision(model, std::vector<float>{1.0f}), InputError);
}

TEST(Ocsvm, ScalingPreservesTheTrainingSignPattern) {
  const auto x = random_points(120, 4, 6, 2.0f);
  FeatureMatrix scaled = x;
  for (auto& v : scaled.values()) v *= 4.0f;
  const auto a = train_ocsvm(x, SolverOptions{0.1, 1e-8});
  const auto b = train_ocsvm(scaled, SolverOptions{0.1, 1e-8 * 16});
  EXPECT_NEAR(b.rho, 16.0 * a.rho, 1e-5 * std::abs(b.rho));
  int disagreements = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double da = decision(a, x.row(i));
    const double db = decision(b, scaled.row(i));
    if (std::abs(da) > 1e-6) disagreements += (da > 0) != (db > 0);
  }
  EXPECT_EQ(disagreements, 0);
}

TEST(Ocsvm, NuIsClampedToOneOverN) {
  const auto x = random_points(20, 2, 1);
  const auto model = train_ocsvm(x, SolverOptions{0.01});
  EXPECT_DOUBLE_EQ(model.nu_requested, 0.01);
  EXPECT_DOUBLE_EQ(model.nu, 1.0 / 20);
  expect_feasible(model);
}

TEST(Ocsvm, InputErrors) {
  FeatureMatrix one;
  one.append_row(std::vector<float>{1.0f});
  EXPECT_THROW(train_ocsvm(one), InputError);
  auto bad = random_points(5, 2, 1);
  bad(2, 1) = std::nanf("");
  EXPECT_THROW(train_ocsvm(bad), InputError);
  EXPECT_THROW(train_ocsvm(random_points(5, 2, 1), SolverOptions{0.0}), InputError);
  EXPECT_THROW(train_ocsvm(random_points(5, 2, 1), SolverOptions{1.5}), InputError);
}

TEST(Ocsvm, IterationBudgetExhaustionIsAPipelineError) {
  const auto x = random_points(200, 5, 2);
  SolverOptions opts{0.1, 1e-12, 3};
  EXPECT_THROW(train_ocsvm(x, opts), PipelineError);
}

TEST(Ocsvm, TinyCacheGivesTheSameModel) {
  const auto x = random_points(150, 6, 12);
  SolverOptions big{0.1};
  SolverOptions tiny{0.1};
  tiny.cache_bytes = 1;
  const auto a = train_ocsvm(x, big);
  const auto b = train_ocsvm(x, tiny);
  EXPECT_EQ(a.alphas, b.alphas);
  EXPECT_EQ(a.rho, b.rho);
}

TEST(EstimateRho, BracketMidpointWithoutFreeAlphas) {
  const std::vector<double> g{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> a{0.5, 0.5, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(estimate_rho(g, a, 0.5), (2.0 + 3.0) / 2);
  const std::vector<double> f{0.5, 0.25, 0.25, 0.0};
  EXPECT_DOUBLE_EQ(estimate_rho(g, f, 0.5), 2.5);
}

TEST(BruteForceQp, GuardsProblemSize) {
  EXPECT_THROW(oracle::brute_force_qp(random_points(21, 2, 1), 0.5), std::invalid_argument);
}

TEST(BruteForceQp, ProjectionLandsOnTheCappedSimplex) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(8);
    for (auto& x : v) x = g(rng);
    const auto p = oracle::project_capped_simplex(v, 0.3);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    for (double x : p) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 0.3);
    }
  }
}

}  // namespace
}  // namespace nnc::ocsvm
