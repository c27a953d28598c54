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

#include <cstdint>
#include <string>

namespace nnc {

enum class AppearanceSource { kNone = 0, kHandcrafted = 1, kFile = 2 };
enum class MissingAppearance { kFail, kZeros };

std::string to_string(AppearanceSource source);
AppearanceSource parse_appearance_source(const std::string& name);
std::string to_string(MissingAppearance policy);
MissingAppearance parse_missing_appearance(const std::string& name);

// Every tunable of the pipeline. Defaults follow the published settings
// where one exists (1000 cubes per cluster, 10 restarts, clusters under 500
// cubes pruned, nu = 0.01, one in two test frames).
struct RunConfig {
  // [features]
  double tau_static = 0.1;
  int train_stride = 1;
  int test_stride = 2;
  bool normalize_direction = true;
  bool normalize_appearance = true;
  AppearanceSource appearance = AppearanceSource::kHandcrafted;
  MissingAppearance missing_appearance = MissingAppearance::kZeros;

  // [cluster]
  int samples_per_cluster = 1000;
  int k = 0;  // 0 = choose from samples_per_cluster
  int min_cluster_size = 500;
  int restarts = 10;
  int kmeans_max_iter = 100;
  double kmeans_tol = 1e-4;

  // [svm]
  double nu = 0.01;
  double svm_tol = 1e-4;
  long svm_max_iter = 100000;

  // [scoring]
  double sigma_t = 10.0;

  // [eval]
  double sigma_s = 20.0;
  int max_thresholds = 1000;

  // [run]
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = all available cores

  // "key = value" lines grouped under [section] headers.
  std::string to_ini() const;

  // Applies the keys present in `text` on top of `base`. Unknown sections or
  // keys and unparsable values throw InputError naming the line.
  static RunConfig from_ini(const std::string& text);
  static RunConfig from_ini(const std::string& text, RunConfig base);
  static RunConfig load(const std::string& path);
  static RunConfig load(const std::string& path, RunConfig base);

  // Throws InputError for out-of-range values.
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

}  // namespace nnc
