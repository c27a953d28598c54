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

// The `nnc` command-line tool: train, score, eval, synth and plot.
//
// Settings are resolved in three layers: built-in defaults, then an
// optional `--config` INI file, then explicit flags.
// Exit codes: 0 success, 1 internal error, 2 usage or input error.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nnc/config.hpp"
#include "nnc/ingest.hpp"

namespace nnc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;

struct TrainArgs {
  std::filesystem::path video;
  std::string format = "auto";
  std::optional<std::filesystem::path> features;
  std::filesystem::path out_model;
};

struct ScoreArgs {
  std::filesystem::path video;
  std::string format = "auto";
  std::filesystem::path model;
  std::optional<std::filesystem::path> features;
  std::filesystem::path out_scores;
  std::optional<std::filesystem::path> out_maps;
};

struct EvalArgs {
  std::filesystem::path scores;
  std::optional<std::filesystem::path> maps;
  std::optional<std::filesystem::path> labels;
  std::optional<std::filesystem::path> masks;
  std::optional<std::filesystem::path> out_report;
  bool curves = false;
};

struct SynthArgs {
  std::string preset = "benchmark";
  std::optional<std::uint64_t> seed;
  bool no_anomalies = false;
  std::filesystem::path out_video;
  std::optional<std::filesystem::path> out_labels;
  std::optional<std::filesystem::path> out_masks;
};

struct PlotArgs {
  std::filesystem::path scores;
  std::optional<std::filesystem::path> labels;
  std::filesystem::path out_svg;
  std::string series = "normalized";
  std::string title = "anomaly score";
};

// Each command validates its inputs, runs, and maps exceptions to exit
// codes with a one-line diagnostic on `err`.
int cmd_train(const TrainArgs& args, const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_score(const ScoreArgs& args, const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalArgs& args, const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err);
int cmd_plot(const PlotArgs& args, std::ostream& out, std::ostream& err);

// Loads a video given as a PGM/PNG directory or NNCV file. `format` is one
// of auto, pgm-dir, png-dir, raw-gray; auto picks by path type and the
// extensions found in a directory.
FrameSequence load_video(const std::filesystem::path& path, const std::string& format);

// Brings a sequence to the 120x160 working resolution (bilinear).
FrameSequence to_working_size(const FrameSequence& seq);

// Parses argv and dispatches to a subcommand. The vector overload takes the
// arguments without the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nnc::cli
