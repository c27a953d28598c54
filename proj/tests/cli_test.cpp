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

#include <cstdlib>
#include <regex>
#include <sstream>
#include <sys/wait.h>

#include "commands.hpp"
#include "nnc/detect.hpp"
#include "nnc/eval.hpp"
#include "svg_plot.hpp"
#include "test_util.hpp"

namespace nnc::cli {
namespace {

using testing::TempDir;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome nnc(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

// Shared artifacts: a small trained model on the benchmark scene.
struct Workspace {
  TempDir dir;
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

void prepare(const Workspace& w) {
  const auto synth_train = nnc({"synth", "--preset", "training", "--out", w.path("train.nncv")});
  EXPECT_EQ(synth_train.code, kExitOk) << synth_train.err;
  const auto synth_test = nnc({"synth", "--out", w.path("test.nncv"), "--labels", w.path("labels.csv"), "--masks",
                               w.path("masks.nncv")});
  EXPECT_EQ(synth_test.code, kExitOk) << synth_test.err;
  const auto train = nnc({"train", "--video", w.path("train.nncv"), "--out", w.path("model.nncm"),
                          "--samples-per-cluster", "4000", "--restarts", "1", "--min-cluster-size", "200", "--stride",
                          "2", "--nu", "0.05"});
  EXPECT_EQ(train.code, kExitOk) << train.err;
  EXPECT_TRUE(contains(train.out, "nu = 0.05")) << train.out;
  const auto score = nnc({"score", "--video", w.path("test.nncv"), "--model", w.path("model.nncm"), "--out",
                          w.path("scores.csv"), "--maps", w.path("maps.nncg")});
  EXPECT_EQ(score.code, kExitOk) << score.err;
  EXPECT_TRUE(contains(score.out, "FPS")) << score.out;
}

const Workspace& workspace() {
  static const Workspace ws;
  static const bool ready = (prepare(ws), true);
  (void)ready;
  return ws;
}

TEST(Cli, EndToEndProducesUsefulScores) {
  const auto& w = workspace();
  const auto series = detect::read_scores_csv(w.path("scores.csv"));
  EXPECT_EQ(series.raw.size(), 600u);
  const auto e = nnc({"eval", "--scores", w.path("scores.csv"), "--labels", w.path("labels.csv"), "--maps",
                      w.path("maps.nncg"), "--masks", w.path("masks.nncv"), "--out", w.path("report.csv")});
  ASSERT_EQ(e.code, kExitOk) << e.err;
  std::smatch m;
  ASSERT_TRUE(std::regex_search(e.out, m, std::regex("frame_auc ([0-9.]+)"))) << e.out;
  EXPECT_GT(std::stod(m[1]), 0.85);
  EXPECT_TRUE(contains(e.out, "pixel_auc ")) << e.out;
  const auto report = testing::read_bytes(w.dir / "report.csv");
  EXPECT_EQ(report.rfind("metric,value\nframe_auc,", 0), 0u) << report;
  EXPECT_TRUE(contains(report, "\npixel_auc,"));
}

TEST(Cli, ConfigFileAndFlagsLayerOverDefaults) {
  const auto& w = workspace();
  testing::write_bytes(w.dir / "cfg.ini", "[svm]\nnu = 0.2\n[cluster]\nrestarts = 1\nsamples_per_cluster = 4000\n"
                                            "min_cluster_size = 200\n[features]\ntrain_stride = 4\n");
  const auto from_file = nnc({"train", "--video", w.path("train.nncv"), "--out", w.path("m2.nncm"), "--config",
                              w.path("cfg.ini")});
  ASSERT_EQ(from_file.code, kExitOk) << from_file.err;
  EXPECT_TRUE(contains(from_file.out, "nu = 0.2,")) << from_file.out;
  const auto flag_wins = nnc({"train", "--video", w.path("train.nncv"), "--out", w.path("m3.nncm"), "--config",
                              w.path("cfg.ini"), "--nu", "0.3"});
  ASSERT_EQ(flag_wins.code, kExitOk) << flag_wins.err;
  EXPECT_TRUE(contains(flag_wins.out, "nu = 0.3,")) << flag_wins.out;
}

TEST(Cli, MissingVideoIsAnInputError) {
  const auto r = nnc({"train", "--video", "/no/such/video.nncv", "--out", "/tmp/unused.nncm"});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_TRUE(contains(r.err, "/no/such/video.nncv")) << r.err;
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(nnc({}).code, kExitInput);
  EXPECT_EQ(nnc({"frobnicate"}).code, kExitInput);
  EXPECT_EQ(nnc({"train", "--video", "x"}).code, kExitInput);
  EXPECT_EQ(nnc({"train", "--video", "x", "--out", "y", "--nu", "abc"}).code, kExitInput);
  const auto bad_nu = nnc({"train", "--video", "x", "--out", "y", "--nu", "1.5"});
  EXPECT_EQ(bad_nu.code, kExitInput);
  EXPECT_TRUE(contains(bad_nu.err, "nu")) << bad_nu.err;
  EXPECT_EQ(nnc({"synth", "--preset", "carnival", "--out", "/tmp/x.nncv"}).code, kExitInput);
}

TEST(Cli, BadConfigFileNamesTheLine) {
  TempDir dir;
  testing::write_bytes(dir / "bad.ini", "[svm]\nnu = 0.1\nwibble = 3\n");
  const auto r = nnc({"train", "--video", "x", "--out", "y", "--config", (dir / "bad.ini").string()});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_TRUE(contains(r.err, "line 3")) << r.err;
}

TEST(Cli, StaticVideoIsAPipelineFailure) {
  TempDir dir;
  FrameSequence seq;
  for (int t = 0; t < 8; ++t) seq.frames.emplace_back(160, 120, t, 0.5f);
  save_raw_gray(seq, dir / "static.nncv");
  const auto r = nnc({"train", "--video", (dir / "static.nncv").string(), "--out", (dir / "m.nncm").string()});
  EXPECT_EQ(r.code, kExitInternal);
  EXPECT_TRUE(contains(r.err, "static")) << r.err;
}

TEST(Cli, FileAppearanceWithoutFeaturesIsAnInputError) {
  const auto& w = workspace();
  const auto no_flag = nnc({"train", "--video", w.path("train.nncv"), "--out", w.path("x.nncm"), "--appearance",
                            "file"});
  EXPECT_EQ(no_flag.code, kExitInput);
  const auto missing = nnc({"train", "--video", w.path("train.nncv"), "--out", w.path("x.nncm"), "--appearance",
                            "file", "--features", w.path("absent.nncf")});
  EXPECT_EQ(missing.code, kExitInput);
  EXPECT_TRUE(contains(missing.err, "absent.nncf")) << missing.err;
}

TEST(Cli, CorruptModelIsAnInputError) {
  const auto& w = workspace();
  testing::write_bytes(w.dir / "junk.nncm", "JUNKJUNKJUNK");
  const auto r = nnc({"score", "--video", w.path("test.nncv"), "--model", w.path("junk.nncm"), "--out",
                      w.path("s.csv")});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_TRUE(contains(r.err, "magic")) << r.err;
}

TEST(Cli, HelpStatesDefaultsAndTheirOrigin) {
  const auto r = nnc({"train", "--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_TRUE(contains(r.out, "--nu")) << r.out;
  EXPECT_TRUE(contains(r.out, "[default 0.01; published setting]")) << r.out;
  EXPECT_TRUE(contains(r.out, "[default 0.1; implementation choice]")) << r.out;
  EXPECT_TRUE(contains(r.out, "precedence")) << r.out;
  const auto top = nnc({"--help"});
  EXPECT_EQ(top.code, kExitOk);
  for (const char* sub : {"train", "score", "eval", "synth", "plot"}) EXPECT_TRUE(contains(top.out, sub)) << sub;
}

TEST(Cli, PlotShadesEveryLabelledRun) {
  const auto& w = workspace();
  const auto r = nnc({"plot", "--scores", w.path("scores.csv"), "--labels", w.path("labels.csv"), "--out",
                      w.path("plot.svg")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto svg = testing::read_bytes(w.dir / "plot.svg");
  const auto labels = eval::load_ground_truth(w.dir / "labels.csv", std::nullopt).frame_labels;
  std::vector<std::pair<std::size_t, std::size_t>> expected;
  for (const auto& run : label_runs(labels)) expected.emplace_back(run.first, run.second);
  std::vector<std::pair<std::size_t, std::size_t>> found;
  const std::regex rect(R"re(class="gt" data-start="(\d+)" data-end="(\d+)")re");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), rect); it != std::sregex_iterator(); ++it) {
    found.emplace_back(std::stoul((*it)[1]), std::stoul((*it)[2]));
  }
  EXPECT_EQ(found, expected);
  EXPECT_EQ(found.size(), 2u);
  EXPECT_TRUE(contains(svg, "<polyline class=\"score\""));
}

TEST(Cli, PlotRejectsMismatchedLabels) {
  const auto& w = workspace();
  testing::write_bytes(w.dir / "short.csv", "0,1,0\n");
  const auto r = nnc({"plot", "--scores", w.path("scores.csv"), "--labels", w.path("short.csv"), "--out",
                      w.path("p.svg")});
  EXPECT_EQ(r.code, kExitInput);
}

TEST(Cli, EvalNeedsGroundTruth) {
  const auto& w = workspace();
  EXPECT_EQ(nnc({"eval", "--scores", w.path("scores.csv")}).code, kExitInput);
  EXPECT_EQ(nnc({"eval", "--scores", w.path("absent.csv"), "--labels", w.path("labels.csv")}).code, kExitInput);
}

int exit_status(const std::string& command) {
  const int raw = std::system(command.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

TEST(Cli, BinaryExitCodes) {
  const std::string tool = NNC_CLI_PATH;
  TempDir dir;
  EXPECT_EQ(exit_status(tool + " --help > /dev/null"), 0);
  EXPECT_EQ(exit_status(tool + " train --video /no/such/dir --out " + (dir / "m").string() + " 2> /dev/null"), 2);
  EXPECT_EQ(exit_status(tool + " bogus 2> /dev/null"), 2);
  FrameSequence seq;
  for (int t = 0; t < 6; ++t) seq.frames.emplace_back(160, 120, t, 0.25f);
  save_raw_gray(seq, dir / "s.nncv");
  EXPECT_EQ(exit_status(tool + " train --video " + (dir / "s.nncv").string() + " --out " + (dir / "m").string() +
                        " 2> /dev/null"),
            1);
}

}  // namespace
}  // namespace nnc::cli
