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

#include "commands.hpp"

#include <omp.h>

#include <chrono>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "nnc/augment.hpp"
#include "nnc/cubes.hpp"
#include "nnc/detect.hpp"
#include "nnc/error.hpp"
#include "nnc/eval.hpp"
#include "nnc/synth.hpp"
#include "svg_plot.hpp"

namespace nnc::cli {

namespace fs = std::filesystem;

namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    fn();
    return kExitOk;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

void require_file(const fs::path& path, const std::string& what) {
  if (!fs::exists(path)) throw InputError(what + " not found: " + path.string());
}

std::unique_ptr<augment::AppearanceProvider> make_provider(AppearanceSource source,
                                                           const std::optional<fs::path>& features,
                                                           const FrameSequence& working) {
  switch (source) {
    case AppearanceSource::kNone:
      return std::make_unique<augment::ZeroAppearanceProvider>();
    case AppearanceSource::kHandcrafted:
      return std::make_unique<augment::HandcraftedAppearanceProvider>(working);
    case AppearanceSource::kFile:
      if (!features) throw InputError("appearance source 'file' needs --features");
      require_file(*features, "feature file");
      return augment::file_appearance_provider(*features);
  }
  throw InputError("unknown appearance source");
}

std::vector<double> pick_series(const detect::FrameScoreSeries& s, const std::string& name) {
  if (name == "normalized") return s.normalized;
  if (name == "smoothed") return s.smoothed;
  if (name == "raw") return s.raw;
  throw InputError("unknown series '" + name + "' (expected raw, smoothed or normalized)");
}

}  // namespace

FrameSequence load_video(const fs::path& path, const std::string& format) {
  require_file(path, "video");
  FrameFormat fmt_kind = FrameFormat::kRawGray;
  if (format == "auto") {
    if (fs::is_directory(path)) {
      fmt_kind = FrameFormat::kPgmDir;
      for (const auto& entry : fs::directory_iterator(path)) {
        if (entry.path().extension() == ".png") {
          fmt_kind = FrameFormat::kPngDir;
          break;
        }
      }
    }
  } else {
    fmt_kind = parse_frame_format(format);
  }
  return load_sequence(path, fmt_kind);
}

FrameSequence to_working_size(const FrameSequence& seq) {
  if (seq.width() == cubes::kFrameWidth && seq.height() == cubes::kFrameHeight) return seq;
  return resize_sequence(seq, cubes::kFrameWidth, cubes::kFrameHeight, Interpolation::kBilinear);
}

int cmd_train(const TrainArgs& args, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    cfg.validate();
    const auto working = to_working_size(load_video(args.video, args.format));
    const auto provider = make_provider(cfg.appearance, args.features, working);
    out << fmt::format("training on {} frames ({}x{} working size), appearance = {}\n", working.size(),
                       working.width(), working.height(), to_string(cfg.appearance));
    out << fmt::format("nu = {:g}, restarts = {}, min_cluster_size = {}, samples_per_cluster = {}, seed = {}\n",
                       cfg.nu, cfg.restarts, cfg.min_cluster_size, cfg.samples_per_cluster, cfg.seed);
    const auto result = detect::train(working, *provider, cfg);
    const auto& rep = result.report;
    out << fmt::format("active cubes: {}\n", rep.n_cubes);
    out << fmt::format("k = {}, r = {} retained, energy = {:.6g}\n", rep.k, rep.r, rep.energy);
    for (std::size_t j = 0; j < rep.clusters.size(); ++j) {
      const auto& c = rep.clusters[j];
      if (c.retained) {
        out << fmt::format("  cluster {:3d}: size {:7d} retained, outliers {:.4f}, support {:.4f}{}\n", j,
                           c.size, c.outlier_fraction, c.support_fraction,
                           c.nu_property_holds ? "" : " (nu-property violated)");
      } else {
        out << fmt::format("  cluster {:3d}: size {:7d} pruned\n", j, c.size);
      }
    }
    detect::save_model(result.model, args.out_model);
    out << fmt::format("wrote model {}\n", args.out_model.string());
  });
}

int cmd_score(const ScoreArgs& args, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    cfg.validate();
    require_file(args.model, "model");
    const auto model = detect::load_model(args.model);
    const auto working = to_working_size(load_video(args.video, args.format));
    const auto provider = make_provider(model.config.appearance, args.features, working);
    const auto start = std::chrono::steady_clock::now();
    const auto result = detect::score_sequence(model, working, *provider, cfg);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    detect::write_scores_csv(result.series, args.out_scores);
    if (args.out_maps) detect::write_maps(result.maps, *args.out_maps);
    const double fps = seconds > 0 ? static_cast<double>(working.size()) / seconds : 0.0;
    out << fmt::format("scored {} frames ({} maps computed) in {:.3f} s: {:.1f} FPS\n", working.size(),
                       result.computed_frames, seconds, fps);
    out << fmt::format("wrote scores {}\n", args.out_scores.string());
    if (args.out_maps) out << fmt::format("wrote maps {}\n", args.out_maps->string());
  });
}

int cmd_eval(const EvalArgs& args, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    cfg.validate();
    require_file(args.scores, "score file");
    if (!args.labels && !args.masks) throw InputError("eval needs --labels and/or --masks");
    if (args.labels) require_file(*args.labels, "label file");
    if (args.masks) require_file(*args.masks, "mask file");
    if (args.maps && !args.masks) throw InputError("pixel-level evaluation needs --masks");
    const auto series = detect::read_scores_csv(args.scores);
    const auto truth = eval::load_ground_truth(args.labels, args.masks, series.smoothed.size());

    eval::EvalReport report;
    const auto frame_roc = eval::frame_level_auc(series.smoothed, truth.frame_labels);
    report.frame_auc = frame_roc.auc;
    out << fmt::format("frame_auc {:.6f}\n", frame_roc.auc);

    std::optional<eval::RocResult> pixel_roc;
    if (args.maps) {
      require_file(*args.maps, "map file");
      const auto maps = detect::read_maps(*args.maps);
      if (maps.size() != truth.frame_labels.size()) {
        throw InputError(fmt::format("map file has {} frames, ground truth has {}", maps.size(),
                                     truth.frame_labels.size()));
      }
      const auto pixels = eval::smooth_pixel_maps(
          eval::pixel_maps_from_grids(maps, truth.mask_width, truth.mask_height), cfg.sigma_s);
      pixel_roc = eval::pixel_level_auc(pixels, truth, cfg.max_thresholds);
      report.pixel_auc = pixel_roc->auc;
      out << fmt::format("pixel_auc {:.6f}\n", pixel_roc->auc);
    }
    if (args.out_report) {
      eval::write_report(report, *args.out_report, args.curves ? &frame_roc : nullptr,
                         args.curves && pixel_roc ? &*pixel_roc : nullptr);
      out << fmt::format("wrote report {}\n", args.out_report->string());
    }
  });
}

int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    SynthSpec spec;
    if (args.preset == "benchmark") {
      spec = benchmark_spec();
    } else if (args.preset == "training") {
      spec = benchmark_training_spec();
    } else {
      throw InputError("unknown preset '" + args.preset + "' (expected benchmark or training)");
    }
    if (args.seed) spec.seed = *args.seed;
    if (args.no_anomalies) spec.anomalies.clear();
    spec.validate();
    const auto video = generate(spec);
    save_raw_gray(video.frames, args.out_video);
    out << fmt::format("wrote {} frames ({}x{}, seed {}) to {}\n", video.frames.size(), spec.width, spec.height,
                       spec.seed, args.out_video.string());
    if (args.out_labels) {
      const bool masks = args.out_masks && video.truth.has_masks();
      eval::write_ground_truth(video.truth, *args.out_labels, masks ? args.out_masks : std::nullopt);
      std::size_t positives = 0;
      for (auto l : video.truth.frame_labels) positives += l;
      out << fmt::format("wrote labels {} ({} anomalous frames)\n", args.out_labels->string(), positives);
      if (masks) out << fmt::format("wrote masks {}\n", args.out_masks->string());
    } else if (args.out_masks) {
      throw InputError("--masks requires --labels");
    }
  });
}

int cmd_plot(const PlotArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_file(args.scores, "score file");
    const auto series = detect::read_scores_csv(args.scores);
    const auto values = pick_series(series, args.series);
    std::vector<std::uint8_t> labels;
    if (args.labels) {
      require_file(*args.labels, "label file");
      labels = eval::load_ground_truth(args.labels, std::nullopt, values.size()).frame_labels;
    }
    PlotOptions opts;
    opts.title = args.title;
    const auto svg = render_timeline(values, labels, opts);
    std::ofstream file(args.out_svg, std::ios::binary);
    if (!file) throw InputError("cannot write " + args.out_svg.string());
    file << svg;
    if (!file) throw InputError("failed writing " + args.out_svg.string());
    out << fmt::format("wrote plot {} ({} frames, {} ground-truth intervals)\n", args.out_svg.string(),
                       values.size(), label_runs(labels).size());
  });
}

namespace {

constexpr const char* kPublished = "published setting";
constexpr const char* kChosen = "implementation choice";

// Collects flag values during parsing and applies them after the config
// file, so explicit flags win regardless of their position on the line.
struct Overrides {
  std::optional<std::string> config_path;
  int threads = -1;
  std::vector<std::function<void(RunConfig&)>> setters;

  RunConfig resolve() const {
    RunConfig cfg = config_path ? RunConfig::load(*config_path) : RunConfig{};
    for (const auto& set : setters) set(cfg);
    if (threads >= 0) cfg.threads = threads;
    cfg.validate();
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
    return cfg;
  }
};

template <typename T>
std::string show(const T& v) {
  return fmt::format("{}", v);
}

template <typename T>
void tunable(CLI::App* app, Overrides& ov, const std::string& flag, T RunConfig::*field, const std::string& what,
             const char* origin) {
  const RunConfig defaults;
  app->add_option_function<T>(
      flag, [&ov, field](const T& v) { ov.setters.push_back([field, v](RunConfig& c) { c.*field = v; }); },
      fmt::format("{} [default {}; {}]", what, show(defaults.*field), origin));
}

void common_options(CLI::App* app, Overrides& ov) {
  app->add_option_function<std::string>(
      "--config", [&ov](const std::string& p) { ov.config_path = p; },
      "INI file applied over the defaults; flags override it");
  app->add_option("--threads", ov.threads, "worker threads [default: all cores; 0 = all]")->check(CLI::NonNegativeNumber);
}

void feature_options(CLI::App* app, Overrides& ov) {
  tunable(app, ov, "--tau", &RunConfig::tau_static, "static-cube threshold on the raw gradient norm", kChosen);
  app->add_option_function<std::string>(
      "--appearance",
      [&ov](const std::string& v) {
        ov.setters.push_back([v](RunConfig& c) { c.appearance = parse_appearance_source(v); });
      },
      fmt::format("appearance channels: none, handcrafted or file [default {}; {}]",
                  to_string(RunConfig{}.appearance), kChosen));
  app->add_flag_callback(
      "--no-normalize-direction", [&ov] { ov.setters.push_back([](RunConfig& c) { c.normalize_direction = false; }); },
      fmt::format("leave the direction block unnormalized [default normalized; {}]", kChosen));
  app->add_flag_callback(
      "--no-normalize-appearance",
      [&ov] { ov.setters.push_back([](RunConfig& c) { c.normalize_appearance = false; }); },
      fmt::format("leave the appearance block unnormalized [default normalized; {}]", kChosen));
  tunable(app, ov, "--seed", &RunConfig::seed, "random seed", kChosen);
}

const char* kFooter =
    "Settings precedence: built-in defaults < --config file < command-line flags.\n"
    "Exit codes: 0 success, 1 internal error, 2 usage or input error.";

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Narrowed normality clusters: video anomaly detection", "nnc"};
  app.footer(kFooter);
  app.require_subcommand(1);

  Overrides ov;
  TrainArgs train_args;
  ScoreArgs score_args;
  EvalArgs eval_args;
  SynthArgs synth_args;
  PlotArgs plot_args;

  auto* train = app.add_subcommand("train", "fit a normality model on normal video");
  train->footer(kFooter);
  train->add_option("--video", train_args.video, "PGM/PNG directory or NNCV file")->required();
  train->add_option("--format", train_args.format, "auto, pgm-dir, png-dir or raw-gray")->capture_default_str();
  train->add_option("--features", train_args.features, "NNCF appearance file (with --appearance file)");
  train->add_option("--out", train_args.out_model, "model output path (NNCM)")->required();
  common_options(train, ov);
  feature_options(train, ov);
  tunable(train, ov, "--stride", &RunConfig::train_stride, "temporal stride between training cubes", kChosen);
  tunable(train, ov, "--samples-per-cluster", &RunConfig::samples_per_cluster, "k = n / this", kPublished);
  tunable(train, ov, "--k", &RunConfig::k, "fixed number of clusters (0 = derive from samples)", kChosen);
  tunable(train, ov, "--min-cluster-size", &RunConfig::min_cluster_size, "prune clusters smaller than this",
          kPublished);
  tunable(train, ov, "--restarts", &RunConfig::restarts, "k-means restarts", kPublished);
  tunable(train, ov, "--kmeans-max-iter", &RunConfig::kmeans_max_iter, "Lloyd iteration cap", kChosen);
  tunable(train, ov, "--kmeans-tol", &RunConfig::kmeans_tol, "relative energy improvement to stop", kChosen);
  tunable(train, ov, "--nu", &RunConfig::nu, "one-class SVM regularization", kPublished);
  tunable(train, ov, "--svm-tol", &RunConfig::svm_tol, "SMO KKT tolerance", kChosen);
  tunable(train, ov, "--svm-max-iter", &RunConfig::svm_max_iter, "SMO pair-update cap", kChosen);

  auto* score = app.add_subcommand("score", "score a video with a trained model");
  score->footer(kFooter);
  score->add_option("--video", score_args.video, "PGM/PNG directory or NNCV file")->required();
  score->add_option("--format", score_args.format, "auto, pgm-dir, png-dir or raw-gray")->capture_default_str();
  score->add_option("--model", score_args.model, "NNCM model file")->required();
  score->add_option("--features", score_args.features, "NNCF appearance file for file-appearance models");
  score->add_option("--out", score_args.out_scores, "score CSV output path")->required();
  score->add_option("--maps", score_args.out_maps, "optional NNCG anomaly-map output path");
  common_options(score, ov);
  score->add_option_function<std::string>(
      "--missing-appearance",
      [&ov](const std::string& v) {
        ov.setters.push_back([v](RunConfig& c) { c.missing_appearance = parse_missing_appearance(v); });
      },
      fmt::format("frames without appearance data: fail or zeros [default {}; {}]",
                  to_string(RunConfig{}.missing_appearance), kChosen));
  tunable(score, ov, "--stride", &RunConfig::test_stride, "score one in this many frames", kPublished);
  tunable(score, ov, "--sigma-t", &RunConfig::sigma_t, "temporal smoothing sigma in frames", kChosen);

  auto* evaluate = app.add_subcommand("eval", "frame- and pixel-level ROC AUC");
  evaluate->footer(kFooter);
  evaluate->add_option("--scores", eval_args.scores, "score CSV from `nnc score`")->required();
  evaluate->add_option("--maps", eval_args.maps, "NNCG map file for pixel-level AUC");
  evaluate->add_option("--labels", eval_args.labels, "frame label CSV");
  evaluate->add_option("--masks", eval_args.masks, "pixel masks (NNCV file or PGM directory)");
  evaluate->add_option("--out", eval_args.out_report, "report CSV output path");
  evaluate->add_flag("--curves", eval_args.curves, "append ROC curve points to the report");
  common_options(evaluate, ov);
  tunable(evaluate, ov, "--sigma-s", &RunConfig::sigma_s, "spatial smoothing sigma in pixels", kChosen);
  tunable(evaluate, ov, "--max-thresholds", &RunConfig::max_thresholds, "pixel ROC threshold cap (0 = all)",
          kChosen);

  auto* synth = app.add_subcommand("synth", "write a synthetic benchmark video and its ground truth");
  synth->footer(kFooter);
  synth->add_option("--preset", synth_args.preset, "benchmark or training")->capture_default_str();
  synth->add_option("--seed", synth_args.seed, "override the preset's seed");
  synth->add_flag("--no-anomalies", synth_args.no_anomalies, "drop the anomaly bursts");
  synth->add_option("--out", synth_args.out_video, "NNCV video output path")->required();
  synth->add_option("--labels", synth_args.out_labels, "frame label CSV output path");
  synth->add_option("--masks", synth_args.out_masks, "NNCV mask output path");

  auto* plot = app.add_subcommand("plot", "render the score timeline as SVG");
  plot->footer(kFooter);
  plot->add_option("--scores", plot_args.scores, "score CSV")->required();
  plot->add_option("--labels", plot_args.labels, "frame label CSV; abnormal runs are shaded");
  plot->add_option("--out", plot_args.out_svg, "SVG output path")->required();
  plot->add_option("--series", plot_args.series, "raw, smoothed or normalized")->capture_default_str();
  plot->add_option("--title", plot_args.title, "plot title")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    err << "run with --help for usage\n";
    return kExitInput;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  if (synth->parsed()) return cmd_synth(synth_args, out, err);
  if (plot->parsed()) return cmd_plot(plot_args, out, err);

  RunConfig cfg;
  try {
    cfg = ov.resolve();
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  if (train->parsed()) return cmd_train(train_args, cfg, out, err);
  if (score->parsed()) return cmd_score(score_args, cfg, out, err);
  return cmd_eval(eval_args, cfg, out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("nnc");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace nnc::cli
