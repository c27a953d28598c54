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

#include "svg_plot.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "nnc/error.hpp"

namespace nnc::cli {

std::vector<std::pair<int, int>> label_runs(std::span<const std::uint8_t> labels) {
  std::vector<std::pair<int, int>> runs;
  const int n = static_cast<int>(labels.size());
  for (int i = 0; i < n;) {
    if (!labels[i]) {
      ++i;
      continue;
    }
    int j = i;
    while (j < n && labels[j]) ++j;
    runs.emplace_back(i, j);
    i = j;
  }
  return runs;
}

namespace {

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_timeline(std::span<const double> scores, std::span<const std::uint8_t> labels,
                            const PlotOptions& options) {
  if (scores.empty()) throw InputError("cannot plot an empty score series");
  if (!labels.empty() && labels.size() != scores.size()) {
    throw InputError(fmt::format("label count {} does not match score count {}", labels.size(), scores.size()));
  }
  constexpr double kLeft = 48, kRight = 16, kTop = 28, kBottom = 36;
  const double plot_w = options.width - kLeft - kRight;
  const double plot_h = options.height - kTop - kBottom;
  const double n = static_cast<double>(scores.size());
  auto x_of = [&](double frame) { return kLeft + plot_w * frame / std::max(1.0, n - 1); };
  auto y_of = [&](double v) { return kTop + plot_h * (1.0 - std::clamp(v, 0.0, 1.0)); };

  std::string svg = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">{3}</text>\n",
      options.width, options.height, kLeft, escape(options.title));

  // Each run covers its frames' full slots so single-frame runs stay visible.
  const double slot = plot_w / std::max(1.0, n - 1);
  for (const auto& [start, end] : label_runs(labels)) {
    const double x0 = std::max(kLeft, x_of(start) - slot / 2);
    const double x1 = std::min(kLeft + plot_w, x_of(end - 1) + slot / 2);
    svg += fmt::format(
        "<rect class=\"gt\" data-start=\"{}\" data-end=\"{}\" x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" "
        "height=\"{:.2f}\" fill=\"#ffc0cb\" fill-opacity=\"0.8\"/>\n",
        start, end, x0, kTop, std::max(0.5, x1 - x0), plot_h);
  }

  svg += fmt::format(
      "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" stroke=\"#444\"/>\n",
      kLeft, kTop, plot_w, plot_h);
  for (double tick : {0.0, 0.5, 1.0}) {
    svg += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"10\" "
        "text-anchor=\"end\">{:.1f}</text>\n",
        kLeft - 6, y_of(tick) + 3, tick);
  }
  svg += fmt::format(
      "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"10\">0</text>\n"
      "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"10\" "
      "text-anchor=\"end\">{}</text>\n",
      kLeft, kTop + plot_h + 14, kLeft + plot_w, kTop + plot_h + 14, scores.size() - 1);

  svg += "<polyline class=\"score\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i) svg += ' ';
    svg += fmt::format("{:.2f},{:.2f}", x_of(static_cast<double>(i)), y_of(scores[i]));
  }
  svg += "\"/>\n</svg>\n";
  return svg;
}

}  // namespace nnc::cli
