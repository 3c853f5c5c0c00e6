/*
 * Copyright 2026 The selqa Authors.
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

#include "selqa/report/svg.hpp"

#include <algorithm>
#include <cstdio>

#include "selqa/nn/error.hpp"

namespace selqa::report {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 64.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 52.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

std::string LinePlotSvg(const PlotSpec& plot, const std::vector<Series>& series) {
  if (series.empty()) throw ValidationError("plot needs at least one series");
  if (!(plot.x_max > plot.x_min) || !(plot.y_max > plot.y_min)) {
    throw ValidationError("plot axis range is empty");
  }
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) {
    return kLeft + (std::clamp(x, plot.x_min, plot.x_max) - plot.x_min) /
                       (plot.x_max - plot.x_min) * pw;
  };
  auto py = [&](double y) {
    return kTop + ph - (std::clamp(y, plot.y_min, plot.y_max) - plot.y_min) /
                           (plot.y_max - plot.y_min) * ph;
  };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + Fixed(kWidth) +
       "\" height=\"" + Fixed(kHeight) + "\" viewBox=\"0 0 " + Fixed(kWidth) +
       " " + Fixed(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<title>" + Escape(plot.title) + "</title>\n";
  if (!plot.note.empty()) s += "<desc>" + Escape(plot.note) + "</desc>\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + Fixed(kWidth) + "\" height=\"" +
       Fixed(kHeight) + "\" fill=\"white\"/>\n";
  s += "<text x=\"" + Fixed(kLeft) + "\" y=\"24.00\" font-size=\"14\">" +
       Escape(plot.title) + "</text>\n";

  // Grid and tick labels at fifths of each axis.
  for (int i = 0; i <= 5; ++i) {
    const double fx = plot.x_min + (plot.x_max - plot.x_min) * i / 5.0;
    const double fy = plot.y_min + (plot.y_max - plot.y_min) * i / 5.0;
    s += "<line x1=\"" + Fixed(px(fx)) + "\" y1=\"" + Fixed(kTop) + "\" x2=\"" +
         Fixed(px(fx)) + "\" y2=\"" + Fixed(kTop + ph) +
         "\" stroke=\"#e0e0e0\"/>\n";
    s += "<line x1=\"" + Fixed(kLeft) + "\" y1=\"" + Fixed(py(fy)) + "\" x2=\"" +
         Fixed(kLeft + pw) + "\" y2=\"" + Fixed(py(fy)) +
         "\" stroke=\"#e0e0e0\"/>\n";
    s += "<text x=\"" + Fixed(px(fx)) + "\" y=\"" + Fixed(kTop + ph + 16) +
         "\" text-anchor=\"middle\">" + Fixed(fx) + "</text>\n";
    s += "<text x=\"" + Fixed(kLeft - 6) + "\" y=\"" + Fixed(py(fy) + 4) +
         "\" text-anchor=\"end\">" + Fixed(fy) + "</text>\n";
  }
  s += "<rect x=\"" + Fixed(kLeft) + "\" y=\"" + Fixed(kTop) + "\" width=\"" +
       Fixed(pw) + "\" height=\"" + Fixed(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  s += "<text x=\"" + Fixed(kLeft + pw / 2) + "\" y=\"" + Fixed(kHeight - 12) +
       "\" text-anchor=\"middle\">" + Escape(plot.x_label) + "</text>\n";
  s += "<text x=\"16.00\" y=\"" + Fixed(kTop + ph / 2) +
       "\" text-anchor=\"middle\" transform=\"rotate(-90 16.00 " +
       Fixed(kTop + ph / 2) + ")\">" + Escape(plot.y_label) + "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::string color = kPalette[i % std::size(kPalette)];
    std::vector<std::string> runs(1);
    for (const auto& [x, y] : series[i].points) {
      if (!y) {
        if (!runs.back().empty()) runs.emplace_back();
        continue;
      }
      if (!runs.back().empty()) runs.back() += ' ';
      runs.back() += Fixed(px(x)) + "," + Fixed(py(*y));
    }
    for (const auto& run : runs) {
      if (run.empty()) continue;
      s += "<polyline fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"2\" points=\"" + run + "\"/>\n";
    }
    const double ly = kTop + 14.0 + 18.0 * static_cast<double>(i);
    s += "<line x1=\"" + Fixed(kLeft + pw + 12) + "\" y1=\"" + Fixed(ly - 4) +
         "\" x2=\"" + Fixed(kLeft + pw + 32) + "\" y2=\"" + Fixed(ly - 4) +
         "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + Fixed(kLeft + pw + 38) + "\" y=\"" + Fixed(ly) + "\">" +
         Escape(series[i].name) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace selqa::report
