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

#ifndef SELQA_REPORT_SVG_HPP_
#define SELQA_REPORT_SVG_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace selqa::report {

struct Series {
  std::string name;
  // Points with an empty y break the line.
  std::vector<std::pair<double, std::optional<double>>> points;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  std::string note;  // written into <desc>
};

// Line chart with fixed geometry and two-decimal coordinates, so equal
// inputs give byte-identical output. Throws ValidationError on no series or
// an empty axis range.
std::string LinePlotSvg(const PlotSpec& plot, const std::vector<Series>& series);

}  // namespace selqa::report

#endif  // SELQA_REPORT_SVG_HPP_
