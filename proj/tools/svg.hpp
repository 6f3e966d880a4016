// Copyright 2026 The exsteklov Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EXSTEKLOV_TOOLS_SVG_HPP_
#define EXSTEKLOV_TOOLS_SVG_HPP_

#include <string>
#include <utility>
#include <vector>

namespace exsteklov::app {

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool markers = false;  ///< scatter instead of polyline
  std::string color = "#1f77b4";
};

struct SvgPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<SvgSeries> series;
  /// Emitted as an XML comment ahead of the drawing.
  std::vector<std::pair<std::string, std::string>> metadata;
};

/// Standalone SVG document with axes, ticks and a legend.
std::string render_svg(const SvgPlot& plot);

/// Throws std::runtime_error when the file cannot be written.
void write_svg(const std::string& path, const SvgPlot& plot);

}  // namespace exsteklov::app

#endif  // EXSTEKLOV_TOOLS_SVG_HPP_
