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

#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace exsteklov::app {

namespace {

constexpr double kWidth = 720.0, kHeight = 480.0;
constexpr double kLeft = 80.0, kRight = 170.0, kTop = 40.0, kBottom = 60.0;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double x) {
    if (!std::isfinite(x)) return;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  void settle() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-300) {
      const double pad = std::max(1.0, std::abs(lo)) * 0.5;
      lo -= pad;
      hi += pad;
    }
  }
};

}  // namespace

std::string render_svg(const SvgPlot& plot) {
  auto ymap = [&](double y) { return plot.log_y ? std::log10(y) : y; };
  Range xr, yr;
  for (const auto& s : plot.series) {
    for (auto [x, y] : s.points) {
      if (plot.log_y && !(y > 0.0)) continue;
      xr.add(x);
      yr.add(ymap(y));
    }
  }
  xr.settle();
  yr.settle();

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto sy = [&](double y) { return kTop + ph - (ymap(y) - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  if (!plot.metadata.empty()) {
    os << "<!--\n";
    for (const auto& [k, v] : plot.metadata) os << "  " << k << "=" << v << "\n";
    os << "-->\n";
  }
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\" font-family=\"sans-serif\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
     << escape(plot.title) << "</text>\n";
  os << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
     << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / 5.0;
    const double px = sx(fx);
    os << "<line x1=\"" << num(px) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(px)
       << "\" y2=\"" << num(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(px) << "\" y=\"" << num(kTop + ph + 20)
       << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(fx) << "</text>\n";
    const double fy = yr.lo + (yr.hi - yr.lo) * i / 5.0;
    const double py = kTop + ph - (fy - yr.lo) / (yr.hi - yr.lo) * ph;
    os << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(py) << "\" x2=\"" << num(kLeft)
       << "\" y2=\"" << num(py) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py + 4)
       << "\" text-anchor=\"end\" font-size=\"11\">"
       << tick_label(plot.log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
  }
  os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 18)
     << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(plot.x_label) << "</text>\n";
  os << "<text transform=\"translate(18," << num(kTop + ph / 2)
     << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" << escape(plot.y_label)
     << "</text>\n";

  int row = 0;
  for (const auto& s : plot.series) {
    if (s.markers) {
      for (auto [x, y] : s.points) {
        if (plot.log_y && !(y > 0.0)) continue;
        os << "<circle cx=\"" << num(sx(x)) << "\" cy=\"" << num(sy(y)) << "\" r=\"3\" fill=\""
           << s.color << "\" fill-opacity=\"0.7\"/>\n";
      }
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (auto [x, y] : s.points) {
        if (plot.log_y && !(y > 0.0)) continue;
        os << num(sx(x)) << "," << num(sy(y)) << " ";
      }
      os << "\"/>\n";
    }
    const double ly = kTop + 14 + 18 * row++;
    const double lx = kLeft + pw + 12;
    os << "<rect x=\"" << num(lx) << "\" y=\"" << num(ly - 9) << "\" width=\"12\" height=\"10\" fill=\""
       << s.color << "\"/>\n";
    os << "<text x=\"" << num(lx + 18) << "\" y=\"" << num(ly) << "\" font-size=\"12\">"
       << escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_svg(const std::string& path, const SvgPlot& plot) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << render_svg(plot);
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace exsteklov::app
