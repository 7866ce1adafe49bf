// Copyright 2026 The MetaphorNet Authors.
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

#include "metaphornet/roc_svg.hpp"

#include <cstdio>
#include <sstream>

namespace metaphornet {

namespace {

constexpr double kLeft = 60.0;
constexpr double kTop = 40.0;
constexpr double kSize = 400.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

double px(double fpr) { return kLeft + fpr * kSize; }
double py(double tpr) { return kTop + (1.0 - tpr) * kSize; }

}  // namespace

std::string render_roc_svg(std::span<const RocPoint> points, double auc) {
  std::ostringstream svg;
  char title[64];
  std::snprintf(title, sizeof title, "ROC curve (AUC = %.3f)", auc);

  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"500\" height=\"500\" "
         "viewBox=\"0 0 500 500\">\n"
      << "  <title>" << title << "</title>\n"
      << "  <rect x=\"0\" y=\"0\" width=\"500\" height=\"500\" fill=\"white\"/>\n"
      << "  <text x=\"250\" y=\"25\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << title << "</text>\n";

  // Axes span [0,1] in both directions.
  svg << "  <g id=\"axes\" stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n"
      << "    <line x1=\"" << num(px(0)) << "\" y1=\"" << num(py(0)) << "\" x2=\"" << num(px(1))
      << "\" y2=\"" << num(py(0)) << "\"/>\n"
      << "    <line x1=\"" << num(px(0)) << "\" y1=\"" << num(py(0)) << "\" x2=\"" << num(px(0))
      << "\" y2=\"" << num(py(1)) << "\"/>\n"
      << "  </g>\n";
  svg << "  <g id=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = i / 4.0;
    svg << "    <text x=\"" << num(px(v)) << "\" y=\"" << num(py(0) + 16)
        << "\" text-anchor=\"middle\">" << num(v) << "</text>\n"
        << "    <text x=\"" << num(px(0) - 8) << "\" y=\"" << num(py(v) + 4)
        << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
  }
  svg << "  </g>\n";
  svg << "  <text x=\"" << num(px(0.5)) << "\" y=\"" << num(py(0) + 34)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
         "False positive rate</text>\n"
      << "  <text x=\"16\" y=\"" << num(py(0.5))
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 16 "
      << num(py(0.5)) << ")\">True positive rate</text>\n";
  svg << "  <line id=\"chance\" x1=\"" << num(px(0)) << "\" y1=\"" << num(py(0)) << "\" x2=\""
      << num(px(1)) << "\" y2=\"" << num(py(1))
      << "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";

  svg << "  <polyline id=\"roc\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0) svg << ' ';
    svg << num(px(points[i].fpr)) << ',' << num(py(points[i].tpr));
  }
  svg << "\"/>\n</svg>\n";
  return svg.str();
}

}  // namespace metaphornet
