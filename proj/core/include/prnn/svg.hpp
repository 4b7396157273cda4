// Copyright 2026 The prnn Authors.
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

// Minimal self-contained SVG charts.

#ifndef PRNN_SVG_HPP_
#define PRNN_SVG_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace prnn::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct BarGroup {
  std::string label;
  std::vector<double> values;  // one per series name
};

// Non-finite points are skipped. Throws ParameterError when there is nothing
// to draw or a series has mismatched x/y lengths.
std::string line_chart(std::string_view title, std::string_view x_label,
                       std::string_view y_label,
                       const std::vector<Series>& series);

std::string bar_chart(std::string_view title, std::string_view y_label,
                      const std::vector<std::string>& series_names,
                      const std::vector<BarGroup>& groups);

std::string escape(std::string_view text);

}  // namespace prnn::svg

#endif  // PRNN_SVG_HPP_
