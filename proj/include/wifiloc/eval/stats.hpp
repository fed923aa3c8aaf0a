/*
 * wifiloc - Wi-Fi fingerprint indoor localization engine
 * Copyright 2026 The wifiloc Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <vector>

#include <json.hpp>

#include "wifiloc/error.hpp"

namespace wifiloc {

/// Quantile with linear interpolation between order statistics
/// (position p * (n - 1)); the convention used by every report here.
inline double quantile_linear(std::vector<double> values, double p) {
  if (values.empty()) throw DataError("quantile of empty sample");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

/// Accuracy of repeated evaluations: the boxplot numbers of the result
/// figures (mean, quartiles, extremes) plus the raw per-repeat values.
struct EvalStats {
  std::vector<double> values;  // in repeat order
  double mean = 0;
  double q25 = 0;
  double q75 = 0;
  double min = 0;
  double max = 0;

  static EvalStats from(std::vector<double> values) {
    if (values.empty()) throw DataError("no values to aggregate");
    EvalStats s;
    s.values = std::move(values);
    for (double v : s.values) s.mean += v;
    s.mean /= static_cast<double>(s.values.size());
    s.q25 = quantile_linear(s.values, 0.25);
    s.q75 = quantile_linear(s.values, 0.75);
    s.min = *std::min_element(s.values.begin(), s.values.end());
    s.max = *std::max_element(s.values.begin(), s.values.end());
    return s;
  }

  friend bool operator==(const EvalStats& a, const EvalStats& b) {
    return a.values == b.values && a.mean == b.mean && a.q25 == b.q25 && a.q75 == b.q75 &&
           a.min == b.min && a.max == b.max;
  }
};

inline nlohmann::json to_json(const EvalStats& s) {
  return {{"values", s.values}, {"mean", s.mean}, {"q25", s.q25},
          {"q75", s.q75},       {"min", s.min},   {"max", s.max}};
}

inline EvalStats eval_stats_from_json(const nlohmann::json& j) {
  auto s = EvalStats::from(j.at("values").get<std::vector<double>>());
  return s;
}

}  // namespace wifiloc
