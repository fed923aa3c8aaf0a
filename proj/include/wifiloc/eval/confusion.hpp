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

#include <map>
#include <span>
#include <vector>

#include <json.hpp>

#include "wifiloc/error.hpp"

namespace wifiloc {

/// Row-normalized confusion matrix: entry (i, j) is the fraction of test
/// points with true location i that were classified as j. Rows without any
/// test point stay all-zero; `row_counts` tells them apart.
struct ConfusionMatrix {
  std::vector<int> locations;                // ascending ids, rows == columns
  std::vector<std::vector<double>> ratios;   // [true][predicted]
  std::vector<std::size_t> row_counts;       // test points per true location

  /// Test-count-weighted diagonal: the overall accuracy.
  double accuracy() const {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < locations.size(); ++i) {
      num += static_cast<double>(row_counts[i]) * ratios[i][i];
      den += static_cast<double>(row_counts[i]);
    }
    return den > 0 ? num / den : 0.0;
  }

  double at(int true_location, int predicted_location) const {
    return ratios[index_of(true_location)][index_of(predicted_location)];
  }

  /// Off-diagonal mass of one row (how much of this location leaks away).
  double off_diagonal_row_mass(int true_location) const {
    const std::size_t i = index_of(true_location);
    double acc = 0;
    for (std::size_t j = 0; j < locations.size(); ++j)
      if (j != i) acc += ratios[i][j];
    return acc;
  }

  std::size_t index_of(int location) const {
    for (std::size_t i = 0; i < locations.size(); ++i)
      if (locations[i] == location) return i;
    throw DataError("location " + std::to_string(location) + " not in confusion matrix");
  }

  friend bool operator==(const ConfusionMatrix& a, const ConfusionMatrix& b) {
    return a.locations == b.locations && a.ratios == b.ratios && a.row_counts == b.row_counts;
  }
};

inline ConfusionMatrix make_confusion(std::span<const int> labels, std::span<const int> preds,
                                      const std::vector<int>& locations) {
  if (labels.size() != preds.size()) throw DataError("confusion: label/prediction mismatch");
  ConfusionMatrix cm;
  cm.locations = locations;
  cm.ratios.assign(locations.size(), std::vector<double>(locations.size(), 0.0));
  cm.row_counts.assign(locations.size(), 0);
  std::map<int, std::size_t> index;
  for (std::size_t i = 0; i < locations.size(); ++i) index[locations[i]] = i;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::size_t r = index.at(labels[i]);
    const std::size_t c = index.at(preds[i]);
    cm.ratios[r][c] += 1.0;
    ++cm.row_counts[r];
  }
  for (std::size_t r = 0; r < locations.size(); ++r)
    if (cm.row_counts[r])
      for (double& v : cm.ratios[r]) v /= static_cast<double>(cm.row_counts[r]);
  return cm;
}

/// Element-wise mean over repeats; row counts accumulate.
inline ConfusionMatrix mean_confusion(const std::vector<ConfusionMatrix>& repeats) {
  if (repeats.empty()) throw DataError("no confusion matrices to average");
  ConfusionMatrix mean = repeats.front();
  for (std::size_t k = 1; k < repeats.size(); ++k) {
    if (repeats[k].locations != mean.locations)
      throw DataError("confusion matrices cover different location sets");
    for (std::size_t r = 0; r < mean.ratios.size(); ++r) {
      for (std::size_t c = 0; c < mean.ratios.size(); ++c)
        mean.ratios[r][c] += repeats[k].ratios[r][c];
      mean.row_counts[r] += repeats[k].row_counts[r];
    }
  }
  for (auto& row : mean.ratios)
    for (double& v : row) v /= static_cast<double>(repeats.size());
  return mean;
}

inline nlohmann::json to_json(const ConfusionMatrix& cm) {
  return {{"locations", cm.locations}, {"ratios", cm.ratios}, {"row_counts", cm.row_counts}};
}

inline ConfusionMatrix confusion_from_json(const nlohmann::json& j) {
  ConfusionMatrix cm;
  cm.locations = j.at("locations").get<std::vector<int>>();
  cm.ratios = j.at("ratios").get<std::vector<std::vector<double>>>();
  cm.row_counts = j.at("row_counts").get<std::vector<std::size_t>>();
  if (cm.ratios.size() != cm.locations.size() || cm.row_counts.size() != cm.locations.size())
    throw IoError("confusion matrix shape mismatch");
  return cm;
}

}  // namespace wifiloc
