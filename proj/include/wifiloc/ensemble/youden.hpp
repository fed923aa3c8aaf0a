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

#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "wifiloc/classifiers/common.hpp"
#include "wifiloc/error.hpp"

namespace wifiloc {

/// TP / (TP + FN) for class y. Empty when y never occurs in the reference
/// labels (the statistic is undefined there).
inline std::optional<double> sensitivity(std::span<const int> predictions,
                                         std::span<const int> labels, int y) {
  if (predictions.size() != labels.size() || labels.empty())
    throw DataError("sensitivity: prediction/label size mismatch");
  std::size_t tp = 0, fn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != y) continue;
    if (predictions[i] == y)
      ++tp;
    else
      ++fn;
  }
  if (tp + fn == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

/// TN / (TN + FP) for class y. Empty when every reference label is y.
inline std::optional<double> specificity(std::span<const int> predictions,
                                         std::span<const int> labels, int y) {
  if (predictions.size() != labels.size() || labels.empty())
    throw DataError("specificity: prediction/label size mismatch");
  std::size_t tn = 0, fp = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == y) continue;
    if (predictions[i] == y)
      ++fp;
    else
      ++tn;
  }
  if (tn + fp == 0) return std::nullopt;
  return static_cast<double>(tn) / static_cast<double>(tn + fp);
}

/// The informedness statistic: sensitivity + specificity - 1, in [-1, 1].
inline double youden(double sens, double spec) { return sens + spec - 1.0; }

/// Informedness of every (algorithm, location) pair, measured on validation
/// predictions. Undefined entries are stored as 0 and reported as warnings
/// by the trainer.
struct YoudenMatrix {
  std::vector<Algorithm> algorithms;       // row order
  std::vector<int> locations;              // column order, ascending ids
  std::vector<std::vector<double>> values; // [algorithm][location]

  double at(std::size_t algorithm_index, std::size_t location_index) const {
    return values[algorithm_index][location_index];
  }

  double mean() const {
    double acc = 0;
    std::size_t n = 0;
    for (const auto& row : values)
      for (double v : row) {
        acc += v;
        ++n;
      }
    return n ? acc / static_cast<double>(n) : 0.0;
  }

  friend bool operator==(const YoudenMatrix& a, const YoudenMatrix& b) {
    return a.algorithms == b.algorithms && a.locations == b.locations && a.values == b.values;
  }
};

inline nlohmann::json to_json(const YoudenMatrix& m) {
  nlohmann::json algorithms = nlohmann::json::array();
  for (Algorithm a : m.algorithms) algorithms.push_back(algorithm_name(a));
  return {{"algorithms", algorithms}, {"locations", m.locations}, {"values", m.values}};
}

inline YoudenMatrix youden_matrix_from_json(const nlohmann::json& j) {
  YoudenMatrix m;
  for (const auto& name : j.at("algorithms"))
    m.algorithms.push_back(algorithm_from_name(name.get<std::string>()));
  m.locations = j.at("locations").get<std::vector<int>>();
  m.values = j.at("values").get<std::vector<std::vector<double>>>();
  if (m.values.size() != m.algorithms.size())
    throw IoError("youden matrix row count mismatch");
  for (const auto& row : m.values)
    if (row.size() != m.locations.size()) throw IoError("youden matrix column count mismatch");
  return m;
}

}  // namespace wifiloc
