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
#include <numeric>
#include <vector>

#include "wifiloc/classifiers/common.hpp"

namespace wifiloc {

/// k-nearest neighbors with Euclidean distance on the raw dBm vectors.
/// Probability = vote fraction among the k nearest; equal distances at the
/// k-boundary are resolved by training row order.
class KnnClassifier final : public Classifier {
 public:
  explicit KnnClassifier(KnnParams params = {}) : params_(params) {
    if (params_.k < 1) throw TrainError("knn: k must be >= 1");
  }

  Algorithm algorithm() const override { return Algorithm::kKnn; }

 protected:
  void do_fit(const Matrix& x, const std::vector<int>& y, std::uint64_t) override {
    train_ = x;
    labels_ = y;
  }

  std::vector<double> do_predict(std::span<const double> x) const override {
    const std::size_t n = train_.rows();
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(params_.k), n);
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) dist[i] = {squared_distance(train_.row(i), x), i};
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    std::vector<double> probs(classes_.size(), 0.0);
    for (std::size_t i = 0; i < k; ++i)
      probs[class_index(labels_[dist[i].second])] += 1.0 / static_cast<double>(k);
    return probs;
  }

  nlohmann::json params_json() const override { return {{"k", params_.k}}; }

  nlohmann::json state_json() const override {
    return {{"rows", train_.rows()}, {"cols", train_.cols()}, {"data", train_.data()},
            {"labels", labels_}};
  }

  void restore_state(const nlohmann::json& state) override {
    train_ = Matrix(state.at("rows").get<std::size_t>(), state.at("cols").get<std::size_t>(),
                    state.at("data").get<std::vector<double>>());
    labels_ = state.at("labels").get<std::vector<int>>();
  }

 private:
  KnnParams params_;
  Matrix train_;
  std::vector<int> labels_;
};

}  // namespace wifiloc
