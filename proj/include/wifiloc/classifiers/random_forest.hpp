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

#include <cmath>
#include <vector>

#include "wifiloc/classifiers/decision_tree.hpp"

namespace wifiloc {

/// Bagged CART trees with sqrt(d) random features per split; probability is
/// the arithmetic mean of the trees' leaf distributions.
class RandomForestClassifier final : public Classifier {
 public:
  explicit RandomForestClassifier(ForestParams params = {}) : params_(params) {
    if (params_.trees < 1) throw TrainError("random_forest: trees must be >= 1");
  }

  Algorithm algorithm() const override { return Algorithm::kRandomForest; }

  /// Per-tree leaf distributions for a query; predict_proba is their mean.
  std::vector<std::vector<double>> tree_distributions(std::span<const double> x) const {
    std::vector<std::vector<double>> out;
    out.reserve(trees_.size());
    for (const auto& tree : trees_) out.push_back(detail::tree_leaf_dist(tree, x));
    return out;
  }

 protected:
  void do_fit(const Matrix& x, const std::vector<int>& y, std::uint64_t seed) override {
    std::vector<std::size_t> targets(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) targets[i] = class_index(y[i]);

    detail::TreeGrower grower;
    grower.max_depth = params_.max_depth;
    grower.min_leaf = params_.min_leaf;
    grower.laplace = params_.laplace;
    grower.features_per_split = static_cast<std::size_t>(
        std::max(1.0, std::round(std::sqrt(static_cast<double>(x.cols())))));

    trees_.clear();
    trees_.reserve(static_cast<std::size_t>(params_.trees));
    for (int t = 0; t < params_.trees; ++t) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
      std::vector<std::size_t> bootstrap(x.rows());
      for (auto& row : bootstrap) row = static_cast<std::size_t>(rng.below(x.rows()));
      trees_.push_back(grower.grow(x, targets, classes_.size(), std::move(bootstrap), nullptr,
                                   &rng));
    }
  }

  std::vector<double> do_predict(std::span<const double> x) const override {
    std::vector<double> probs(classes_.size(), 0.0);
    for (const auto& tree : trees_) {
      const auto& dist = detail::tree_leaf_dist(tree, x);
      for (std::size_t c = 0; c < probs.size(); ++c) probs[c] += dist[c];
    }
    for (double& p : probs) p /= static_cast<double>(trees_.size());
    return probs;
  }

  nlohmann::json params_json() const override {
    return {{"trees", params_.trees},
            {"max_depth", params_.max_depth},
            {"min_leaf", params_.min_leaf},
            {"laplace", params_.laplace}};
  }

  nlohmann::json state_json() const override {
    nlohmann::json forest = nlohmann::json::array();
    for (const auto& tree : trees_) forest.push_back(detail::tree_to_json(tree));
    return {{"trees", std::move(forest)}};
  }

  void restore_state(const nlohmann::json& state) override {
    trees_.clear();
    for (const auto& tree : state.at("trees")) trees_.push_back(detail::tree_from_json(tree));
  }

 private:
  ForestParams params_;
  std::vector<std::vector<detail::TreeNode>> trees_;
};

}  // namespace wifiloc
