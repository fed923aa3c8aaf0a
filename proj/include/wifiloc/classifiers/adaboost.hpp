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
#include <numeric>
#include <vector>

#include "wifiloc/classifiers/decision_tree.hpp"

namespace wifiloc {

/// Multiclass AdaBoost (SAMME) over shallow CART trees. The class scores
/// are the alpha-weighted votes of the rounds; probabilities are their
/// softmax.
class AdaBoostClassifier final : public Classifier {
 public:
  explicit AdaBoostClassifier(AdaBoostParams params = {}) : params_(params) {
    if (params_.rounds < 1 || params_.depth < 1)
      throw TrainError("adaboost: invalid hyperparameters");
  }

  Algorithm algorithm() const override { return Algorithm::kAdaBoost; }

 protected:
  void do_fit(const Matrix& x, const std::vector<int>& y, std::uint64_t) override {
    const std::size_t n = x.rows();
    const double k = static_cast<double>(classes_.size());
    std::vector<std::size_t> targets(n);
    for (std::size_t i = 0; i < n; ++i) targets[i] = class_index(y[i]);

    detail::TreeGrower grower;
    grower.max_depth = params_.depth;
    grower.min_leaf = 1;
    grower.laplace = 0.0;

    std::vector<double> weights(n, 1.0 / static_cast<double>(n));
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);

    rounds_.clear();
    alphas_.clear();
    for (int round = 0; round < params_.rounds; ++round) {
      auto tree = grower.grow(x, targets, classes_.size(), all, &weights, nullptr);

      double err = 0.0;
      std::vector<bool> wrong(n, false);
      for (std::size_t i = 0; i < n; ++i) {
        const auto& dist = detail::tree_leaf_dist(tree, x.row(i));
        if (argmax_index(dist) != targets[i]) {
          wrong[i] = true;
          err += weights[i];
        }
      }
      // SAMME keeps a round only while the weak learner beats random
      // guessing among k classes. A degenerate dataset where even the first
      // learner fails the bar still yields a valid (uniform) scorer.
      if (err >= 1.0 - 1.0 / k) {
        if (rounds_.empty()) {
          rounds_.push_back(std::move(tree));
          alphas_.push_back(0.0);
        }
        break;
      }
      err = std::max(err, 1e-10);
      const double alpha = std::log((1.0 - err) / err) + std::log(k - 1.0);

      rounds_.push_back(std::move(tree));
      alphas_.push_back(alpha);

      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (wrong[i]) weights[i] *= std::exp(alpha);
        total += weights[i];
      }
      for (double& w : weights) w /= total;
    }
  }

  std::vector<double> do_predict(std::span<const double> x) const override {
    std::vector<double> scores(classes_.size(), 0.0);
    for (std::size_t m = 0; m < rounds_.size(); ++m)
      scores[argmax_index(detail::tree_leaf_dist(rounds_[m], x))] += alphas_[m];
    softmax_inplace(scores);
    return scores;
  }

  nlohmann::json params_json() const override {
    return {{"rounds", params_.rounds}, {"depth", params_.depth}};
  }

  nlohmann::json state_json() const override {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : rounds_) trees.push_back(detail::tree_to_json(tree));
    return {{"trees", std::move(trees)}, {"alphas", alphas_}};
  }

  void restore_state(const nlohmann::json& state) override {
    rounds_.clear();
    for (const auto& tree : state.at("trees")) rounds_.push_back(detail::tree_from_json(tree));
    alphas_ = state.at("alphas").get<std::vector<double>>();
  }

 private:
  AdaBoostParams params_;
  std::vector<std::vector<detail::TreeNode>> rounds_;
  std::vector<double> alphas_;
};

}  // namespace wifiloc
