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
namespace detail {

/// One node of a CART tree. feature < 0 marks a leaf carrying a class
/// distribution; inner nodes route x[feature] <= threshold to `left`.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> dist;  // leaves only, aligned with the class list
};

inline nlohmann::json tree_to_json(const std::vector<TreeNode>& nodes) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& n : nodes)
    out.push_back({{"f", n.feature},
                   {"t", n.threshold},
                   {"l", n.left},
                   {"r", n.right},
                   {"d", n.dist}});
  return out;
}

inline std::vector<TreeNode> tree_from_json(const nlohmann::json& j) {
  std::vector<TreeNode> nodes;
  for (const auto& n : j) {
    TreeNode node;
    node.feature = n.at("f").get<int>();
    node.threshold = n.at("t").get<double>();
    node.left = n.at("l").get<int>();
    node.right = n.at("r").get<int>();
    node.dist = n.at("d").get<std::vector<double>>();
    nodes.push_back(std::move(node));
  }
  return nodes;
}

inline const std::vector<double>& tree_leaf_dist(const std::vector<TreeNode>& nodes,
                                                 std::span<const double> x) {
  int at = 0;
  while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
    const auto& n = nodes[static_cast<std::size_t>(at)];
    at = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(at)].dist;
}

/// Greedy CART construction: Gini impurity, midpoint thresholds, optional
/// per-sample weights and per-node random feature subsets. Deterministic:
/// ties keep the first candidate in feature order.
class TreeGrower {
 public:
  int max_depth = 20;
  int min_leaf = 2;
  double laplace = 1.0;
  std::size_t features_per_split = 0;  // 0 = consider every feature

  /// `targets` holds the dense class index (0..n_classes-1) per row of x;
  /// `samples` the rows to train on (may repeat for bootstrap);
  /// `weights` optional per-row weights.
  std::vector<TreeNode> grow(const Matrix& x, const std::vector<std::size_t>& targets,
                             std::size_t n_classes, std::vector<std::size_t> samples,
                             const std::vector<double>* weights, Rng* rng) const {
    std::vector<TreeNode> nodes;
    build(nodes, x, targets, n_classes, std::move(samples), weights, rng, 0);
    return nodes;
  }

 private:
  double weight_of(const std::vector<double>* weights, std::size_t row) const {
    return weights ? (*weights)[row] : 1.0;
  }

  std::vector<double> leaf_distribution(const std::vector<double>& class_weight,
                                        double total) const {
    const std::size_t k = class_weight.size();
    std::vector<double> dist(k, 0.0);
    const double denom = total + laplace * static_cast<double>(k);
    if (denom <= 0.0) {
      std::fill(dist.begin(), dist.end(), 1.0 / static_cast<double>(k));
      return dist;
    }
    for (std::size_t c = 0; c < k; ++c) dist[c] = (class_weight[c] + laplace) / denom;
    return dist;
  }

  static double gini(const std::vector<double>& class_weight, double total) {
    if (total <= 0.0) return 0.0;
    double acc = 1.0;
    for (double w : class_weight) {
      const double p = w / total;
      acc -= p * p;
    }
    return acc;
  }

  int build(std::vector<TreeNode>& nodes, const Matrix& x,
            const std::vector<std::size_t>& targets, std::size_t n_classes,
            std::vector<std::size_t> samples, const std::vector<double>* weights, Rng* rng,
            int depth) const {
    std::vector<double> class_weight(n_classes, 0.0);
    double total = 0.0;
    for (std::size_t row : samples) {
      class_weight[targets[row]] += weight_of(weights, row);
      total += weight_of(weights, row);
    }
    const double parent_gini = gini(class_weight, total);
    const bool pure = std::count_if(class_weight.begin(), class_weight.end(),
                                    [](double w) { return w > 0.0; }) <= 1;

    const int node_index = static_cast<int>(nodes.size());
    nodes.emplace_back();
    if (pure || depth >= max_depth ||
        samples.size() < 2 * static_cast<std::size_t>(min_leaf)) {
      nodes[static_cast<std::size_t>(node_index)].dist = leaf_distribution(class_weight, total);
      return node_index;
    }

    // Candidate features: everything, or a random subset per node.
    std::vector<std::size_t> features(x.cols());
    std::iota(features.begin(), features.end(), 0);
    if (features_per_split > 0 && features_per_split < features.size() && rng) {
      for (std::size_t i = 0; i < features_per_split; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng->below(features.size() - i));
        std::swap(features[i], features[j]);
      }
      features.resize(features_per_split);
      std::sort(features.begin(), features.end());
    }

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_gini = parent_gini - 1e-12;
    std::vector<std::size_t> order;
    std::vector<double> left_weight(n_classes);
    for (std::size_t f : features) {
      order = samples;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = x(a, f), vb = x(b, f);
        return va < vb || (va == vb && a < b);
      });
      std::fill(left_weight.begin(), left_weight.end(), 0.0);
      double left_total = 0.0;
      for (std::size_t i = 1; i < order.size(); ++i) {
        const std::size_t prev = order[i - 1];
        left_weight[targets[prev]] += weight_of(weights, prev);
        left_total += weight_of(weights, prev);
        if (x(prev, f) == x(order[i], f)) continue;
        if (i < static_cast<std::size_t>(min_leaf) ||
            order.size() - i < static_cast<std::size_t>(min_leaf))
          continue;
        double right_total = total - left_total;
        double score = 0.0;
        {
          double acc_l = 1.0, acc_r = 1.0;
          for (std::size_t c = 0; c < n_classes; ++c) {
            const double pl = left_total > 0 ? left_weight[c] / left_total : 0.0;
            const double pr = right_total > 0 ? (class_weight[c] - left_weight[c]) / right_total : 0.0;
            acc_l -= pl * pl;
            acc_r -= pr * pr;
          }
          score = (left_total * acc_l + right_total * acc_r) / total;
        }
        if (score < best_gini) {
          best_gini = score;
          best_feature = static_cast<int>(f);
          best_threshold = 0.5 * (x(prev, f) + x(order[i], f));
        }
      }
    }

    if (best_feature < 0) {
      nodes[static_cast<std::size_t>(node_index)].dist = leaf_distribution(class_weight, total);
      return node_index;
    }

    std::vector<std::size_t> left_samples, right_samples;
    for (std::size_t row : samples) {
      if (x(row, static_cast<std::size_t>(best_feature)) <= best_threshold)
        left_samples.push_back(row);
      else
        right_samples.push_back(row);
    }
    samples.clear();
    samples.shrink_to_fit();

    const int left = build(nodes, x, targets, n_classes, std::move(left_samples), weights, rng,
                           depth + 1);
    const int right = build(nodes, x, targets, n_classes, std::move(right_samples), weights, rng,
                            depth + 1);
    auto& node = nodes[static_cast<std::size_t>(node_index)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = left;
    node.right = right;
    return node_index;
  }
};

}  // namespace detail

/// CART decision tree; leaf distributions are Laplace-smoothed class
/// frequencies.
class DecisionTreeClassifier final : public Classifier {
 public:
  explicit DecisionTreeClassifier(TreeParams params = {}) : params_(params) {
    if (params_.max_depth < 1 || params_.min_leaf < 1 || params_.laplace < 0)
      throw TrainError("decision_tree: invalid hyperparameters");
  }

  Algorithm algorithm() const override { return Algorithm::kDecisionTree; }

 protected:
  void do_fit(const Matrix& x, const std::vector<int>& y, std::uint64_t) override {
    std::vector<std::size_t> targets(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) targets[i] = class_index(y[i]);
    std::vector<std::size_t> samples(x.rows());
    std::iota(samples.begin(), samples.end(), 0);
    detail::TreeGrower grower;
    grower.max_depth = params_.max_depth;
    grower.min_leaf = params_.min_leaf;
    grower.laplace = params_.laplace;
    nodes_ = grower.grow(x, targets, classes_.size(), std::move(samples), nullptr, nullptr);
  }

  std::vector<double> do_predict(std::span<const double> x) const override {
    return detail::tree_leaf_dist(nodes_, x);
  }

  nlohmann::json params_json() const override {
    return {{"max_depth", params_.max_depth},
            {"min_leaf", params_.min_leaf},
            {"laplace", params_.laplace}};
  }

  nlohmann::json state_json() const override { return {{"nodes", detail::tree_to_json(nodes_)}}; }

  void restore_state(const nlohmann::json& state) override {
    nodes_ = detail::tree_from_json(state.at("nodes"));
  }

 private:
  TreeParams params_;
  std::vector<detail::TreeNode> nodes_;
};

}  // namespace wifiloc
