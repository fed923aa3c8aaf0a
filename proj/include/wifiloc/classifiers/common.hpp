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
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "wifiloc/classifiers/matrix.hpp"
#include "wifiloc/error.hpp"
#include "wifiloc/random.hpp"

namespace wifiloc {

enum class Algorithm : std::uint8_t {
  kKnn,
  kDecisionTree,
  kRandomForest,
  kAdaBoost,
  kMlp,
  kLinearSvm,
};

inline constexpr std::array<Algorithm, 6> kAllAlgorithms = {
    Algorithm::kKnn,       Algorithm::kDecisionTree, Algorithm::kRandomForest,
    Algorithm::kAdaBoost,  Algorithm::kMlp,          Algorithm::kLinearSvm,
};

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kKnn: return "knn";
    case Algorithm::kDecisionTree: return "decision_tree";
    case Algorithm::kRandomForest: return "random_forest";
    case Algorithm::kAdaBoost: return "adaboost";
    case Algorithm::kMlp: return "mlp";
    case Algorithm::kLinearSvm: return "linear_svm";
  }
  return "?";
}

inline Algorithm algorithm_from_name(const std::string& name) {
  for (Algorithm a : kAllAlgorithms)
    if (name == algorithm_name(a)) return a;
  throw DataError("unknown algorithm '" + name + "'");
}

// --- Hyperparameters ----------------------------------------------------------

struct KnnParams {
  int k = 5;
};

struct TreeParams {
  int max_depth = 20;
  int min_leaf = 2;
  double laplace = 1.0;  // leaf distributions get +laplace per class
};

struct ForestParams {
  int trees = 100;
  int max_depth = 20;
  int min_leaf = 2;
  double laplace = 1.0;
};

struct AdaBoostParams {
  int rounds = 50;
  int depth = 2;
};

struct MlpParams {
  int hidden = 64;
  int batch = 32;
  double learning_rate = 1e-3;
  int epochs = 200;
  double holdout = 0.10;  // early-stopping slice carved from the training data
  int patience = 20;
};

struct SvmParams {
  double lambda = 1e-3;
  int epochs = 200;
};

struct ClassifierConfig {
  KnnParams knn;
  TreeParams tree;
  ForestParams forest;
  AdaBoostParams adaboost;
  MlpParams mlp;
  SvmParams svm;
};

inline nlohmann::json to_json(const ClassifierConfig& c) {
  return {
      {"knn", {{"k", c.knn.k}}},
      {"decision_tree",
       {{"max_depth", c.tree.max_depth}, {"min_leaf", c.tree.min_leaf}, {"laplace", c.tree.laplace}}},
      {"random_forest",
       {{"trees", c.forest.trees},
        {"max_depth", c.forest.max_depth},
        {"min_leaf", c.forest.min_leaf},
        {"laplace", c.forest.laplace}}},
      {"adaboost", {{"rounds", c.adaboost.rounds}, {"depth", c.adaboost.depth}}},
      {"mlp",
       {{"hidden", c.mlp.hidden},
        {"batch", c.mlp.batch},
        {"learning_rate", c.mlp.learning_rate},
        {"epochs", c.mlp.epochs},
        {"holdout", c.mlp.holdout},
        {"patience", c.mlp.patience}}},
      {"linear_svm", {{"lambda", c.svm.lambda}, {"epochs", c.svm.epochs}}},
  };
}

/// Merges the keys present in `j` over the current values; unknown keys are
/// rejected so config typos fail loudly.
inline void apply_overrides(ClassifierConfig& c, const nlohmann::json& j) {
  static const std::map<std::string, std::set<std::string>> known = {
      {"knn", {"k"}},
      {"decision_tree", {"max_depth", "min_leaf", "laplace"}},
      {"random_forest", {"trees", "max_depth", "min_leaf", "laplace"}},
      {"adaboost", {"rounds", "depth"}},
      {"mlp", {"hidden", "batch", "learning_rate", "epochs", "holdout", "patience"}},
      {"linear_svm", {"lambda", "epochs"}},
  };
  for (const auto& [section, values] : j.items()) {
    auto it = known.find(section);
    if (it == known.end()) throw DataError("unknown classifier config section '" + section + "'");
    for (const auto& [key, value] : values.items())
      if (!it->second.count(key))
        throw DataError("unknown classifier config key '" + section + "." + key + "'");
  }
  auto get = [&](const char* section, const char* key, auto current) {
    using T = decltype(current);
    if (j.contains(section) && j[section].contains(key)) return j[section][key].template get<T>();
    return current;
  };
  c.knn.k = get("knn", "k", c.knn.k);
  c.tree.max_depth = get("decision_tree", "max_depth", c.tree.max_depth);
  c.tree.min_leaf = get("decision_tree", "min_leaf", c.tree.min_leaf);
  c.tree.laplace = get("decision_tree", "laplace", c.tree.laplace);
  c.forest.trees = get("random_forest", "trees", c.forest.trees);
  c.forest.max_depth = get("random_forest", "max_depth", c.forest.max_depth);
  c.forest.min_leaf = get("random_forest", "min_leaf", c.forest.min_leaf);
  c.forest.laplace = get("random_forest", "laplace", c.forest.laplace);
  c.adaboost.rounds = get("adaboost", "rounds", c.adaboost.rounds);
  c.adaboost.depth = get("adaboost", "depth", c.adaboost.depth);
  c.mlp.hidden = get("mlp", "hidden", c.mlp.hidden);
  c.mlp.batch = get("mlp", "batch", c.mlp.batch);
  c.mlp.learning_rate = get("mlp", "learning_rate", c.mlp.learning_rate);
  c.mlp.epochs = get("mlp", "epochs", c.mlp.epochs);
  c.mlp.holdout = get("mlp", "holdout", c.mlp.holdout);
  c.mlp.patience = get("mlp", "patience", c.mlp.patience);
  c.svm.lambda = get("linear_svm", "lambda", c.svm.lambda);
  c.svm.epochs = get("linear_svm", "epochs", c.svm.epochs);
}

// --- Small numeric helpers ----------------------------------------------------

/// Index of the maximum entry; the first (lowest class id, since classes are
/// kept ascending) wins exact ties.
inline std::size_t argmax_index(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

/// Numerically safe in-place softmax.
inline void softmax_inplace(std::vector<double>& scores) {
  const double peak = *std::max_element(scores.begin(), scores.end());
  double total = 0;
  for (double& s : scores) {
    s = std::exp(s - peak);
    total += s;
  }
  for (double& s : scores) s /= total;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

// --- Classifier interface -------------------------------------------------------

/// Uniform interface of the six algorithms: fit on labeled feature vectors,
/// answer a probability distribution over the training label set for a
/// query vector. Trained models are immutable; predict_proba is const and
/// safe for concurrent callers.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual Algorithm algorithm() const = 0;

  /// Trains on X (rows = samples) with labels y. Deterministic given seed.
  void fit(const Matrix& x, const std::vector<int>& y, std::uint64_t seed) {
    if (x.rows() == 0 || x.cols() == 0) throw TrainError("empty training data");
    if (y.size() != x.rows()) throw TrainError("label count does not match sample count");
    for (double v : x.data())
      if (!std::isfinite(v)) throw TrainError("non-finite feature value");
    std::set<int> labels(y.begin(), y.end());
    if (labels.size() < 2) throw TrainError("training data has a single class");
    classes_.assign(labels.begin(), labels.end());
    dim_ = x.cols();
    do_fit(x, y, seed);
    trained_ = true;
  }

  /// Probability for every training class, aligned with classes().
  std::vector<double> predict_proba(std::span<const double> x) const {
    if (!trained_) throw TrainError("classifier is not trained");
    if (x.size() != dim_)
      throw DataError("feature vector length " + std::to_string(x.size()) +
                      " does not match trained dimension " + std::to_string(dim_));
    return do_predict(x);
  }

  /// Argmax of predict_proba; exact ties go to the lowest class id.
  int predict(std::span<const double> x) const {
    const auto probs = predict_proba(x);
    return classes_[argmax_index(probs)];
  }

  const std::vector<int>& classes() const { return classes_; }
  std::size_t dim() const { return dim_; }
  bool trained() const { return trained_; }

  /// Self-describing container; `feature_space_hash` ties the model to the
  /// encoding it was trained on.
  nlohmann::json save(std::uint64_t feature_space_hash) const {
    if (!trained_) throw TrainError("cannot serialize an untrained classifier");
    nlohmann::json j;
    j["format"] = "wifiloc-model";
    j["format_version"] = 1;
    j["algorithm"] = algorithm_name(algorithm());
    j["hyperparameters"] = params_json();
    j["classes"] = classes_;
    j["dim"] = dim_;
    j["feature_space_hash"] = feature_space_hash;
    j["state"] = state_json();
    return j;
  }

 protected:
  virtual void do_fit(const Matrix& x, const std::vector<int>& y, std::uint64_t seed) = 0;
  virtual std::vector<double> do_predict(std::span<const double> x) const = 0;
  virtual nlohmann::json params_json() const = 0;
  virtual nlohmann::json state_json() const = 0;
  virtual void restore_state(const nlohmann::json& state) = 0;

  std::size_t class_index(int label) const {
    auto it = std::lower_bound(classes_.begin(), classes_.end(), label);
    return static_cast<std::size_t>(it - classes_.begin());
  }

  std::vector<int> classes_;
  std::size_t dim_ = 0;
  bool trained_ = false;

  friend std::unique_ptr<Classifier> load_classifier(const nlohmann::json&,
                                                     std::uint64_t expected_space_hash);
};

}  // namespace wifiloc
