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

#include <memory>

#include "wifiloc/classifiers/adaboost.hpp"
#include "wifiloc/classifiers/common.hpp"
#include "wifiloc/classifiers/decision_tree.hpp"
#include "wifiloc/classifiers/knn.hpp"
#include "wifiloc/classifiers/linear_svm.hpp"
#include "wifiloc/classifiers/mlp.hpp"
#include "wifiloc/classifiers/random_forest.hpp"

namespace wifiloc {

inline std::unique_ptr<Classifier> make_classifier(Algorithm algorithm,
                                                   const ClassifierConfig& config = {}) {
  switch (algorithm) {
    case Algorithm::kKnn: return std::make_unique<KnnClassifier>(config.knn);
    case Algorithm::kDecisionTree: return std::make_unique<DecisionTreeClassifier>(config.tree);
    case Algorithm::kRandomForest: return std::make_unique<RandomForestClassifier>(config.forest);
    case Algorithm::kAdaBoost: return std::make_unique<AdaBoostClassifier>(config.adaboost);
    case Algorithm::kMlp: return std::make_unique<MlpClassifier>(config.mlp);
    case Algorithm::kLinearSvm: return std::make_unique<LinearSvmClassifier>(config.svm);
  }
  throw TrainError("unknown algorithm id");
}

/// Rebuilds a classifier from its serialized container. Refuses models
/// trained against a different feature-space encoding.
inline std::unique_ptr<Classifier> load_classifier(const nlohmann::json& j,
                                                   std::uint64_t expected_space_hash) {
  if (j.value("format", std::string{}) != "wifiloc-model")
    throw IoError("not a wifiloc model container");
  if (j.value("format_version", 0) != 1)
    throw IoError("unsupported model container version");
  const auto stored_hash = j.at("feature_space_hash").get<std::uint64_t>();
  if (stored_hash != expected_space_hash)
    throw IoError("model was trained on a different feature space");

  const Algorithm algorithm = algorithm_from_name(j.at("algorithm").get<std::string>());
  ClassifierConfig config;
  apply_overrides(config, {{algorithm_name(algorithm), j.at("hyperparameters")}});
  auto model = make_classifier(algorithm, config);
  model->classes_ = j.at("classes").get<std::vector<int>>();
  model->dim_ = j.at("dim").get<std::size_t>();
  model->restore_state(j.at("state"));
  model->trained_ = true;
  return model;
}

}  // namespace wifiloc
