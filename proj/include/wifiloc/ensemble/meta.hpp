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

#include <future>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "wifiloc/classifiers.hpp"
#include "wifiloc/config.hpp"
#include "wifiloc/dataset.hpp"
#include "wifiloc/ensemble/youden.hpp"

namespace wifiloc {

struct MetaTrainReport {
  std::size_t train_count = 0;
  std::size_t validation_count = 0;
  std::size_t test_count = 0;
  std::map<std::string, double> validation_accuracy;  // per algorithm
  double meta_validation_accuracy = 0.0;
  std::vector<std::string> warnings;
};

inline nlohmann::json to_json(const MetaTrainReport& r) {
  return {{"train_count", r.train_count},
          {"validation_count", r.validation_count},
          {"test_count", r.test_count},
          {"validation_accuracy", r.validation_accuracy},
          {"meta_validation_accuracy", r.meta_validation_accuracy},
          {"warnings", r.warnings}};
}

inline MetaTrainReport meta_report_from_json(const nlohmann::json& j) {
  MetaTrainReport r;
  r.train_count = j.at("train_count").get<std::size_t>();
  r.validation_count = j.at("validation_count").get<std::size_t>();
  r.test_count = j.at("test_count").get<std::size_t>();
  r.validation_accuracy = j.at("validation_accuracy").get<std::map<std::string, double>>();
  r.meta_validation_accuracy = j.at("meta_validation_accuracy").get<double>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

/// One band's trained ensemble: the six classifiers, their informedness
/// weights and the feature encoding they share. Immutable once trained;
/// scoring is safe for concurrent callers.
struct MetaLearner {
  BandProfile band = BandProfile::kDualBand;
  FeatureSpace space;
  std::vector<std::unique_ptr<Classifier>> models;  // kAllAlgorithms order
  YoudenMatrix youden;
  MetaTrainReport report;

  const std::vector<int>& labels() const { return youden.locations; }

  /// Informedness-weighted total score per location. With clamping, a model
  /// that performs below chance for a class simply stops contributing to it;
  /// without, its (negative) weight enters the sum unchanged.
  std::vector<double> score(std::span<const double> x, bool clamp_negative) const {
    std::vector<double> q(labels().size(), 0.0);
    for (std::size_t m = 0; m < models.size(); ++m) {
      const auto probs = models[m]->predict_proba(x);
      for (std::size_t c = 0; c < q.size(); ++c) {
        const double j = youden.at(m, c);
        const double w = clamp_negative ? std::max(j, 0.0) : j;
        q[c] += w * probs[c];
      }
    }
    return q;
  }

  /// Argmax of score; exact ties go to the lowest location id.
  int predict(std::span<const double> x, bool clamp_negative) const {
    const auto q = score(x, clamp_negative);
    return labels()[argmax_index(q)];
  }
};

/// Trainer output: the learner plus the identities (input-row indices) of
/// the validation and test fingerprints, so evaluation can score data the
/// training never touched.
struct MetaTraining {
  MetaLearner learner;
  std::vector<std::size_t> validation_indices;
  std::vector<std::size_t> test_indices;
};

namespace detail {

inline Matrix vectorize_all(const Dataset& ds, const FeatureSpace& space) {
  Matrix x(ds.fingerprints.size(), space.size());
  for (std::size_t i = 0; i < ds.fingerprints.size(); ++i) {
    const auto v = vectorize(ds.fingerprints[i], space);
    std::copy(v.begin(), v.end(), x.row(i).begin());
  }
  return x;
}

inline std::vector<int> label_ids(const Dataset& ds) {
  std::vector<int> y(ds.fingerprints.size());
  for (std::size_t i = 0; i < ds.fingerprints.size(); ++i)
    y[i] = ds.location_id(*ds.fingerprints[i].location);
  return y;
}

}  // namespace detail

/// Trains the six classifiers on the 70% split, computes the Youden matrix
/// from their hard validation predictions, and reports per-model validation
/// accuracy. The six fits run concurrently; results merge in algorithm
/// order, so the outcome is deterministic for a given seed.
inline MetaTraining train_meta(const Dataset& ds, BandProfile band, const EngineConfig& config,
                               std::uint64_t seed) {
  if (band == BandProfile::kBand24Only)
    for (const auto& [mac, info] : ds.radio_registry)
      if (info.band == Band::kBand5)
        throw DataError("dataset has 5 GHz radios but the 2.4 GHz-only model was requested");

  auto split = split_dataset(ds, config.split, seed);
  const FeatureSpace space = canonical_feature_space(ds, config.sentinel_dbm);

  const Matrix x_train = detail::vectorize_all(split.train, space);
  const std::vector<int> y_train = detail::label_ids(ds);  // ids resolved against full set
  std::vector<int> y_train_split(split.train_indices.size());
  for (std::size_t i = 0; i < split.train_indices.size(); ++i)
    y_train_split[i] = y_train[split.train_indices[i]];

  // Six independent fits.
  std::vector<std::future<std::unique_ptr<Classifier>>> fits;
  for (std::size_t m = 0; m < kAllAlgorithms.size(); ++m) {
    fits.push_back(std::async(std::launch::async, [&, m]() {
      auto model = make_classifier(kAllAlgorithms[m], config.classifiers);
      model->fit(x_train, y_train_split, derive_seed(seed, 0xa160ull + m));
      return model;
    }));
  }

  MetaLearner learner;
  learner.band = band;
  learner.space = space;
  for (auto& fit : fits) learner.models.push_back(fit.get());

  const auto& classes = learner.models.front()->classes();
  learner.youden.locations = classes;
  learner.youden.algorithms.assign(kAllAlgorithms.begin(), kAllAlgorithms.end());

  // Hard validation predictions feed the informedness weights.
  const Matrix x_val = detail::vectorize_all(split.validation, space);
  std::vector<int> y_val(split.validation_indices.size());
  for (std::size_t i = 0; i < split.validation_indices.size(); ++i)
    y_val[i] = y_train[split.validation_indices[i]];

  learner.report.train_count = split.train_indices.size();
  learner.report.validation_count = split.validation_indices.size();
  learner.report.test_count = split.test_indices.size();

  for (std::size_t m = 0; m < learner.models.size(); ++m) {
    std::vector<int> preds(x_val.rows());
    std::size_t correct = 0;
    for (std::size_t i = 0; i < x_val.rows(); ++i) {
      preds[i] = learner.models[m]->predict(x_val.row(i));
      if (preds[i] == y_val[i]) ++correct;
    }
    learner.report.validation_accuracy[algorithm_name(kAllAlgorithms[m])] =
        x_val.rows() ? static_cast<double>(correct) / static_cast<double>(x_val.rows()) : 0.0;

    std::vector<double> row(classes.size(), 0.0);
    for (std::size_t c = 0; c < classes.size() && !y_val.empty(); ++c) {
      const auto sens = sensitivity(preds, y_val, classes[c]);
      const auto spec = specificity(preds, y_val, classes[c]);
      if (!sens || !spec) {
        learner.report.warnings.push_back(
            std::string("undefined ") + (!sens ? "sensitivity" : "specificity") + " for " +
            algorithm_name(kAllAlgorithms[m]) + " at location " + std::to_string(classes[c]) +
            "; weight set to 0");
        row[c] = 0.0;
      } else {
        row[c] = youden(*sens, *spec);
      }
    }
    learner.youden.values.push_back(std::move(row));
  }

  // Meta accuracy on the same validation data, for the training report.
  if (x_val.rows()) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < x_val.rows(); ++i)
      if (learner.predict(x_val.row(i), config.clamp_negative_youden) == y_val[i]) ++correct;
    learner.report.meta_validation_accuracy =
        static_cast<double>(correct) / static_cast<double>(x_val.rows());
  }

  MetaTraining out;
  out.learner = std::move(learner);
  out.validation_indices = std::move(split.validation_indices);
  out.test_indices = std::move(split.test_indices);
  return out;
}

inline nlohmann::json to_json(const MetaLearner& m) {
  nlohmann::json radios = nlohmann::json::array();
  for (const auto& r : m.space.radios())
    radios.push_back({{"mac", r.mac}, {"band", band_name(r.band)}});
  nlohmann::json models = nlohmann::json::array();
  for (const auto& model : m.models) models.push_back(model->save(m.space.content_hash()));
  return {{"band", band_profile_name(m.band)},
          {"feature_space", {{"sentinel_dbm", m.space.sentinel()}, {"radios", std::move(radios)}}},
          {"youden", to_json(m.youden)},
          {"models", std::move(models)},
          {"report", to_json(m.report)}};
}

inline MetaLearner meta_learner_from_json(const nlohmann::json& j) {
  MetaLearner m;
  const auto band = j.at("band").get<std::string>();
  if (band == band_profile_name(BandProfile::kDualBand))
    m.band = BandProfile::kDualBand;
  else if (band == band_profile_name(BandProfile::kBand24Only))
    m.band = BandProfile::kBand24Only;
  else
    throw IoError("unknown band profile '" + band + "'");

  std::vector<RadioId> radios;
  for (const auto& r : j.at("feature_space").at("radios"))
    radios.push_back({r.at("mac").get<std::string>(),
                      band_from_name(r.at("band").get<std::string>())});
  m.space = FeatureSpace(std::move(radios), j.at("feature_space").at("sentinel_dbm").get<double>());
  m.youden = youden_matrix_from_json(j.at("youden"));
  for (const auto& model : j.at("models"))
    m.models.push_back(load_classifier(model, m.space.content_hash()));
  m.report = meta_report_from_json(j.at("report"));
  if (m.models.size() != m.youden.algorithms.size())
    throw IoError("model count does not match youden matrix");
  return m;
}

}  // namespace wifiloc
