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
#include <string>
#include <vector>

#include "wifiloc/coverage.hpp"
#include "wifiloc/ensemble/meta.hpp"
#include "wifiloc/eval/confusion.hpp"
#include "wifiloc/eval/stats.hpp"

namespace wifiloc {

/// One train-and-measure pass. Test numbers come from the held-out 10%;
/// validation numbers are reported as well since both views matter when
/// comparing against published figures.
struct EvalOutcome {
  double test_accuracy = 0;
  double validation_accuracy = 0;  // meta-learner on the validation split
  ConfusionMatrix confusion;       // on the test split
  std::map<std::string, double> model_test_accuracy;
  std::map<std::string, double> model_validation_accuracy;
};

/// Aggregation of repeated passes with reshuffled splits.
struct EvalReport {
  EvalStats test_accuracy;
  EvalStats validation_accuracy;
  ConfusionMatrix mean_confusion;
  std::map<std::string, EvalStats> model_test_accuracy;
  std::map<std::string, EvalStats> model_validation_accuracy;
};

struct CurvePoint {
  double x = 0;              // AP count or fingerprint fraction
  EvalStats stats;           // test accuracy over repeats
  int min_covered_aps = -1;  // AP-ablation only: worst per-location coverage
};

/// Trains a meta-learner with `seed` and measures it on its own held-out
/// test split.
inline EvalOutcome evaluate_once(const Dataset& ds, BandProfile band, const EngineConfig& config,
                                 std::uint64_t seed) {
  auto trained = train_meta(ds, band, config, seed);
  const MetaLearner& meta = trained.learner;

  std::vector<int> labels, preds;
  labels.reserve(trained.test_indices.size());
  preds.reserve(trained.test_indices.size());
  std::map<std::string, std::size_t> model_correct;

  for (std::size_t row : trained.test_indices) {
    const auto& fp = ds.fingerprints[row];
    const auto x = vectorize(fp, meta.space);
    const int truth = ds.location_id(*fp.location);
    labels.push_back(truth);
    preds.push_back(meta.predict(x, config.clamp_negative_youden));
    for (std::size_t m = 0; m < meta.models.size(); ++m)
      if (meta.models[m]->predict(x) == truth)
        ++model_correct[algorithm_name(kAllAlgorithms[m])];
  }

  EvalOutcome out;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == preds[i]) ++correct;
  out.test_accuracy =
      labels.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(labels.size());
  out.validation_accuracy = meta.report.meta_validation_accuracy;
  std::vector<int> location_ids;
  for (const auto& l : ds.locations) location_ids.push_back(l.id);
  out.confusion = make_confusion(labels, preds, location_ids);
  for (Algorithm a : kAllAlgorithms) {
    const std::string name = algorithm_name(a);
    out.model_test_accuracy[name] =
        labels.empty() ? 0.0
                       : static_cast<double>(model_correct[name]) /
                             static_cast<double>(labels.size());
    out.model_validation_accuracy[name] = meta.report.validation_accuracy.at(name);
  }
  return out;
}

/// Repeat i runs with seed base_seed + i on a fresh random split; the
/// report aggregates the accuracy statistics and the element-wise mean
/// confusion matrix. Up to `jobs` repeats run concurrently; aggregation is
/// by repeat index, so the result does not depend on completion order.
inline EvalReport evaluate_repeated(const Dataset& ds, BandProfile band,
                                    const EngineConfig& config, int repeats,
                                    std::uint64_t base_seed, int jobs = 1) {
  if (repeats < 1) throw DataError("repeats must be >= 1");
  if (jobs < 1) jobs = 1;
  std::vector<EvalOutcome> outcomes(static_cast<std::size_t>(repeats));
  for (int start = 0; start < repeats; start += jobs) {
    const int stop = std::min(repeats, start + jobs);
    std::vector<std::future<EvalOutcome>> batch;
    for (int i = start; i < stop; ++i)
      batch.push_back(std::async(std::launch::async, [&, i] {
        return evaluate_once(ds, band, config, base_seed + static_cast<std::uint64_t>(i));
      }));
    for (int i = start; i < stop; ++i)
      outcomes[static_cast<std::size_t>(i)] = batch[static_cast<std::size_t>(i - start)].get();
  }

  std::vector<double> test_acc, val_acc;
  std::map<std::string, std::vector<double>> model_test, model_val;
  std::vector<ConfusionMatrix> matrices;
  for (auto& outcome : outcomes) {
    test_acc.push_back(outcome.test_accuracy);
    val_acc.push_back(outcome.validation_accuracy);
    matrices.push_back(std::move(outcome.confusion));
    for (const auto& [name, acc] : outcome.model_test_accuracy) model_test[name].push_back(acc);
    for (const auto& [name, acc] : outcome.model_validation_accuracy)
      model_val[name].push_back(acc);
  }
  EvalReport report;
  report.test_accuracy = EvalStats::from(std::move(test_acc));
  report.validation_accuracy = EvalStats::from(std::move(val_acc));
  report.mean_confusion = mean_confusion(matrices);
  for (auto& [name, values] : model_test)
    report.model_test_accuracy[name] = EvalStats::from(std::move(values));
  for (auto& [name, values] : model_val)
    report.model_validation_accuracy[name] = EvalStats::from(std::move(values));
  return report;
}

/// Shrinks the deployment AP by AP (most redundant first, per
/// redundancy_ranking) and evaluates at each requested AP count.
inline std::vector<CurvePoint> ap_ablation(const Dataset& ds, BandProfile band,
                                           const std::vector<int>& ap_counts,
                                           const EngineConfig& config, int repeats,
                                           std::uint64_t base_seed, int jobs = 1) {
  const auto ranking = redundancy_ranking(ds);
  const int total = static_cast<int>(ranking.size());
  for (int count : ap_counts)
    if (count < 1 || count > total)
      throw DataError("ap count " + std::to_string(count) + " outside [1, " +
                      std::to_string(total) + "]");

  std::vector<CurvePoint> curve;
  for (int count : ap_counts) {
    std::set<std::string> to_remove(ranking.begin(), ranking.begin() + (total - count));
    const Dataset reduced = remove_aps(ds, to_remove);
    auto report = evaluate_repeated(reduced, band, config, repeats, base_seed, jobs);
    CurvePoint point;
    point.x = count;
    point.stats = std::move(report.test_accuracy);
    point.min_covered_aps = coverage_table(reduced).min_covered_ap_count();
    curve.push_back(std::move(point));
  }
  return curve;
}

/// Evaluates stratified subsamples of the fingerprint set; every
/// (fraction, repeat) pair subsamples with its own derived seed.
inline std::vector<CurvePoint> subsample_curve(const Dataset& ds, BandProfile band,
                                               const std::vector<double>& fractions,
                                               const EngineConfig& config, int repeats,
                                               std::uint64_t base_seed, int jobs = 1) {
  if (repeats < 1) throw DataError("repeats must be >= 1");
  if (jobs < 1) jobs = 1;
  std::vector<CurvePoint> curve;
  for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
    const double fraction = fractions[fi];
    std::vector<double> accuracies(static_cast<std::size_t>(repeats));
    for (int start = 0; start < repeats; start += jobs) {
      const int stop = std::min(repeats, start + jobs);
      std::vector<std::future<double>> batch;
      for (int i = start; i < stop; ++i)
        batch.push_back(std::async(std::launch::async, [&, fi, fraction, i] {
          const auto sub_seed = derive_seed(base_seed, 0x5ab5a000ull + fi * 1000 +
                                                           static_cast<std::uint64_t>(i));
          const Dataset sub = stratified_subsample(ds, fraction, sub_seed);
          return evaluate_once(sub, band, config, base_seed + static_cast<std::uint64_t>(i))
              .test_accuracy;
        }));
      for (int i = start; i < stop; ++i)
        accuracies[static_cast<std::size_t>(i)] = batch[static_cast<std::size_t>(i - start)].get();
    }
    CurvePoint point;
    point.x = fraction;
    point.stats = EvalStats::from(std::move(accuracies));
    curve.push_back(std::move(point));
  }
  return curve;
}

}  // namespace wifiloc
