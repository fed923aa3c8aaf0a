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

#include <filesystem>
#include <fstream>

#include "wifiloc/eval/evaluate.hpp"
#include "wifiloc/io.hpp"

namespace wifiloc {

inline constexpr const char* kQuantileConvention =
    "linear interpolation between order statistics";

/// Numbers are written with the shortest round-trip representation so a
/// re-run with the same seed produces byte-identical files.
inline std::string csv_number(double v) { return nlohmann::json(v).dump(); }

/// Header row/column carry the location ids.
inline void export_confusion_csv(const ConfusionMatrix& cm, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "location";
  for (int id : cm.locations) out << ',' << id;
  out << '\n';
  for (std::size_t r = 0; r < cm.locations.size(); ++r) {
    out << cm.locations[r];
    for (std::size_t c = 0; c < cm.locations.size(); ++c) out << ',' << csv_number(cm.ratios[r][c]);
    out << '\n';
  }
}

inline void export_curve_csv(const std::vector<CurvePoint>& curve,
                             const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  const bool with_coverage =
      std::any_of(curve.begin(), curve.end(), [](const auto& p) { return p.min_covered_aps >= 0; });
  out << "# quantiles: " << kQuantileConvention << '\n';
  out << "x,mean,q25,q75,min,max";
  if (with_coverage) out << ",min_covered_aps";
  out << '\n';
  for (const auto& p : curve) {
    out << csv_number(p.x) << ',' << csv_number(p.stats.mean) << ',' << csv_number(p.stats.q25)
        << ',' << csv_number(p.stats.q75) << ',' << csv_number(p.stats.min) << ','
        << csv_number(p.stats.max);
    if (with_coverage) out << ',' << p.min_covered_aps;
    out << '\n';
  }
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json model_test = nlohmann::json::object();
  for (const auto& [name, stats] : r.model_test_accuracy) model_test[name] = to_json(stats);
  nlohmann::json model_val = nlohmann::json::object();
  for (const auto& [name, stats] : r.model_validation_accuracy) model_val[name] = to_json(stats);
  return {{"quantiles", kQuantileConvention},
          {"test_accuracy", to_json(r.test_accuracy)},
          {"validation_accuracy", to_json(r.validation_accuracy)},
          {"mean_confusion", to_json(r.mean_confusion)},
          {"model_test_accuracy", std::move(model_test)},
          {"model_validation_accuracy", std::move(model_val)}};
}

inline EvalReport eval_report_from_json(const nlohmann::json& j) {
  EvalReport r;
  r.test_accuracy = eval_stats_from_json(j.at("test_accuracy"));
  r.validation_accuracy = eval_stats_from_json(j.at("validation_accuracy"));
  r.mean_confusion = confusion_from_json(j.at("mean_confusion"));
  for (const auto& [name, stats] : j.at("model_test_accuracy").items())
    r.model_test_accuracy[name] = eval_stats_from_json(stats);
  for (const auto& [name, stats] : j.at("model_validation_accuracy").items())
    r.model_validation_accuracy[name] = eval_stats_from_json(stats);
  return r;
}

inline nlohmann::json to_json(const std::vector<CurvePoint>& curve) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : curve) {
    nlohmann::json point = {{"x", p.x}, {"stats", to_json(p.stats)}};
    if (p.min_covered_aps >= 0) point["min_covered_aps"] = p.min_covered_aps;
    points.push_back(std::move(point));
  }
  return {{"quantiles", kQuantileConvention}, {"points", std::move(points)}};
}

inline std::vector<CurvePoint> curve_from_json(const nlohmann::json& j) {
  std::vector<CurvePoint> curve;
  for (const auto& point : j.at("points")) {
    CurvePoint p;
    p.x = point.at("x").get<double>();
    p.stats = eval_stats_from_json(point.at("stats"));
    p.min_covered_aps = point.value("min_covered_aps", -1);
    curve.push_back(std::move(p));
  }
  return curve;
}

}  // namespace wifiloc
