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

#include <json.hpp>

#include "wifiloc/classifiers/common.hpp"
#include "wifiloc/dataset.hpp"

namespace wifiloc {

/// Everything that shapes training and scoring. Every field has a working
/// default; config files and the CLI override selectively.
struct EngineConfig {
  double sentinel_dbm = -100.0;  // below the -90 dBm receiver sensitivity
  SplitRatios split;             // 0.7 / 0.2 / 0.1
  bool clamp_negative_youden = true;
  int smoothing_streak = 3;
  ClassifierConfig classifiers;
};

inline nlohmann::json to_json(const EngineConfig& c) {
  return {
      {"sentinel_dbm", c.sentinel_dbm},
      {"split",
       {{"train", c.split.train}, {"validation", c.split.validation}, {"test", c.split.test}}},
      {"clamp_negative_youden", c.clamp_negative_youden},
      {"smoothing_streak", c.smoothing_streak},
      {"classifiers", to_json(c.classifiers)},
  };
}

inline void apply_overrides(EngineConfig& c, const nlohmann::json& j) {
  for (const auto& [key, value] : j.items()) {
    if (key == "sentinel_dbm") {
      c.sentinel_dbm = value.get<double>();
    } else if (key == "split") {
      c.split.train = value.value("train", c.split.train);
      c.split.validation = value.value("validation", c.split.validation);
      c.split.test = value.value("test", c.split.test);
    } else if (key == "clamp_negative_youden") {
      c.clamp_negative_youden = value.get<bool>();
    } else if (key == "smoothing_streak") {
      c.smoothing_streak = value.get<int>();
    } else if (key == "classifiers") {
      apply_overrides(c.classifiers, value);
    } else {
      throw DataError("unknown engine config key '" + key + "'");
    }
  }
}

}  // namespace wifiloc
