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

#include <utility>
#include <vector>

#include "wifiloc/ensemble/meta.hpp"

namespace wifiloc {

/// The full localizer: one meta-learner trained on both bands, one trained
/// on 2.4 GHz features only for devices that cannot hear 5 GHz.
struct LocalizerBundle {
  MetaLearner dual;
  MetaLearner only24;
  std::uint64_t seed = 0;
  EngineConfig config;
};

struct LocalizeResult {
  int location = 0;
  std::vector<std::pair<int, double>> scores;  // (location id, Q), ascending ids
  BandProfile band_used = BandProfile::kDualBand;
};

/// Trains both meta-learners from one source dataset with the same seed.
/// The dataset must carry both bands, otherwise there is nothing to route.
inline LocalizerBundle train_bundle(const Dataset& ds, const EngineConfig& config,
                                    std::uint64_t seed) {
  bool has24 = false, has5 = false;
  for (const auto& [mac, info] : ds.radio_registry)
    (info.band == Band::kBand24 ? has24 : has5) = true;
  if (!has24 || !has5)
    throw DataError("bundle training needs a dual-band dataset (both 2.4 and 5 GHz radios)");

  LocalizerBundle bundle;
  bundle.seed = seed;
  bundle.config = config;
  bundle.dual = train_meta(ds, BandProfile::kDualBand, config, seed).learner;
  bundle.only24 =
      train_meta(filter_to_band(ds, Band::kBand24), BandProfile::kBand24Only, config, seed)
          .learner;
  return bundle;
}

/// Registry view reconstructed from the dual model's feature space; it
/// covers every radio the bundle was trained on.
inline RadioRegistry bundle_registry(const LocalizerBundle& bundle) {
  RadioRegistry registry;
  for (const auto& r : bundle.dual.space.radios()) registry[r.mac] = {r.band, r.mac};
  return registry;
}

/// Routes the scan by band profile, encodes it against the matching
/// feature space and returns the best-scoring location.
inline LocalizeResult localize(const LocalizerBundle& bundle, const Fingerprint& fp) {
  const auto registry = bundle_registry(bundle);
  const BandProfile profile = detect_band_profile(fp, registry);  // throws on unknown scans
  const MetaLearner& meta =
      profile == BandProfile::kDualBand ? bundle.dual : bundle.only24;

  const auto x = vectorize(fp, meta.space);
  const auto q = meta.score(x, bundle.config.clamp_negative_youden);

  LocalizeResult out;
  out.band_used = profile;
  out.location = meta.labels()[argmax_index(q)];
  out.scores.reserve(q.size());
  for (std::size_t c = 0; c < q.size(); ++c) out.scores.emplace_back(meta.labels()[c], q[c]);
  return out;
}

inline nlohmann::json to_json(const LocalizerBundle& b) {
  return {{"format", "wifiloc-bundle"},
          {"format_version", 1},
          {"seed", b.seed},
          {"config", to_json(b.config)},
          {"dual", to_json(b.dual)},
          {"only24", to_json(b.only24)}};
}

inline LocalizerBundle bundle_from_json(const nlohmann::json& j) {
  if (j.value("format", std::string{}) != "wifiloc-bundle")
    throw IoError("not a wifiloc bundle container");
  if (j.value("format_version", 0) != 1) throw IoError("unsupported bundle container version");
  LocalizerBundle b;
  b.seed = j.at("seed").get<std::uint64_t>();
  apply_overrides(b.config, j.at("config"));
  b.dual = meta_learner_from_json(j.at("dual"));
  b.only24 = meta_learner_from_json(j.at("only24"));
  if (b.dual.band != BandProfile::kDualBand || b.only24.band != BandProfile::kBand24Only)
    throw IoError("bundle band profiles are inconsistent");
  for (const auto& r : b.only24.space.radios())
    if (r.band != Band::kBand24) throw IoError("2.4-only model contains 5 GHz radios");
  return b;
}

}  // namespace wifiloc
