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
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "wifiloc/error.hpp"
#include "wifiloc/fingerprint.hpp"
#include "wifiloc/random.hpp"

namespace wifiloc {

/// Registry entry for one radio. `ap` groups the (1 or 2) radios of a
/// physical access point; it defaults to the radio's own MAC when no
/// grouping is known.
struct RadioInfo {
  Band band = Band::kBand24;
  std::string ap;

  friend bool operator==(const RadioInfo& a, const RadioInfo& b) {
    return a.band == b.band && a.ap == b.ap;
  }
};

using RadioRegistry = std::map<std::string, RadioInfo>;  // MAC -> info

/// A labeled fingerprint collection together with the location set and the
/// radio registry. Invariants: every fingerprint's location is one of
/// `locations`, every signal MAC is in `radio_registry`. Values are
/// immutable after construction; all operations below are pure functions.
struct Dataset {
  std::vector<Fingerprint> fingerprints;
  std::vector<Location> locations;  // sorted by id, ids unique
  RadioRegistry radio_registry;

  const Location* find_location(int id) const {
    for (const auto& l : locations)
      if (l.id == id) return &l;
    return nullptr;
  }

  int location_id(const std::string& label) const {
    for (const auto& l : locations)
      if (l.name == label) return l.id;
    throw DataError("unknown location label '" + label + "'");
  }

  std::size_t size() const { return fingerprints.size(); }
};

namespace detail {

inline std::optional<int> parse_positive_int(const std::string& s) {
  if (s.empty() || s.size() > 9) return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || value <= 0) return std::nullopt;
  return value;
}

}  // namespace detail

/// Derives the location list from the distinct labels present. Labels that
/// are all positive integers keep their numeric value as the id; otherwise
/// ids are assigned 1..K in lexicographic label order.
inline std::vector<Location> assign_locations(const std::set<std::string>& labels) {
  std::vector<Location> out;
  bool all_numeric = !labels.empty();
  std::set<int> numeric_ids;
  for (const auto& label : labels) {
    auto id = detail::parse_positive_int(label);
    if (!id || !numeric_ids.insert(*id).second) {
      all_numeric = false;
      break;
    }
  }
  int next = 1;
  for (const auto& label : labels) {
    int id = all_numeric ? *detail::parse_positive_int(label) : next++;
    out.push_back(Location{id, label});
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Assembles a Dataset from labeled fingerprints and a registry, validating
/// the invariants. Throws DataError on unlabeled fingerprints, unknown
/// MACs, empty signal maps or out-of-range RSSI. When `locations` is given
/// it is used verbatim (and may contain extra, not-yet-measured locations);
/// otherwise the list is derived from the labels present.
inline Dataset build_dataset(std::vector<Fingerprint> fingerprints, RadioRegistry registry,
                             std::optional<std::vector<Location>> locations = std::nullopt) {
  if (fingerprints.empty()) throw DataError("dataset has no fingerprints");
  std::set<std::string> labels;
  for (const auto& fp : fingerprints) {
    if (!fp.location) throw DataError("fingerprint without location label");
    if (fp.signals.empty()) throw DataError("fingerprint with empty signals");
    for (const auto& [mac, rssi] : fp.signals) {
      if (!registry.count(mac)) throw DataError("signal MAC not in registry: " + mac);
      if (rssi < kRssiFloorDbm || rssi > kRssiCeilDbm)
        throw DataError("RSSI out of range [-100, 0]: " + mac);
    }
    labels.insert(*fp.location);
  }
  Dataset ds;
  if (locations) {
    ds.locations = std::move(*locations);
    std::sort(ds.locations.begin(), ds.locations.end());
    for (std::size_t i = 1; i < ds.locations.size(); ++i)
      if (ds.locations[i].id == ds.locations[i - 1].id)
        throw DataError("duplicate location id " + std::to_string(ds.locations[i].id));
    for (const auto& label : labels) {
      const bool known = std::any_of(ds.locations.begin(), ds.locations.end(),
                                     [&](const Location& l) { return l.name == label; });
      if (!known) throw DataError("fingerprint label '" + label + "' not in location list");
    }
  } else {
    ds.locations = assign_locations(labels);
  }
  ds.fingerprints = std::move(fingerprints);
  ds.radio_registry = std::move(registry);
  return ds;
}

/// Canonical ordered list of radios plus the missing-value sentinel; defines
/// the dense vector encoding used by every classifier.
class FeatureSpace {
 public:
  FeatureSpace() = default;
  FeatureSpace(std::vector<RadioId> radios, double sentinel)
      : radios_(std::move(radios)), sentinel_(sentinel) {
    if (sentinel_ > kRssiFloorDbm)
      throw DataError("sentinel must sit at or below the observable RSSI floor");
    std::sort(radios_.begin(), radios_.end());
    for (std::size_t i = 0; i < radios_.size(); ++i) {
      if (i && radios_[i].mac == radios_[i - 1].mac)
        throw DataError("duplicate radio in feature space: " + radios_[i].mac);
      index_[radios_[i].mac] = i;
    }
  }

  const std::vector<RadioId>& radios() const { return radios_; }
  double sentinel() const { return sentinel_; }
  std::size_t size() const { return radios_.size(); }

  std::optional<std::size_t> index_of(const std::string& mac) const {
    auto it = index_.find(mac);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// FNV-1a over the ordered "mac,band" list. Serialized models carry this
  /// hash so a model can refuse vectors from a different encoding.
  std::uint64_t content_hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto eat = [&h](char c) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    };
    for (const auto& r : radios_) {
      for (char c : r.mac) eat(c);
      eat(',');
      eat(r.band == Band::kBand24 ? '2' : '5');
      eat(';');
    }
    return h;
  }

  friend bool operator==(const FeatureSpace& a, const FeatureSpace& b) {
    return a.radios_ == b.radios_ && a.sentinel_ == b.sentinel_;
  }

 private:
  std::vector<RadioId> radios_;
  double sentinel_ = kRssiFloorDbm;
  std::map<std::string, std::size_t> index_;
};

/// Dense RSSI vector, one entry per FeatureSpace radio.
using FeatureVector = std::vector<double>;

/// All radios in the registry, lexicographically ordered by MAC.
inline FeatureSpace canonical_feature_space(const Dataset& ds, double sentinel = kRssiFloorDbm) {
  if (ds.fingerprints.empty()) throw DataError("cannot build feature space of empty dataset");
  std::vector<RadioId> radios;
  radios.reserve(ds.radio_registry.size());
  for (const auto& [mac, info] : ds.radio_registry) radios.push_back(RadioId{mac, info.band});
  return FeatureSpace(std::move(radios), sentinel);
}

/// Encodes a fingerprint against a feature space. Radios absent from the
/// scan become the sentinel; radios in the scan but unknown to the space
/// are skipped and counted in *unknown_radios. Total: always returns
/// exactly space.size() entries.
inline FeatureVector vectorize(const Fingerprint& fp, const FeatureSpace& space,
                               std::size_t* unknown_radios = nullptr) {
  FeatureVector out(space.size(), space.sentinel());
  std::size_t unknown = 0;
  for (const auto& [mac, rssi] : fp.signals) {
    if (auto idx = space.index_of(mac))
      out[*idx] = rssi;
    else
      ++unknown;
  }
  if (unknown_radios) *unknown_radios = unknown;
  return out;
}

/// Band24Only iff the scan has no 5 GHz reading among registry-known radios.
/// A scan whose radios are all unknown cannot be profiled at all.
inline BandProfile detect_band_profile(const Fingerprint& fp, const RadioRegistry& registry) {
  bool any_known = false;
  for (const auto& [mac, rssi] : fp.signals) {
    auto it = registry.find(mac);
    if (it == registry.end()) continue;
    any_known = true;
    if (it->second.band == Band::kBand5) return BandProfile::kDualBand;
  }
  if (!any_known) throw DataError("unrecognized scan: no known radios");
  return BandProfile::kBand24Only;
}

/// Keeps only signals of the given band. Fingerprints left with zero
/// signals are dropped (count reported via *dropped_fingerprints).
/// Idempotent: filtering twice equals filtering once.
inline Dataset filter_to_band(const Dataset& ds, Band band,
                              std::size_t* dropped_fingerprints = nullptr) {
  RadioRegistry registry;
  for (const auto& [mac, info] : ds.radio_registry)
    if (info.band == band) registry.emplace(mac, info);

  std::vector<Fingerprint> kept;
  std::size_t dropped = 0;
  for (const auto& fp : ds.fingerprints) {
    Fingerprint filtered = fp;
    for (auto it = filtered.signals.begin(); it != filtered.signals.end();) {
      if (registry.count(it->first))
        ++it;
      else
        it = filtered.signals.erase(it);
    }
    if (filtered.signals.empty())
      ++dropped;
    else
      kept.push_back(std::move(filtered));
  }
  if (dropped_fingerprints) *dropped_fingerprints = dropped;
  if (kept.empty()) throw DataError("band filter removed every fingerprint");
  return build_dataset(std::move(kept), std::move(registry));
}

struct SplitRatios {
  double train = 0.7;
  double validation = 0.2;
  double test = 0.1;
};

struct DatasetSplit {
  Dataset train;
  Dataset validation;
  Dataset test;
  // Row indices into the input dataset, ascending. The test indices let an
  // evaluator score exactly the rows the trainer never saw.
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> validation_indices;
  std::vector<std::size_t> test_indices;
};

/// Stratified train/validation/test split: each location's fingerprints are
/// split by the same ratios, integer remainders handed out train-first.
/// Deterministic for a given seed.
inline DatasetSplit split_dataset(const Dataset& ds, const SplitRatios& ratios,
                                  std::uint64_t seed) {
  if (ratios.train <= 0 || ratios.validation <= 0 || ratios.test <= 0)
    throw DataError("split ratios must be positive");
  if (std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9)
    throw DataError("split ratios must sum to 1");

  std::map<int, std::vector<std::size_t>> by_location;
  for (std::size_t i = 0; i < ds.fingerprints.size(); ++i)
    by_location[ds.location_id(*ds.fingerprints[i].location)].push_back(i);

  std::vector<std::size_t> part_rows[3];
  const double ratio[3] = {ratios.train, ratios.validation, ratios.test};
  for (auto& [loc, rows] : by_location) {
    if (rows.size() < 3) {
      const Location* l = ds.find_location(loc);
      throw DataError("location '" + (l ? l->name : std::to_string(loc)) +
                      "' has fewer than 3 fingerprints");
    }
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(loc)));
    rng.shuffle(rows);

    std::size_t counts[3];
    std::size_t assigned = 0;
    for (int p = 0; p < 3; ++p) {
      counts[p] = static_cast<std::size_t>(ratio[p] * static_cast<double>(rows.size()));
      assigned += counts[p];
    }
    for (int p = 0; assigned < rows.size(); p = (p + 1) % 3) {  // train-first
      ++counts[p];
      ++assigned;
    }
    std::size_t offset = 0;
    for (int p = 0; p < 3; ++p) {
      for (std::size_t k = 0; k < counts[p]; ++k) part_rows[p].push_back(rows[offset + k]);
      offset += counts[p];
    }
  }

  DatasetSplit split;
  std::vector<std::size_t>* indices[3] = {&split.train_indices, &split.validation_indices,
                                          &split.test_indices};
  Dataset* parts[3] = {&split.train, &split.validation, &split.test};
  for (int p = 0; p < 3; ++p) {
    std::sort(part_rows[p].begin(), part_rows[p].end());
    *indices[p] = part_rows[p];
    std::vector<Fingerprint> fps;
    fps.reserve(part_rows[p].size());
    for (std::size_t row : part_rows[p]) fps.push_back(ds.fingerprints[row]);
    if (!fps.empty()) *parts[p] = build_dataset(std::move(fps), ds.radio_registry);
  }
  return split;
}

/// Keeps round(fraction * count) fingerprints per location, chosen uniformly
/// at random; preserves per-location proportions within rounding of one.
inline Dataset stratified_subsample(const Dataset& ds, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0) || fraction > 1.0) throw DataError("fraction must be in (0, 1]");
  if (fraction == 1.0) return ds;

  std::map<int, std::vector<std::size_t>> by_location;
  for (std::size_t i = 0; i < ds.fingerprints.size(); ++i)
    by_location[ds.location_id(*ds.fingerprints[i].location)].push_back(i);

  std::vector<std::size_t> chosen;
  for (auto& [loc, rows] : by_location) {
    const auto keep =
        static_cast<std::size_t>(std::llround(fraction * static_cast<double>(rows.size())));
    if (keep == 0) {
      const Location* l = ds.find_location(loc);
      throw DataError("fraction leaves zero fingerprints at location '" +
                      (l ? l->name : std::to_string(loc)) + "'");
    }
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(loc)));
    rng.shuffle(rows);
    chosen.insert(chosen.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(keep));
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<Fingerprint> fps;
  fps.reserve(chosen.size());
  for (std::size_t row : chosen) fps.push_back(ds.fingerprints[row]);
  return build_dataset(std::move(fps), ds.radio_registry);
}

/// Set of AP identifiers present in a registry.
inline std::set<std::string> ap_identifiers(const RadioRegistry& registry) {
  std::set<std::string> aps;
  for (const auto& [mac, info] : registry) aps.insert(info.ap);
  return aps;
}

/// Removes all radios of the given APs. Fingerprints left empty are dropped
/// and counted; removing every AP (or an unknown one) is an error.
inline Dataset remove_aps(const Dataset& ds, const std::set<std::string>& aps,
                          std::size_t* dropped_fingerprints = nullptr) {
  const auto known = ap_identifiers(ds.radio_registry);
  for (const auto& ap : aps)
    if (!known.count(ap)) throw DataError("unknown AP identifier: " + ap);
  if (dropped_fingerprints) *dropped_fingerprints = 0;
  if (aps.empty()) return ds;

  RadioRegistry registry;
  for (const auto& [mac, info] : ds.radio_registry)
    if (!aps.count(info.ap)) registry.emplace(mac, info);
  if (registry.empty()) throw DataError("removing these APs leaves no radios");

  std::vector<Fingerprint> kept;
  std::size_t dropped = 0;
  for (const auto& fp : ds.fingerprints) {
    Fingerprint filtered = fp;
    for (auto it = filtered.signals.begin(); it != filtered.signals.end();) {
      if (registry.count(it->first))
        ++it;
      else
        it = filtered.signals.erase(it);
    }
    if (filtered.signals.empty())
      ++dropped;
    else
      kept.push_back(std::move(filtered));
  }
  if (dropped_fingerprints) *dropped_fingerprints = dropped;
  if (kept.empty()) throw DataError("removing these APs leaves no fingerprints");
  return build_dataset(std::move(kept), std::move(registry));
}

}  // namespace wifiloc
