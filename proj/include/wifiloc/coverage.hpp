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
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wifiloc/dataset.hpp"

namespace wifiloc {

/// Default visibility threshold: device receiver sensitivity. A reading at
/// or above this level counts as "the AP is visible here".
inline constexpr double kDefaultVisibilityDbm = -90.0;

/// Per-(location, AP) coverage ratios. `covered_ap_count[i]` is the number
/// of APs visible in at least half of location i's fingerprints, the
/// working definition of "this location is covered by that AP".
struct CoverageTable {
  std::vector<int> location_ids;              // ascending
  std::vector<std::string> aps;               // ascending AP identifiers
  std::vector<std::vector<double>> ratios;    // [location][ap] in [0, 1]
  std::vector<int> covered_ap_count;          // per location, ratio >= 0.5

  double ratio(int location_id, const std::string& ap) const {
    auto li = std::find(location_ids.begin(), location_ids.end(), location_id);
    auto ai = std::find(aps.begin(), aps.end(), ap);
    if (li == location_ids.end() || ai == aps.end())
      throw DataError("coverage table lookup out of range");
    return ratios[static_cast<std::size_t>(li - location_ids.begin())]
                 [static_cast<std::size_t>(ai - aps.begin())];
  }

  int min_covered_ap_count() const {
    return covered_ap_count.empty()
               ? 0
               : *std::min_element(covered_ap_count.begin(), covered_ap_count.end());
  }
};

/// Fraction of each location's fingerprints that see each AP (any of its
/// radios at or above `visibility_threshold_dbm`).
inline CoverageTable coverage_table(const Dataset& ds,
                                    double visibility_threshold_dbm = kDefaultVisibilityDbm) {
  CoverageTable table;
  for (const auto& loc : ds.locations) table.location_ids.push_back(loc.id);
  const auto ap_set = ap_identifiers(ds.radio_registry);
  table.aps.assign(ap_set.begin(), ap_set.end());

  std::map<int, std::size_t> loc_index;
  for (std::size_t i = 0; i < table.location_ids.size(); ++i)
    loc_index[table.location_ids[i]] = i;
  std::map<std::string, std::size_t> ap_index;
  for (std::size_t i = 0; i < table.aps.size(); ++i) ap_index[table.aps[i]] = i;

  std::vector<std::vector<std::size_t>> seen(table.location_ids.size(),
                                             std::vector<std::size_t>(table.aps.size(), 0));
  std::vector<std::size_t> totals(table.location_ids.size(), 0);
  for (const auto& fp : ds.fingerprints) {
    const std::size_t li = loc_index.at(ds.location_id(*fp.location));
    ++totals[li];
    std::set<std::size_t> visible;
    for (const auto& [mac, rssi] : fp.signals) {
      if (rssi < visibility_threshold_dbm) continue;
      auto it = ds.radio_registry.find(mac);
      if (it != ds.radio_registry.end()) visible.insert(ap_index.at(it->second.ap));
    }
    for (std::size_t ai : visible) ++seen[li][ai];
  }

  table.ratios.resize(table.location_ids.size());
  table.covered_ap_count.resize(table.location_ids.size(), 0);
  for (std::size_t li = 0; li < table.location_ids.size(); ++li) {
    table.ratios[li].resize(table.aps.size(), 0.0);
    for (std::size_t ai = 0; ai < table.aps.size(); ++ai) {
      table.ratios[li][ai] =
          totals[li] ? static_cast<double>(seen[li][ai]) / static_cast<double>(totals[li]) : 0.0;
      if (table.ratios[li][ai] >= 0.5) ++table.covered_ap_count[li];
    }
  }
  return table;
}

namespace detail {

/// Pearson correlation; 0 when either series is constant.
inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  if (va < 1e-12 || vb < 1e-12) return 0.0;
  return cov / std::sqrt(va * vb);
}

}  // namespace detail

/// Orders APs most-redundant first. Greedy: repeatedly drop the AP whose
/// removal keeps the minimum per-location covered-AP count highest; ties go
/// to the AP with the higher mean RSSI correlation against the APs still
/// standing, then to the lexicographically smaller identifier.
inline std::vector<std::string> redundancy_ranking(
    const Dataset& ds, double visibility_threshold_dbm = kDefaultVisibilityDbm) {
  const CoverageTable table = coverage_table(ds, visibility_threshold_dbm);
  const std::size_t ap_count = table.aps.size();
  if (ap_count < 2) throw DataError("redundancy ranking needs at least 2 APs");
  const std::size_t loc_count = table.location_ids.size();

  // Per-AP strength series over all fingerprints: strongest radio of the AP
  // present in the scan, else the RSSI floor.
  std::map<std::string, std::size_t> ap_index;
  for (std::size_t i = 0; i < ap_count; ++i) ap_index[table.aps[i]] = i;
  std::vector<std::vector<double>> series(ap_count,
                                          std::vector<double>(ds.fingerprints.size(), kRssiFloorDbm));
  for (std::size_t fi = 0; fi < ds.fingerprints.size(); ++fi) {
    for (const auto& [mac, rssi] : ds.fingerprints[fi].signals) {
      auto it = ds.radio_registry.find(mac);
      if (it == ds.radio_registry.end()) continue;
      auto& cell = series[ap_index.at(it->second.ap)][fi];
      cell = std::max(cell, rssi);
    }
  }
  std::vector<std::vector<double>> corr(ap_count, std::vector<double>(ap_count, 1.0));
  for (std::size_t i = 0; i < ap_count; ++i)
    for (std::size_t j = i + 1; j < ap_count; ++j)
      corr[i][j] = corr[j][i] = detail::pearson(series[i], series[j]);

  // Final tie-break key: the lexicographically smallest MAC of each AP.
  std::vector<std::string> ap_min_mac(ap_count);
  for (const auto& [mac, info] : ds.radio_registry) {
    auto& slot = ap_min_mac[ap_index.at(info.ap)];
    if (slot.empty() || mac < slot) slot = mac;
  }

  std::vector<std::vector<bool>> covers(loc_count, std::vector<bool>(ap_count, false));
  std::vector<int> covered_now(loc_count, 0);
  for (std::size_t li = 0; li < loc_count; ++li)
    for (std::size_t ai = 0; ai < ap_count; ++ai)
      if (table.ratios[li][ai] >= 0.5) {
        covers[li][ai] = true;
        ++covered_now[li];
      }

  std::vector<bool> removed(ap_count, false);
  std::vector<std::string> ranking;
  ranking.reserve(ap_count);
  for (std::size_t round = 0; round < ap_count; ++round) {
    std::size_t best = ap_count;
    int best_min = -1;
    double best_corr = 0.0;
    for (std::size_t ai = 0; ai < ap_count; ++ai) {
      if (removed[ai]) continue;
      int min_after = std::numeric_limits<int>::max();
      for (std::size_t li = 0; li < loc_count; ++li)
        min_after = std::min(min_after, covered_now[li] - (covers[li][ai] ? 1 : 0));
      double mean_corr = 0.0;
      int others = 0;
      for (std::size_t bi = 0; bi < ap_count; ++bi) {
        if (bi == ai || removed[bi]) continue;
        mean_corr += corr[ai][bi];
        ++others;
      }
      mean_corr = others ? mean_corr / others : 0.0;
      const bool better =
          best == ap_count || min_after > best_min ||
          (min_after == best_min && mean_corr > best_corr + 1e-12) ||
          (min_after == best_min && std::abs(mean_corr - best_corr) <= 1e-12 &&
           ap_min_mac[ai] < ap_min_mac[best]);
      if (better) {
        best = ai;
        best_min = min_after;
        best_corr = mean_corr;
      }
    }
    removed[best] = true;
    ranking.push_back(table.aps[best]);
    for (std::size_t li = 0; li < loc_count; ++li)
      if (covers[li][best]) --covered_now[li];
  }
  return ranking;
}

}  // namespace wifiloc
