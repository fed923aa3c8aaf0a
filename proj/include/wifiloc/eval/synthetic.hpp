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

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "wifiloc/dataset.hpp"
#include "wifiloc/random.hpp"

namespace wifiloc {

/// Axis-aligned rectangular positioning area on the synthetic floor.
struct SyntheticCell {
  std::string label;
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

struct SyntheticAp {
  std::string name;
  double x = 0, y = 0;
};

/// Log-distance path-loss fixture used for dataset-independent testing.
/// Each AP carries a 2.4 GHz and a 5 GHz radio at the same position.
struct SyntheticConfig {
  double width = 100.0;   // metres
  double height = 40.0;
  std::vector<SyntheticAp> aps;
  std::vector<SyntheticCell> cells;
  double path_loss_exponent = 2.5;
  double ref_power_dbm = -40.0;  // received power at 1 m
  double shadow_sigma_db = 6.0;
  int samples_per_location = 250;
  std::uint64_t seed = 42;
};

/// Log-distance model before shadowing noise.
inline double path_loss_rssi(double ref_power_dbm, double exponent, double distance_m) {
  const double d = std::max(distance_m, 0.1);
  return ref_power_dbm - 10.0 * exponent * std::log10(d);
}

inline constexpr double kSyntheticClampLow = -100.0;
inline constexpr double kSyntheticClampHigh = -30.0;
inline constexpr double kSyntheticVisibility = -95.0;  // weaker readings are dropped

namespace detail {

inline std::string synthetic_mac(std::size_t ap_index, Band band) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "02:00:00:00:%02x:%02x", static_cast<unsigned>(ap_index + 1),
                band == Band::kBand24 ? 0x24u : 0x05u);
  return buf;
}

}  // namespace detail

/// Samples uniform points per cell and synthesizes RSSI readings with
/// log-distance path loss plus Gaussian shadowing. Readings clamp into
/// [-100, -30]; anything below -95 is invisible and dropped. Deterministic
/// for a given seed.
inline Dataset generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.cells.size() < 2 || cfg.aps.empty() || cfg.shadow_sigma_db < 0 ||
      cfg.samples_per_location < 1)
    throw DataError("synthetic config needs >= 2 cells, >= 1 AP, sigma >= 0");
  for (const auto& c : cfg.cells)
    if (!(c.x1 > c.x0) || !(c.y1 > c.y0)) throw DataError("invalid cell geometry: " + c.label);

  RadioRegistry registry;
  for (std::size_t a = 0; a < cfg.aps.size(); ++a) {
    registry[detail::synthetic_mac(a, Band::kBand24)] = {Band::kBand24, cfg.aps[a].name};
    registry[detail::synthetic_mac(a, Band::kBand5)] = {Band::kBand5, cfg.aps[a].name};
  }

  Rng rng(cfg.seed);
  std::vector<Fingerprint> fps;
  std::int64_t ts = 0;
  for (const auto& cell : cfg.cells) {
    std::size_t produced = 0;
    for (int i = 0; i < cfg.samples_per_location; ++i) {
      const double px = rng.uniform(cell.x0, cell.x1);
      const double py = rng.uniform(cell.y0, cell.y1);
      Fingerprint fp;
      fp.device_id = "synth";
      fp.ts_ms = ++ts;
      fp.location = cell.label;
      for (std::size_t a = 0; a < cfg.aps.size(); ++a) {
        const double d = std::hypot(px - cfg.aps[a].x, py - cfg.aps[a].y);
        for (Band band : {Band::kBand24, Band::kBand5}) {
          double rssi = path_loss_rssi(cfg.ref_power_dbm, cfg.path_loss_exponent, d) +
                        rng.normal(0.0, cfg.shadow_sigma_db);
          rssi = std::clamp(rssi, kSyntheticClampLow, kSyntheticClampHigh);
          if (rssi < kSyntheticVisibility) continue;
          fp.signals[detail::synthetic_mac(a, band)] = rssi;
        }
      }
      if (fp.signals.empty()) continue;
      ++produced;
      fps.push_back(std::move(fp));
    }
    if (produced == 0)
      throw DataError("invalid geometry: cell '" + cell.label + "' hears no AP at all");
  }
  return build_dataset(std::move(fps), std::move(registry));
}

/// Convenience floor plan: `cells` areas in a row, 20 m apart, with `aps`
/// access points spread along the floor. Far enough apart that sigma = 0
/// makes the areas perfectly distinguishable.
inline SyntheticConfig grid_fixture(int cells, int aps, double sigma, int samples_per_location,
                                    std::uint64_t seed) {
  if (cells < 2 || aps < 1) throw DataError("grid fixture needs >= 2 cells and >= 1 AP");
  SyntheticConfig cfg;
  cfg.width = 20.0 * cells;
  cfg.height = 20.0;
  cfg.shadow_sigma_db = sigma;
  cfg.samples_per_location = samples_per_location;
  cfg.seed = seed;
  for (int c = 0; c < cells; ++c) {
    SyntheticCell cell;
    cell.label = std::to_string(c + 1);
    cell.x0 = 20.0 * c + 7.0;
    cell.x1 = 20.0 * c + 13.0;
    cell.y0 = 7.0;
    cell.y1 = 13.0;
    cfg.cells.push_back(std::move(cell));
  }
  for (int a = 0; a < aps; ++a) {
    SyntheticAp ap;
    ap.name = "ap" + std::to_string(a + 1);
    ap.x = cfg.width * (static_cast<double>(a) + 0.5) / static_cast<double>(aps);
    ap.y = 3.0;
    cfg.aps.push_back(std::move(ap));
  }
  return cfg;
}

}  // namespace wifiloc
