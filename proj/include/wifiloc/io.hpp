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
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wifiloc/dataset.hpp"
#include "wifiloc/error.hpp"
#include "wifiloc/fingerprint.hpp"

namespace wifiloc {

inline void write_json_file(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

/// Counters reported by every ingestion path. Nothing here is fatal except
/// ending up with zero usable fingerprints.
struct IngestSummary {
  std::size_t records_read = 0;
  std::size_t kept = 0;
  std::size_t malformed = 0;              // unparseable records, skipped
  std::size_t unlabeled = 0;              // no location label, skipped
  std::size_t empty_dropped = 0;          // no usable signals left
  std::size_t invalid_mac_signals = 0;    // signal dropped, bad MAC
  std::size_t unknown_radio_signals = 0;  // signal dropped, MAC not in registry
  std::size_t clamped_rssi = 0;           // RSSI clamped into [-100, 0]
  std::size_t ignored_fields = 0;         // import adapter: fields it has no use for
  std::map<std::string, std::size_t> per_location;
};

// --- JSON <-> Fingerprint ---------------------------------------------------

inline nlohmann::json fingerprint_to_json(const Fingerprint& fp) {
  nlohmann::json signals = nlohmann::json::object();
  for (const auto& [mac, rssi] : fp.signals) signals[mac] = rssi;
  nlohmann::json j;
  j["device_id"] = fp.device_id;
  j["ts_ms"] = fp.ts_ms;
  if (fp.location)
    j["location"] = *fp.location;
  else
    j["location"] = nullptr;
  j["signals"] = std::move(signals);
  return j;
}

/// Parses the canonical fingerprint object. Throws DataError on shape
/// violations; MAC normalization and RSSI clamping happen later in
/// sanitize_fingerprint so the counts can be reported.
inline Fingerprint fingerprint_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("fingerprint must be a JSON object");
  Fingerprint fp;
  fp.device_id = j.value("device_id", std::string{});
  fp.ts_ms = j.value("ts_ms", static_cast<std::int64_t>(0));
  if (j.contains("location") && !j["location"].is_null())
    fp.location = j["location"].get<std::string>();
  if (!j.contains("signals") || !j["signals"].is_object())
    throw DataError("fingerprint missing signals object");
  for (const auto& [mac, rssi] : j["signals"].items()) {
    if (!rssi.is_number()) throw DataError("RSSI for " + mac + " is not a number");
    fp.signals[mac] = rssi.get<double>();
  }
  return fp;
}

/// Normalizes MACs, merges duplicates (strongest reading wins) and clamps
/// RSSI into [-100, 0]. Optionally drops MACs missing from a registry.
/// Returns false when no signal survives.
inline bool sanitize_fingerprint(Fingerprint& fp, const RadioRegistry* registry,
                                 IngestSummary& summary) {
  std::map<std::string, double> clean;
  for (const auto& [raw_mac, raw_rssi] : fp.signals) {
    auto mac = normalize_mac(raw_mac);
    if (!mac) {
      ++summary.invalid_mac_signals;
      continue;
    }
    if (registry && !registry->count(*mac)) {
      ++summary.unknown_radio_signals;
      continue;
    }
    double rssi = raw_rssi;
    if (rssi < kRssiFloorDbm || rssi > kRssiCeilDbm) {
      rssi = std::clamp(rssi, kRssiFloorDbm, kRssiCeilDbm);
      ++summary.clamped_rssi;
    }
    auto [it, inserted] = clean.emplace(*mac, rssi);
    if (!inserted) it->second = std::max(it->second, rssi);
  }
  fp.signals = std::move(clean);
  return !fp.signals.empty();
}

// --- Radio registry ----------------------------------------------------------

/// CSV `mac,band[,ap]` with band in {2.4, 5}. The optional third column
/// groups the radios of one physical AP; it defaults to the radio's MAC.
inline RadioRegistry read_registry_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open registry file " + path.string());
  RadioRegistry registry;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string mac_field, band_field, ap_field;
    std::getline(ss, mac_field, ',');
    std::getline(ss, band_field, ',');
    std::getline(ss, ap_field, ',');
    if (first && mac_field == "mac") {
      first = false;
      continue;
    }
    first = false;
    auto mac = normalize_mac(mac_field);
    if (!mac) throw DataError("registry: invalid MAC '" + mac_field + "'");
    RadioInfo info;
    info.band = band_from_name(band_field);
    info.ap = ap_field.empty() ? *mac : ap_field;
    registry[*mac] = info;
  }
  if (registry.empty()) throw DataError("registry file is empty: " + path.string());
  return registry;
}

inline void write_registry_csv(const RadioRegistry& registry,
                               const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write registry file " + path.string());
  out << "mac,band,ap\n";
  for (const auto& [mac, info] : registry)
    out << mac << ',' << band_name(info.band) << ',' << info.ap << '\n';
}

// --- Canonical JSONL ----------------------------------------------------------

/// One canonical JSON object per line. Blank lines are skipped, malformed
/// lines counted. No sanitization here.
inline std::vector<Fingerprint> read_fingerprints_jsonl(const std::filesystem::path& path,
                                                        IngestSummary& summary) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open fingerprint file " + path.string());
  std::vector<Fingerprint> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++summary.records_read;
    try {
      out.push_back(fingerprint_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception&) {
      ++summary.malformed;
    }
  }
  return out;
}

inline void write_fingerprints_jsonl(const std::vector<Fingerprint>& fps,
                                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write fingerprint file " + path.string());
  for (const auto& fp : fps) out << fingerprint_to_json(fp).dump() << '\n';
}

// --- CSV matrix ----------------------------------------------------------------

/// Matrix layout: header `location,<mac1>,<mac2>,...`; one row per
/// fingerprint; empty cell = radio not observed.
inline std::vector<Fingerprint> read_fingerprints_csv(const std::filesystem::path& path,
                                                      IngestSummary& summary) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open fingerprint file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError("CSV file is empty: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> macs;
  {
    std::stringstream ss(line);
    std::string field;
    std::getline(ss, field, ',');
    if (field != "location")
      throw DataError("CSV header must start with 'location', got '" + field + "'");
    while (std::getline(ss, field, ',')) macs.push_back(field);
  }
  if (macs.empty()) throw DataError("CSV header lists no radios");

  std::vector<Fingerprint> out;
  std::int64_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++summary.records_read;
    ++row;
    std::stringstream ss(line);
    std::string field;
    std::getline(ss, field, ',');
    Fingerprint fp;
    fp.device_id = "csv-import";
    fp.ts_ms = row;
    if (!field.empty()) fp.location = field;
    bool bad = false;
    for (const auto& mac : macs) {
      if (!std::getline(ss, field, ',')) field.clear();
      if (field.empty()) continue;
      try {
        fp.signals[mac] = std::stod(field);
      } catch (const std::exception&) {
        bad = true;
        break;
      }
    }
    if (bad) {
      ++summary.malformed;
      continue;
    }
    out.push_back(std::move(fp));
  }
  return out;
}

inline void write_fingerprints_csv(const std::vector<Fingerprint>& fps,
                                   const std::vector<std::string>& macs,
                                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write fingerprint file " + path.string());
  out << "location";
  for (const auto& mac : macs) out << ',' << mac;
  out << '\n';
  for (const auto& fp : fps) {
    out << (fp.location ? *fp.location : std::string{});
    for (const auto& mac : macs) {
      out << ',';
      auto it = fp.signals.find(mac);
      if (it != fp.signals.end()) out << nlohmann::json(it->second).dump();
    }
    out << '\n';
  }
}

// --- FIND3-style import ------------------------------------------------------

/// Best-effort adapter for JSONL scan records of the shape
/// {"d": device, "t": timestamp, "l": location, "s": {"wifi": {mac: rssi}}}.
/// Sensor families other than wifi and unrecognized fields are skipped and
/// counted. Timestamps that look like seconds are promoted to milliseconds.
inline std::vector<Fingerprint> read_fingerprints_find3(const std::filesystem::path& path,
                                                        IngestSummary& summary) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open fingerprint file " + path.string());
  std::vector<Fingerprint> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++summary.records_read;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception&) {
      ++summary.malformed;
      continue;
    }
    if (!j.is_object()) {
      ++summary.malformed;
      continue;
    }
    Fingerprint fp;
    bool have_signals = false;
    for (const auto& [key, value] : j.items()) {
      if (key == "d" && value.is_string()) {
        fp.device_id = value.get<std::string>();
      } else if (key == "t" && value.is_number()) {
        auto t = value.get<std::int64_t>();
        if (t != 0 && t < 100000000000LL) t *= 1000;  // seconds -> ms
        fp.ts_ms = t;
      } else if (key == "l" && value.is_string()) {
        auto label = value.get<std::string>();
        if (!label.empty()) fp.location = label;
      } else if (key == "s" && value.is_object()) {
        for (const auto& [family, readings] : value.items()) {
          if (family != "wifi" || !readings.is_object()) {
            ++summary.ignored_fields;
            continue;
          }
          for (const auto& [mac, rssi] : readings.items()) {
            if (rssi.is_number())
              fp.signals[mac] = rssi.get<double>();
            else
              ++summary.ignored_fields;
          }
          have_signals = true;
        }
      } else {
        ++summary.ignored_fields;
      }
    }
    if (!have_signals && fp.signals.empty()) {
      ++summary.malformed;
      continue;
    }
    out.push_back(std::move(fp));
  }
  return out;
}

// --- Normalization into a dataset --------------------------------------------

/// Runs sanitation over raw imported fingerprints and keeps the labeled,
/// non-empty ones. The result feeds build_dataset.
inline std::vector<Fingerprint> normalize_for_training(std::vector<Fingerprint> raw,
                                                       const RadioRegistry& registry,
                                                       IngestSummary& summary) {
  std::vector<Fingerprint> out;
  out.reserve(raw.size());
  for (auto& fp : raw) {
    if (!fp.location || fp.location->empty()) {
      ++summary.unlabeled;
      continue;
    }
    if (!sanitize_fingerprint(fp, &registry, summary)) {
      ++summary.empty_dropped;
      continue;
    }
    ++summary.kept;
    ++summary.per_location[*fp.location];
    out.push_back(std::move(fp));
  }
  return out;
}

/// Content digest of a labeled fingerprint collection: XOR of per-record
/// FNV-1a hashes over "location|mac=rssi;...". Order-independent and blind
/// to device ids and timestamps, so the same data imported from different
/// formats digests identically.
inline std::uint64_t content_digest(const std::vector<Fingerprint>& fps) {
  std::uint64_t acc = 0;
  for (const auto& fp : fps) {
    std::string repr = fp.location ? *fp.location : std::string{};
    repr.push_back('|');
    for (const auto& [mac, rssi] : fp.signals) {
      repr += mac;
      repr.push_back('=');
      repr += nlohmann::json(rssi).dump();
      repr.push_back(';');
    }
    std::uint64_t h = 1469598103934665603ull;
    for (char c : repr) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    acc ^= h;
  }
  return acc;
}

// --- Store directory -----------------------------------------------------------

inline constexpr const char* kStoreFingerprints = "fingerprints.jsonl";
inline constexpr const char* kStoreRegistry = "registry.csv";
inline constexpr const char* kStoreLocations = "locations.csv";

inline void write_locations_csv(const std::vector<Location>& locations,
                                const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write locations file " + path.string());
  out << "id,name\n";
  for (const auto& l : locations) out << l.id << ',' << l.name << '\n';
}

inline std::vector<Location> read_locations_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open locations file " + path.string());
  std::vector<Location> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first && line.rfind("id,", 0) == 0) {
      first = false;
      continue;
    }
    first = false;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw DataError("locations: malformed line '" + line + "'");
    Location l;
    l.id = std::stoi(line.substr(0, comma));
    l.name = line.substr(comma + 1);
    out.push_back(std::move(l));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// A store is a directory holding the normalized training data:
/// fingerprints.jsonl, registry.csv and locations.csv.
inline void write_store(const Dataset& ds, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  write_fingerprints_jsonl(ds.fingerprints, dir / kStoreFingerprints);
  write_registry_csv(ds.radio_registry, dir / kStoreRegistry);
  write_locations_csv(ds.locations, dir / kStoreLocations);
}

inline Dataset read_store(const std::filesystem::path& dir, IngestSummary* summary = nullptr) {
  IngestSummary local;
  IngestSummary& s = summary ? *summary : local;
  auto registry = read_registry_csv(dir / kStoreRegistry);
  auto raw = read_fingerprints_jsonl(dir / kStoreFingerprints, s);
  auto fps = normalize_for_training(std::move(raw), registry, s);
  if (fps.empty()) throw DataError("store contains no usable fingerprints: " + dir.string());
  std::optional<std::vector<Location>> locations;
  if (std::filesystem::exists(dir / kStoreLocations))
    locations = read_locations_csv(dir / kStoreLocations);
  return build_dataset(std::move(fps), std::move(registry), std::move(locations));
}

}  // namespace wifiloc
