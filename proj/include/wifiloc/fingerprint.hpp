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

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "wifiloc/error.hpp"

namespace wifiloc {

/// Wi-Fi frequency band of one AP radio.
enum class Band : std::uint8_t { kBand24, kBand5 };

inline const char* band_name(Band b) {
  return b == Band::kBand24 ? "2.4" : "5";
}

inline Band band_from_name(const std::string& s) {
  if (s == "2.4" || s == "2.4GHz" || s == "2.4ghz" || s == "24") return Band::kBand24;
  if (s == "5" || s == "5GHz" || s == "5ghz") return Band::kBand5;
  throw DataError("unknown band '" + s + "' (expected 2.4 or 5)");
}

/// Whether a scanning device reports 5 GHz radios. A scan with no 5 GHz
/// readings at all is taken as coming from a 2.4 GHz-only device.
enum class BandProfile : std::uint8_t { kDualBand, kBand24Only };

inline const char* band_profile_name(BandProfile p) {
  return p == BandProfile::kDualBand ? "dual" : "2.4-only";
}

/// One AP radio: normalized MAC plus the band it transmits on.
/// Ordering is lexicographic by MAC.
struct RadioId {
  std::string mac;
  Band band = Band::kBand24;

  friend bool operator==(const RadioId& a, const RadioId& b) {
    return a.mac == b.mac && a.band == b.band;
  }
  friend bool operator<(const RadioId& a, const RadioId& b) { return a.mac < b.mac; }
};

inline bool is_normalized_mac(const std::string& mac) {
  if (mac.size() != 17) return false;
  for (std::size_t i = 0; i < mac.size(); ++i) {
    if (i % 3 == 2) {
      if (mac[i] != ':') return false;
    } else if (!std::isxdigit(static_cast<unsigned char>(mac[i])) ||
               std::isupper(static_cast<unsigned char>(mac[i]))) {
      return false;
    }
  }
  return true;
}

/// Normalizes a MAC address to lowercase colon-separated form. Accepts
/// colon/dash-separated or bare 12-digit hex input.
inline std::optional<std::string> normalize_mac(const std::string& raw) {
  std::string hex;
  hex.reserve(12);
  for (char c : raw) {
    if (c == ':' || c == '-' || c == '.') continue;
    if (!std::isxdigit(static_cast<unsigned char>(c))) return std::nullopt;
    hex.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (hex.size() != 12) return std::nullopt;
  std::string out;
  out.reserve(17);
  for (std::size_t i = 0; i < 12; i += 2) {
    if (i) out.push_back(':');
    out.push_back(hex[i]);
    out.push_back(hex[i + 1]);
  }
  return out;
}

/// A positioning area: the class label of the localization problem.
struct Location {
  int id = 0;                // small positive integer, unique per deployment
  std::string name;          // human-readable label

  friend bool operator==(const Location& a, const Location& b) {
    return a.id == b.id && a.name == b.name;
  }
  friend bool operator<(const Location& a, const Location& b) { return a.id < b.id; }
};

/// One scan: every (radio MAC -> RSSI dBm) pair a device observed at one
/// instant, optionally labeled with the true location.
struct Fingerprint {
  std::string device_id;
  std::int64_t ts_ms = 0;                 // UTC milliseconds
  std::optional<std::string> location;    // label; present for training data
  std::map<std::string, double> signals;  // normalized MAC -> RSSI dBm

  friend bool operator==(const Fingerprint& a, const Fingerprint& b) {
    return a.device_id == b.device_id && a.ts_ms == b.ts_ms &&
           a.location == b.location && a.signals == b.signals;
  }
};

inline constexpr double kRssiFloorDbm = -100.0;
inline constexpr double kRssiCeilDbm = 0.0;

}  // namespace wifiloc
