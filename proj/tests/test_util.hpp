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

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "wifiloc/dataset.hpp"
#include "wifiloc/fingerprint.hpp"

namespace testutil {

/// MAC of radio `band` of AP number `ap` (1-based).
inline std::string radio_mac(int ap, wifiloc::Band band) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "aa:00:00:00:%02x:%02x", ap,
                band == wifiloc::Band::kBand24 ? 0x24 : 0x05);
  return buf;
}

inline std::string ap_name(int ap) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "ap%02d", ap);
  return buf;
}

/// Registry of `aps` dual-band APs (two radios each).
inline wifiloc::RadioRegistry dual_band_registry(int aps) {
  wifiloc::RadioRegistry reg;
  for (int a = 1; a <= aps; ++a) {
    reg[radio_mac(a, wifiloc::Band::kBand24)] = {wifiloc::Band::kBand24, ap_name(a)};
    reg[radio_mac(a, wifiloc::Band::kBand5)] = {wifiloc::Band::kBand5, ap_name(a)};
  }
  return reg;
}

inline wifiloc::Fingerprint make_fp(const std::string& label,
                                    std::map<std::string, double> signals,
                                    const std::string& device = "dev",
                                    std::int64_t ts = 0) {
  wifiloc::Fingerprint fp;
  fp.device_id = device;
  fp.ts_ms = ts;
  if (!label.empty()) fp.location = label;
  fp.signals = std::move(signals);
  return fp;
}

/// Unique scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    dir_ = std::filesystem::temp_directory_path() /
           ("wifiloc-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  const std::filesystem::path& path() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace testutil
