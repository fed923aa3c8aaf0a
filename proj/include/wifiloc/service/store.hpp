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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "wifiloc/ensemble/bundle.hpp"
#include "wifiloc/io.hpp"

namespace wifiloc {

/// Append-only labeled fingerprint store backed by the same directory
/// layout `ingest` produces. A single writer appends with flush-per-record;
/// existing entries are never rewritten.
class FingerprintStore {
 public:
  explicit FingerprintStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
    if (std::filesystem::exists(dir_ / kStoreRegistry))
      registry_ = read_registry_csv(dir_ / kStoreRegistry);
    if (std::filesystem::exists(dir_ / kStoreFingerprints)) {
      IngestSummary summary;
      auto raw = read_fingerprints_jsonl(dir_ / kStoreFingerprints, summary);
      for (auto& fp : raw) {
        IngestSummary scratch;
        if (fp.location && sanitize_fingerprint(fp, nullptr, scratch))
          fingerprints_.push_back(std::move(fp));
      }
    }
    if (std::filesystem::exists(dir_ / kStoreLocations))
      locations_ = read_locations_csv(dir_ / kStoreLocations);
    else
      derive_locations();
    log_.open(dir_ / kStoreFingerprints, std::ios::app);
    if (!log_) throw IoError("cannot open fingerprint log for append");
  }

  /// Appends one labeled, sanitized fingerprint durably. Returns the new
  /// total for its location.
  std::size_t append(const Fingerprint& fp) {
    std::lock_guard lock(mu_);
    log_ << fingerprint_to_json(fp).dump() << '\n';
    log_.flush();
    if (!log_) throw IoError("fingerprint log write failed");
    fingerprints_.push_back(fp);
    std::size_t count = 0;
    for (const auto& stored : fingerprints_)
      if (stored.location == fp.location) ++count;
    return count;
  }

  bool knows_location(const std::string& label) const {
    std::lock_guard lock(mu_);
    for (const auto& l : locations_)
      if (l.name == label) return true;
    return false;
  }

  std::vector<Location> locations() const {
    std::lock_guard lock(mu_);
    return locations_;
  }

  RadioRegistry registry() const {
    std::lock_guard lock(mu_);
    return registry_;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return fingerprints_.size();
  }

  std::map<std::string, std::size_t> per_location_counts() const {
    std::lock_guard lock(mu_);
    std::map<std::string, std::size_t> counts;
    for (const auto& fp : fingerprints_)
      if (fp.location) ++counts[*fp.location];
    return counts;
  }

  /// Materializes the training dataset from the current contents. Signals
  /// from radios missing in the registry are dropped (and counted) here,
  /// not at append time, so late registry updates can recover them.
  Dataset dataset(IngestSummary* summary = nullptr) const {
    std::lock_guard lock(mu_);
    if (registry_.empty()) throw DataError("store has no radio registry");
    IngestSummary local;
    IngestSummary& s = summary ? *summary : local;
    auto fps = normalize_for_training(fingerprints_, registry_, s);
    if (fps.empty()) throw DataError("store has no usable fingerprints");
    return build_dataset(std::move(fps), registry_,
                         locations_.empty() ? std::nullopt : std::make_optional(locations_));
  }

  std::uint64_t digest() const {
    std::lock_guard lock(mu_);
    return content_digest(fingerprints_);
  }

 private:
  void derive_locations() {
    std::set<std::string> labels;
    for (const auto& fp : fingerprints_)
      if (fp.location) labels.insert(*fp.location);
    locations_ = assign_locations(labels);
  }

  mutable std::mutex mu_;
  std::filesystem::path dir_;
  std::vector<Fingerprint> fingerprints_;
  std::vector<Location> locations_;
  RadioRegistry registry_;
  std::ofstream log_;
};

/// One /track outcome, durably logged for analytics and replay.
struct PredictionRecord {
  std::string device_id;
  std::int64_t ts_ms = 0;
  int location = 0;                  // raw estimate
  std::map<int, double> scores;      // location id -> Q
  std::string band;                  // "dual" or "2.4-only"
  std::optional<int> smoothed_area;  // tracker's current area after update
  bool changed = false;
  bool first_visit = false;
  std::uint64_t model_version = 0;

  friend bool operator==(const PredictionRecord& a, const PredictionRecord& b) {
    return a.device_id == b.device_id && a.ts_ms == b.ts_ms && a.location == b.location &&
           a.scores == b.scores && a.band == b.band && a.smoothed_area == b.smoothed_area &&
           a.changed == b.changed && a.first_visit == b.first_visit &&
           a.model_version == b.model_version;
  }
};

inline nlohmann::json to_json(const PredictionRecord& r) {
  nlohmann::json scores = nlohmann::json::object();
  for (const auto& [id, q] : r.scores) scores[std::to_string(id)] = q;
  nlohmann::json j;
  j["device_id"] = r.device_id;
  j["ts_ms"] = r.ts_ms;
  j["location"] = r.location;
  j["scores"] = std::move(scores);
  j["band"] = r.band;
  if (r.smoothed_area)
    j["smoothed_area"] = *r.smoothed_area;
  else
    j["smoothed_area"] = nullptr;
  j["changed"] = r.changed;
  j["first_visit"] = r.first_visit;
  j["model_version"] = r.model_version;
  return j;
}

inline PredictionRecord prediction_record_from_json(const nlohmann::json& j) {
  PredictionRecord r;
  r.device_id = j.at("device_id").get<std::string>();
  r.ts_ms = j.at("ts_ms").get<std::int64_t>();
  r.location = j.at("location").get<int>();
  for (const auto& [id, q] : j.at("scores").items()) r.scores[std::stoi(id)] = q.get<double>();
  r.band = j.at("band").get<std::string>();
  if (!j.at("smoothed_area").is_null()) r.smoothed_area = j.at("smoothed_area").get<int>();
  r.changed = j.at("changed").get<bool>();
  r.first_visit = j.at("first_visit").get<bool>();
  r.model_version = j.at("model_version").get<std::uint64_t>();
  return r;
}

/// Append-only prediction history with time-filtered, paginated reads.
class PredictionLog {
 public:
  explicit PredictionLog(std::filesystem::path dir) : path_(std::move(dir)) {
    std::filesystem::create_directories(path_);
    path_ /= "predictions.jsonl";
    if (std::filesystem::exists(path_)) {
      std::ifstream in(path_);
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
          records_.push_back(prediction_record_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception&) {
          // A torn tail line (crash mid-write) is skipped, not fatal.
        }
      }
    }
    log_.open(path_, std::ios::app);
    if (!log_) throw IoError("cannot open prediction log for append");
  }

  void append(const PredictionRecord& record) {
    std::lock_guard lock(mu_);
    log_ << to_json(record).dump() << '\n';
    log_.flush();
    records_.push_back(record);
  }

  struct Query {
    std::optional<std::string> device_id;
    std::optional<std::int64_t> from_ms;
    std::optional<std::int64_t> to_ms;
    std::size_t offset = 0;
    std::size_t limit = 1000;
  };

  /// Matching records ascending by timestamp (stable on ties). Also reports
  /// the total number of matches before pagination.
  std::pair<std::vector<PredictionRecord>, std::size_t> query(const Query& q) const {
    std::lock_guard lock(mu_);
    std::vector<const PredictionRecord*> matches;
    for (const auto& r : records_) {
      if (q.device_id && r.device_id != *q.device_id) continue;
      if (q.from_ms && r.ts_ms < *q.from_ms) continue;
      if (q.to_ms && r.ts_ms > *q.to_ms) continue;
      matches.push_back(&r);
    }
    std::stable_sort(matches.begin(), matches.end(),
                     [](const auto* a, const auto* b) { return a->ts_ms < b->ts_ms; });
    std::vector<PredictionRecord> page;
    for (std::size_t i = q.offset; i < matches.size() && page.size() < q.limit; ++i)
      page.push_back(*matches[i]);
    return {std::move(page), matches.size()};
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return records_.size();
  }

 private:
  mutable std::mutex mu_;
  std::filesystem::path path_;
  std::vector<PredictionRecord> records_;
  std::ofstream log_;
};

/// Versioned bundle storage with an atomically swapped "current" snapshot.
/// Install never mutates a published bundle: readers hold shared_ptrs to
/// immutable snapshots and finish on whatever version they started with.
class ModelRegistry {
 public:
  struct Snapshot {
    std::uint64_t version = 0;
    LocalizerBundle bundle;
    nlohmann::json metadata;
  };

  explicit ModelRegistry(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
    const auto index = dir_ / "registry.json";
    if (std::filesystem::exists(index)) {
      auto j = read_json_file(index);
      if (j.value("schema_version", 1) != 1)
        throw IoError("unsupported model registry schema version");
      next_version_ = j.value("next_version", std::uint64_t{1});
      history_ = j.value("versions", nlohmann::json::array());
      const auto current = j.value("current_version", std::uint64_t{0});
      if (current > 0) {
        auto snapshot = std::make_shared<Snapshot>();
        snapshot->version = current;
        snapshot->bundle = bundle_from_json(read_json_file(bundle_path(current)));
        for (const auto& v : history_)
          if (v.value("version", std::uint64_t{0}) == current) snapshot->metadata = v;
        current_ = std::move(snapshot);
      }
    }
  }

  std::shared_ptr<const Snapshot> current() const {
    std::lock_guard lock(mu_);
    return current_;
  }

  /// Writes the bundle file, then publishes the new version: index update
  /// via temp-file rename, pointer swap under the lock. The (possibly
  /// large) bundle write happens before the lock is taken, so concurrent
  /// snapshot readers never wait on it. Previous bundle files stay on disk
  /// as the archive.
  std::uint64_t install(LocalizerBundle bundle, nlohmann::json metadata) {
    std::uint64_t version;
    {
      std::lock_guard lock(mu_);
      version = next_version_++;
    }
    metadata["version"] = version;
    write_json_file(to_json(bundle), bundle_path(version));

    auto snapshot = std::make_shared<Snapshot>();
    snapshot->version = version;
    snapshot->bundle = std::move(bundle);
    snapshot->metadata = metadata;

    std::lock_guard lock(mu_);
    history_.push_back(std::move(metadata));
    // Concurrent installers publish in version order: never roll back.
    const std::uint64_t newest =
        std::max(version, current_ ? current_->version : std::uint64_t{0});
    nlohmann::json index = {{"schema_version", 1},
                            {"current_version", newest},
                            {"next_version", next_version_},
                            {"versions", history_}};
    const auto index_path = dir_ / "registry.json";
    const auto tmp_path = dir_ / "registry.json.tmp";
    write_json_file(index, tmp_path);
    std::filesystem::rename(tmp_path, index_path);
    if (!current_ || version > current_->version) current_ = std::move(snapshot);
    return version;
  }

  nlohmann::json history() const {
    std::lock_guard lock(mu_);
    return history_;
  }

 private:
  std::filesystem::path bundle_path(std::uint64_t version) const {
    return dir_ / ("bundle-v" + std::to_string(version) + ".json");
  }

  mutable std::mutex mu_;
  std::filesystem::path dir_;
  std::shared_ptr<const Snapshot> current_;
  std::uint64_t next_version_ = 1;
  nlohmann::json history_ = nlohmann::json::array();
};

}  // namespace wifiloc
