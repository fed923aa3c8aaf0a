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

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

// Each keep-alive connection pins a worker, so the pool must exceed the
// expected device count; the backlog likewise covers a burst of devices
// connecting at once.
#ifndef CPPHTTPLIB_THREAD_POOL_COUNT
#define CPPHTTPLIB_THREAD_POOL_COUNT 64
#endif
#ifndef CPPHTTPLIB_LISTEN_BACKLOG
#define CPPHTTPLIB_LISTEN_BACKLOG 128
#endif
#include <httplib.h>

#include "wifiloc/config.hpp"
#include "wifiloc/service/store.hpp"
#include "wifiloc/tracker.hpp"

namespace wifiloc {

struct ServiceConfig {
  std::string listen_address = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "./wifiloc-data";
  std::string token;  // empty disables authentication
  int session_expiry_minutes = 30;
  EngineConfig engine;
};

inline nlohmann::json to_json(const ServiceConfig& c) {
  return {{"listen_address", c.listen_address},
          {"port", c.port},
          {"data_dir", c.data_dir.string()},
          {"token", c.token},
          {"session_expiry_minutes", c.session_expiry_minutes},
          {"engine", to_json(c.engine)}};
}

inline void apply_overrides(ServiceConfig& c, const nlohmann::json& j) {
  for (const auto& [key, value] : j.items()) {
    if (key == "listen_address")
      c.listen_address = value.get<std::string>();
    else if (key == "port")
      c.port = value.get<int>();
    else if (key == "data_dir")
      c.data_dir = value.get<std::string>();
    else if (key == "token")
      c.token = value.get<std::string>();
    else if (key == "session_expiry_minutes")
      c.session_expiry_minutes = value.get<int>();
    else if (key == "engine")
      apply_overrides(c.engine, value);
    else
      throw DataError("unknown service config key '" + key + "'");
  }
}

/// Environment overrides, prefix WIFILOC_: LISTEN_ADDRESS, PORT, DATA_DIR,
/// TOKEN, SESSION_EXPIRY_MINUTES, SMOOTHING_STREAK, SENTINEL_DBM.
inline void apply_env_overrides(ServiceConfig& c) {
  auto env = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
  };
  if (auto v = env("WIFILOC_LISTEN_ADDRESS")) c.listen_address = *v;
  if (auto v = env("WIFILOC_PORT")) c.port = std::stoi(*v);
  if (auto v = env("WIFILOC_DATA_DIR")) c.data_dir = *v;
  if (auto v = env("WIFILOC_TOKEN")) c.token = *v;
  if (auto v = env("WIFILOC_SESSION_EXPIRY_MINUTES")) c.session_expiry_minutes = std::stoi(*v);
  if (auto v = env("WIFILOC_SMOOTHING_STREAK")) c.engine.smoothing_streak = std::stoi(*v);
  if (auto v = env("WIFILOC_SENTINEL_DBM")) c.engine.sentinel_dbm = std::stod(*v);
}

inline ServiceConfig load_service_config(const std::filesystem::path& path) {
  ServiceConfig cfg;
  apply_overrides(cfg, read_json_file(path));
  apply_env_overrides(cfg);
  return cfg;
}

/// Per-device tracker sessions. Transitions for one device are serialized
/// by the session mutex; distinct devices are independent.
class TrackerSessions {
 public:
  struct Session {
    std::mutex mu;
    TrackerState state;
    std::int64_t last_seen_ms = -1;
  };

  std::shared_ptr<Session> session(const std::string& device_id) {
    std::lock_guard lock(mu_);
    auto& slot = sessions_[device_id];
    if (!slot) slot = std::make_shared<Session>();
    return slot;
  }

 private:
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

/// Thrown when a training request collides with an active run.
class TrainingActive : public TrainError {
 public:
  TrainingActive() : TrainError("a training run is already active") {}
};

/// The online-phase HTTP service: localization with smoothing, fingerprint
/// collection, atomic retraining and prediction history.
class LocalizationService {
 public:
  explicit LocalizationService(ServiceConfig config)
      : config_(std::move(config)),
        store_(config_.data_dir),
        predictions_(config_.data_dir),
        models_(config_.data_dir / "models") {
    install_routes();
  }

  ~LocalizationService() { stop(); }

  /// Binds and serves on a background thread. With port 0 an ephemeral
  /// port is chosen; port() reports the bound one.
  void start() {
    if (config_.port == 0) {
      port_ = http_.bind_to_any_port(config_.listen_address);
      if (port_ < 0) throw IoError("cannot bind " + config_.listen_address);
    } else {
      if (!http_.bind_to_port(config_.listen_address, config_.port))
        throw IoError("cannot bind " + config_.listen_address + ":" +
                      std::to_string(config_.port));
      port_ = config_.port;
    }
    serving_ = std::thread([this] { http_.listen_after_bind(); });
    http_.wait_until_ready();
  }

  void stop() {
    if (serving_.joinable()) {
      http_.stop();
      serving_.join();
    }
  }

  int port() const { return port_; }
  const FingerprintStore& store() const { return store_; }
  const PredictionLog& predictions() const { return predictions_; }
  const ModelRegistry& models() const { return models_; }

  /// Trains from the store and installs the new bundle; used by /train and
  /// by operators seeding a model before first start.
  nlohmann::json train_and_install(std::uint64_t seed, const nlohmann::json& overrides) {
    if (training_.exchange(true)) throw TrainingActive();
    struct Release {
      std::atomic<bool>& flag;
      ~Release() { flag = false; }
    } release{training_};

    EngineConfig engine = config_.engine;
    if (!overrides.is_null() && !overrides.empty()) apply_overrides(engine, overrides);

    const auto started = std::chrono::steady_clock::now();
    IngestSummary summary;
    Dataset ds = store_.dataset(&summary);
    LocalizerBundle bundle = train_bundle(ds, engine, seed);

    nlohmann::json accuracies = {
        {"dual",
         {{"meta_validation_accuracy", bundle.dual.report.meta_validation_accuracy},
          {"validation_accuracy", bundle.dual.report.validation_accuracy}}},
        {"2.4-only",
         {{"meta_validation_accuracy", bundle.only24.report.meta_validation_accuracy},
          {"validation_accuracy", bundle.only24.report.validation_accuracy}}}};

    nlohmann::json metadata = {{"seed", seed},
                               {"fingerprints", ds.size()},
                               {"dataset_digest", store_.digest()},
                               {"created_ms", now_ms()}};
    const std::uint64_t version = models_.install(std::move(bundle), metadata);
    const auto duration =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                              started);
    return {{"version", version},
            {"accuracies", std::move(accuracies)},
            {"duration_ms", duration.count()},
            {"fingerprints", ds.size()}};
  }

 private:
  static std::int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  }

  static void reply(httplib::Response& res, int status, nlohmann::json body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  bool authorized(const httplib::Request& req, httplib::Response& res) const {
    if (config_.token.empty()) return true;
    if (req.get_header_value("Authorization") == "Bearer " + config_.token) return true;
    reply(res, 401, {{"error", "missing or invalid bearer token"}});
    return false;
  }

  void install_routes() {
    http_.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("ok", "text/plain");
    });

    http_.Post("/api/v1/track", [this](const httplib::Request& req, httplib::Response& res) {
      if (!authorized(req, res)) return;
      Fingerprint fp;
      try {
        fp = fingerprint_from_json(nlohmann::json::parse(req.body));
      } catch (const std::exception& e) {
        return reply(res, 400, {{"error", std::string("malformed fingerprint: ") + e.what()}});
      }
      IngestSummary scratch;
      if (!sanitize_fingerprint(fp, nullptr, scratch))
        return reply(res, 400, {{"error", "fingerprint has no usable signals"}});

      const auto snapshot = models_.current();
      if (!snapshot) return reply(res, 503, {{"error", "no model installed"}});

      LocalizeResult result;
      try {
        result = localize(snapshot->bundle, fp);
      } catch (const DataError& e) {
        return reply(res, 422, {{"error", e.what()}});
      }

      PredictionRecord record;
      record.device_id = fp.device_id;
      record.ts_ms = now_ms();
      record.location = result.location;
      for (const auto& [id, q] : result.scores) record.scores[id] = q;
      record.band = band_profile_name(result.band_used);
      record.model_version = snapshot->version;

      {
        auto session = sessions_.session(fp.device_id);
        std::lock_guard lock(session->mu);
        const std::int64_t expiry_ms =
            static_cast<std::int64_t>(config_.session_expiry_minutes) * 60'000;
        if (session->last_seen_ms >= 0 && record.ts_ms - session->last_seen_ms > expiry_ms)
          session->state = reset_session(session->state);
        auto update = tracker_update(session->state, result.location,
                                     TrackerConfig{config_.engine.smoothing_streak});
        session->state = update.state;
        session->last_seen_ms = record.ts_ms;
        record.smoothed_area = update.state.current;
        record.changed = update.changed;
        record.first_visit = update.first_visit;
        predictions_.append(record);
      }

      nlohmann::json scores = nlohmann::json::object();
      for (const auto& [id, q] : record.scores) scores[std::to_string(id)] = q;
      reply(res, 200,
            {{"location", record.location},
             {"scores", std::move(scores)},
             {"band", record.band},
             {"smoothed_area",
              record.smoothed_area ? nlohmann::json(*record.smoothed_area) : nlohmann::json()},
             {"changed", record.changed},
             {"first_visit", record.first_visit},
             {"model_version", record.model_version}});
    });

    http_.Post("/api/v1/learn", [this](const httplib::Request& req, httplib::Response& res) {
      if (!authorized(req, res)) return;
      Fingerprint fp;
      try {
        fp = fingerprint_from_json(nlohmann::json::parse(req.body));
      } catch (const std::exception& e) {
        return reply(res, 400, {{"error", std::string("malformed fingerprint: ") + e.what()}});
      }
      if (!fp.location || fp.location->empty())
        return reply(res, 400, {{"error", "missing location label"}});
      if (!store_.knows_location(*fp.location))
        return reply(res, 404, {{"error", "unknown location '" + *fp.location + "'"}});
      IngestSummary scratch;
      if (!sanitize_fingerprint(fp, nullptr, scratch))
        return reply(res, 400, {{"error", "fingerprint has no usable signals"}});
      const std::size_t total = store_.append(fp);
      reply(res, 200, {{"accepted", true}, {"total_for_location", total}});
    });

    http_.Post("/api/v1/train", [this](const httplib::Request& req, httplib::Response& res) {
      if (!authorized(req, res)) return;
      std::uint64_t seed = 42;
      nlohmann::json overrides;
      if (!req.body.empty()) {
        try {
          auto body = nlohmann::json::parse(req.body);
          seed = body.value("seed", seed);
          if (body.contains("config")) overrides = body["config"];
        } catch (const std::exception& e) {
          return reply(res, 400, {{"error", std::string("malformed request: ") + e.what()}});
        }
      }
      try {
        reply(res, 200, train_and_install(seed, overrides));
      } catch (const TrainingActive& e) {
        reply(res, 409, {{"error", e.what()}});
      } catch (const TrainError& e) {
        reply(res, 422, {{"error", e.what()}});
      } catch (const DataError& e) {
        reply(res, 422, {{"error", e.what()}});
      }
    });

    http_.Get("/api/v1/history", [this](const httplib::Request& req, httplib::Response& res) {
      if (!authorized(req, res)) return;
      PredictionLog::Query q;
      try {
        if (req.has_param("device_id")) q.device_id = req.get_param_value("device_id");
        if (req.has_param("from")) q.from_ms = std::stoll(req.get_param_value("from"));
        if (req.has_param("to")) q.to_ms = std::stoll(req.get_param_value("to"));
        if (req.has_param("offset")) q.offset = std::stoull(req.get_param_value("offset"));
        if (req.has_param("limit")) q.limit = std::stoull(req.get_param_value("limit"));
      } catch (const std::exception&) {
        return reply(res, 400, {{"error", "invalid query parameter"}});
      }
      if (q.from_ms && q.to_ms && *q.from_ms > *q.to_ms)
        return reply(res, 400, {{"error", "invalid time range: from > to"}});
      if (q.limit > 10000) q.limit = 10000;
      auto [records, total] = predictions_.query(q);
      nlohmann::json items = nlohmann::json::array();
      for (const auto& r : records) items.push_back(to_json(r));
      reply(res, 200, {{"records", std::move(items)}, {"total", total}});
    });

    http_.Get("/api/v1/model", [this](const httplib::Request& req, httplib::Response& res) {
      if (!authorized(req, res)) return;
      const auto snapshot = models_.current();
      if (!snapshot) return reply(res, 503, {{"error", "no model installed"}});
      nlohmann::json locations = nlohmann::json::array();
      for (const auto& l : store_.locations())
        locations.push_back({{"id", l.id}, {"name", l.name}});
      reply(res, 200,
            {{"version", snapshot->version},
             {"feature_space_sizes",
              {{"dual", snapshot->bundle.dual.space.size()},
               {"2.4-only", snapshot->bundle.only24.space.size()}}},
             {"locations", std::move(locations)},
             {"training_report",
              {{"dual", to_json(snapshot->bundle.dual.report)},
               {"2.4-only", to_json(snapshot->bundle.only24.report)}}},
             {"metadata", snapshot->metadata}});
    });
  }

  ServiceConfig config_;
  FingerprintStore store_;
  PredictionLog predictions_;
  ModelRegistry models_;
  TrackerSessions sessions_;
  std::atomic<bool> training_{false};
  httplib::Server http_;
  std::thread serving_;
  int port_ = -1;
};

}  // namespace wifiloc
