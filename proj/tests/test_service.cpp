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

#include <gtest/gtest.h>

#include <chrono>
#include <thread>

#include "wifiloc/eval/synthetic.hpp"
#include "wifiloc/service/server.hpp"
#include "test_util.hpp"

using namespace wifiloc;

namespace {

ServiceConfig test_config(const std::filesystem::path& data_dir) {
  ServiceConfig cfg;
  cfg.listen_address = "127.0.0.1";
  cfg.port = 0;  // ephemeral
  cfg.data_dir = data_dir;
  cfg.engine.classifiers.forest.trees = 10;
  cfg.engine.classifiers.adaboost.rounds = 5;
  cfg.engine.classifiers.mlp.epochs = 30;
  cfg.engine.classifiers.mlp.learning_rate = 0.01;
  cfg.engine.classifiers.svm.epochs = 20;
  return cfg;
}

void seed_store(const std::filesystem::path& data_dir, int cells = 3, int aps = 2,
                int samples = 30) {
  write_store(generate_synthetic(grid_fixture(cells, aps, 3.0, samples, 5)), data_dir);
}

nlohmann::json scan_body(int cell, bool with_5ghz, const std::string& device = "phone-1") {
  // Strong reading from the AP nearest to the cell; cells sit 20 m apart.
  Fingerprint fp;
  fp.device_id = device;
  fp.ts_ms = 0;
  char mac24[32], mac5[32];
  const int ap = cell <= 2 ? 1 : 2;
  std::snprintf(mac24, sizeof mac24, "02:00:00:00:%02x:24", ap);
  std::snprintf(mac5, sizeof mac5, "02:00:00:00:%02x:05", ap);
  const double strength = -38.0 - 2.0 * std::abs(cell - (2 * ap - 1));
  fp.signals[mac24] = strength;
  if (with_5ghz) fp.signals[mac5] = strength - 1.0;
  return fingerprint_to_json(fp);
}

nlohmann::json post_json(httplib::Client& cli, const std::string& path,
                         const nlohmann::json& body, int expect_status) {
  auto res = cli.Post(path, body.dump(), "application/json");
  EXPECT_TRUE(res) << "no response from " << path;
  if (!res) return {};
  EXPECT_EQ(res->status, expect_status) << path << " -> " << res->body;
  if (res->body.empty()) return {};
  return nlohmann::json::parse(res->body);
}

}  // namespace

TEST(Service, HealthzAndNoModelStates) {
  testutil::TempDir tmp("svc-nomodel");
  seed_store(tmp.path());
  LocalizationService svc(test_config(tmp.path()));
  svc.start();
  httplib::Client cli("127.0.0.1", svc.port());

  auto health = cli.Get("/healthz");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);

  auto model = cli.Get("/api/v1/model");
  ASSERT_TRUE(model);
  EXPECT_EQ(model->status, 503);

  post_json(cli, "/api/v1/track", scan_body(1, true), 503);
}

TEST(Service, TrainTrackLearnFlow) {
  testutil::TempDir tmp("svc-flow");
  seed_store(tmp.path());
  LocalizationService svc(test_config(tmp.path()));
  svc.start();
  httplib::Client cli("127.0.0.1", svc.port());
  cli.set_read_timeout(300, 0);

  auto trained = post_json(cli, "/api/v1/train", {{"seed", 7}}, 200);
  EXPECT_EQ(trained["version"], 1);
  EXPECT_TRUE(trained.contains("accuracies"));
  EXPECT_TRUE(trained["accuracies"].contains("dual"));
  EXPECT_TRUE(trained["accuracies"].contains("2.4-only"));

  // Dual-band scan routes to the dual model.
  auto dual = post_json(cli, "/api/v1/track", scan_body(1, true), 200);
  EXPECT_EQ(dual["band"], "dual");
  EXPECT_EQ(dual["model_version"], 1);
  EXPECT_TRUE(dual.contains("scores"));

  // A 2.4 GHz-only scan routes to the band-filtered model.
  auto only24 = post_json(cli, "/api/v1/track", scan_body(1, false), 200);
  EXPECT_EQ(only24["band"], "2.4-only");

  // Malformed and degenerate inputs.
  auto empty_signals = nlohmann::json{{"device_id", "x"},
                                      {"ts_ms", 1},
                                      {"location", nullptr},
                                      {"signals", nlohmann::json::object()}};
  post_json(cli, "/api/v1/track", empty_signals, 400);
  auto res = cli.Post("/api/v1/track", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  nlohmann::json unknown_macs = {{"device_id", "x"},
                                 {"ts_ms", 1},
                                 {"location", nullptr},
                                 {"signals", {{"ff:ff:ff:ff:ff:01", -40}}}};
  post_json(cli, "/api/v1/track", unknown_macs, 422);

  // /learn accepts known labels, rejects missing and unknown ones.
  auto learn_body = scan_body(2, true);
  learn_body["location"] = "2";
  auto learned = post_json(cli, "/api/v1/learn", learn_body, 200);
  EXPECT_EQ(learned["accepted"], true);
  const auto total = learned["total_for_location"].get<std::size_t>();
  EXPECT_GE(total, 31u);  // 30 seeded + 1

  auto dup = post_json(cli, "/api/v1/learn", learn_body, 200);  // append-only, dedup out of scope
  EXPECT_EQ(dup["total_for_location"].get<std::size_t>(), total + 1);

  learn_body["location"] = "99";
  post_json(cli, "/api/v1/learn", learn_body, 404);
  learn_body["location"] = nullptr;
  post_json(cli, "/api/v1/learn", learn_body, 400);

  // /model reflects the install.
  auto model = cli.Get("/api/v1/model");
  ASSERT_TRUE(model);
  auto mj = nlohmann::json::parse(model->body);
  EXPECT_EQ(mj["version"], 1);
  EXPECT_EQ(mj["feature_space_sizes"]["dual"], 4);      // 2 APs x 2 radios
  EXPECT_EQ(mj["feature_space_sizes"]["2.4-only"], 2);  // 2.4 GHz radios only
  EXPECT_EQ(mj["locations"].size(), 3u);
}

TEST(Service, SmoothingFollowsTrackerRule) {
  testutil::TempDir tmp("svc-smooth");
  seed_store(tmp.path());
  LocalizationService svc(test_config(tmp.path()));
  svc.start();
  httplib::Client cli("127.0.0.1", svc.port());
  cli.set_read_timeout(300, 0);
  post_json(cli, "/api/v1/train", {{"seed", 3}}, 200);

  // Replay the responses against the pure tracker and compare.
  TrackerState replay;
  for (int i = 0; i < 7; ++i) {
    const int cell = i < 4 ? 1 : 3;
    auto out = post_json(cli, "/api/v1/track", scan_body(cell, true, "walker"), 200);
    auto update = tracker_update(replay, out["location"].get<int>());
    replay = update.state;
    EXPECT_EQ(out["changed"].get<bool>(), update.changed) << "step " << i;
    EXPECT_EQ(out["first_visit"].get<bool>(), update.first_visit) << "step " << i;
    if (replay.current)
      EXPECT_EQ(out["smoothed_area"].get<int>(), *replay.current) << "step " << i;
    else
      EXPECT_TRUE(out["smoothed_area"].is_null()) << "step " << i;
  }
}

TEST(Service, HistoryFiltersAndOrdering) {
  testutil::TempDir tmp("svc-history");
  seed_store(tmp.path());
  LocalizationService svc(test_config(tmp.path()));
  svc.start();
  httplib::Client cli("127.0.0.1", svc.port());
  cli.set_read_timeout(300, 0);
  post_json(cli, "/api/v1/train", {{"seed", 3}}, 200);

  for (int i = 0; i < 3; ++i) post_json(cli, "/api/v1/track", scan_body(1, true, "dev-a"), 200);
  post_json(cli, "/api/v1/track", scan_body(2, true, "dev-b"), 200);

  auto res = cli.Get("/api/v1/history?device_id=dev-a");
  ASSERT_TRUE(res);
  auto j = nlohmann::json::parse(res->body);
  EXPECT_EQ(j["total"], 3);
  ASSERT_EQ(j["records"].size(), 3u);
  std::int64_t prev = 0;
  for (const auto& r : j["records"]) {
    EXPECT_EQ(r["device_id"], "dev-a");
    EXPECT_GE(r["ts_ms"].get<std::int64_t>(), prev);
    prev = r["ts_ms"].get<std::int64_t>();
  }

  res = cli.Get("/api/v1/history?device_id=ghost");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(nlohmann::json::parse(res->body)["total"], 0);

  res = cli.Get("/api/v1/history?device_id=dev-a&from=1&to=0");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);

  res = cli.Get("/api/v1/history?from=0&to=1");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);  // empty range is fine, just empty
  EXPECT_EQ(nlohmann::json::parse(res->body)["total"], 0);
}

TEST(Service, ConcurrentTrainConflictsAndTrackStaysOnOldVersion) {
  testutil::TempDir tmp("svc-409");
  seed_store(tmp.path(), 4, 2, 400);
  LocalizationService svc(test_config(tmp.path()));
  svc.start();
  httplib::Client cli("127.0.0.1", svc.port());
  cli.set_read_timeout(600, 0);
  post_json(cli, "/api/v1/train", {{"seed", 1}}, 200);  // version 1

  // Kick off a deliberately slow run (seconds of work), then collide with it.
  std::thread slow([&] {
    httplib::Client slow_cli("127.0.0.1", svc.port());
    slow_cli.set_read_timeout(600, 0);
    auto res = slow_cli.Post("/api/v1/train",
                             nlohmann::json{{"seed", 2},
                                            {"config",
                                             {{"classifiers",
                                               {{"random_forest", {{"trees", 1200}}},
                                                {"mlp", {{"epochs", 1500}}}}}}}}
                                 .dump(),
                             "application/json");
    EXPECT_TRUE(res);
    if (res) EXPECT_EQ(res->status, 200);
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(500));

  auto conflict =
      cli.Post("/api/v1/train", nlohmann::json{{"seed", 3}}.dump(), "application/json");
  ASSERT_TRUE(conflict);
  EXPECT_EQ(conflict->status, 409);

  // Requests issued mid-training are served by the previous version.
  auto tracked = post_json(cli, "/api/v1/track", scan_body(1, true), 200);
  EXPECT_EQ(tracked["model_version"], 1);

  slow.join();
  auto model = cli.Get("/api/v1/model");
  ASSERT_TRUE(model);
  EXPECT_EQ(nlohmann::json::parse(model->body)["version"], 2);
}

TEST(Service, RestartPreservesEverything) {
  testutil::TempDir tmp("svc-restart");
  seed_store(tmp.path());
  nlohmann::json model_before, history_before;
  std::size_t store_before = 0;
  {
    LocalizationService svc(test_config(tmp.path()));
    svc.start();
    httplib::Client cli("127.0.0.1", svc.port());
    cli.set_read_timeout(300, 0);
    post_json(cli, "/api/v1/train", {{"seed", 11}}, 200);
    for (int i = 0; i < 5; ++i)
      post_json(cli, "/api/v1/track", scan_body(1 + i % 3, i % 2 == 0, "dev-r"), 200);
    auto learn_body = scan_body(1, true);
    learn_body["location"] = "1";
    post_json(cli, "/api/v1/learn", learn_body, 200);

    model_before = nlohmann::json::parse(cli.Get("/api/v1/model")->body);
    history_before = nlohmann::json::parse(cli.Get("/api/v1/history?device_id=dev-r")->body);
    store_before = svc.store().size();
    svc.stop();
  }

  LocalizationService again(test_config(tmp.path()));
  again.start();
  httplib::Client cli("127.0.0.1", again.port());
  auto model_after = nlohmann::json::parse(cli.Get("/api/v1/model")->body);
  auto history_after = nlohmann::json::parse(cli.Get("/api/v1/history?device_id=dev-r")->body);
  EXPECT_EQ(model_after["version"], model_before["version"]);
  EXPECT_EQ(model_after["feature_space_sizes"], model_before["feature_space_sizes"]);
  EXPECT_EQ(history_after, history_before);
  EXPECT_EQ(again.store().size(), store_before);

  // The reloaded model still serves.
  post_json(cli, "/api/v1/track", scan_body(2, true), 200);
}

TEST(Service, IdleSessionsExpire) {
  testutil::TempDir tmp("svc-expiry");
  seed_store(tmp.path());
  auto cfg = test_config(tmp.path());
  cfg.session_expiry_minutes = 0;  // any measurable gap expires the session
  LocalizationService svc(cfg);
  svc.start();
  httplib::Client cli("127.0.0.1", svc.port());
  cli.set_read_timeout(300, 0);
  post_json(cli, "/api/v1/train", {{"seed", 3}}, 200);

  // With the session wiped before every update, the streak never reaches 3.
  for (int i = 0; i < 5; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(3));
    auto out = post_json(cli, "/api/v1/track", scan_body(1, true, "sleepy"), 200);
    EXPECT_TRUE(out["smoothed_area"].is_null()) << "step " << i;
    EXPECT_FALSE(out["changed"].get<bool>());
  }
}

TEST(Service, BearerTokenIsEnforced) {
  testutil::TempDir tmp("svc-auth");
  seed_store(tmp.path());
  auto cfg = test_config(tmp.path());
  cfg.token = "secret-token";
  LocalizationService svc(cfg);
  svc.start();

  httplib::Client anonymous("127.0.0.1", svc.port());
  auto denied = anonymous.Post("/api/v1/track", scan_body(1, true).dump(), "application/json");
  ASSERT_TRUE(denied);
  EXPECT_EQ(denied->status, 401);
  auto health = anonymous.Get("/healthz");  // health stays open
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);

  httplib::Client authed("127.0.0.1", svc.port());
  authed.set_default_headers({{"Authorization", "Bearer secret-token"}});
  auto allowed = authed.Get("/api/v1/model");
  ASSERT_TRUE(allowed);
  EXPECT_EQ(allowed->status, 503);  // authorized, just no model yet
}

TEST(ServiceConfigJson, OverridesAndEnvPrefix) {
  ServiceConfig cfg;
  apply_overrides(cfg, nlohmann::json::parse(R"({
    "listen_address": "0.0.0.0",
    "port": 9000,
    "data_dir": "/tmp/x",
    "token": "t",
    "session_expiry_minutes": 5,
    "engine": {"smoothing_streak": 4, "clamp_negative_youden": false}
  })"));
  EXPECT_EQ(cfg.listen_address, "0.0.0.0");
  EXPECT_EQ(cfg.port, 9000);
  EXPECT_EQ(cfg.engine.smoothing_streak, 4);
  EXPECT_FALSE(cfg.engine.clamp_negative_youden);
  EXPECT_THROW(apply_overrides(cfg, nlohmann::json::parse(R"({"prot":1})")), DataError);

  setenv("WIFILOC_PORT", "1234", 1);
  setenv("WIFILOC_SMOOTHING_STREAK", "7", 1);
  apply_env_overrides(cfg);
  EXPECT_EQ(cfg.port, 1234);
  EXPECT_EQ(cfg.engine.smoothing_streak, 7);
  unsetenv("WIFILOC_PORT");
  unsetenv("WIFILOC_SMOOTHING_STREAK");
}
