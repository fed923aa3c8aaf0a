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

#include <csignal>
#include <ctime>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wifiloc/eval/report.hpp"
#include "wifiloc/eval/synthetic.hpp"
#include "wifiloc/service/server.hpp"

namespace {

using namespace wifiloc;

// Exit codes: 0 success, 2 usage, 3 data, 4 training, 5 I/O.
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitTrain = 4;
constexpr int kExitIo = 5;

EngineConfig load_engine_config(const std::string& path) {
  EngineConfig cfg;
  if (!path.empty()) apply_overrides(cfg, read_json_file(path));
  return cfg;
}

BandProfile parse_band(const std::string& band) {
  if (band == "dual") return BandProfile::kDualBand;
  if (band == "2.4") return BandProfile::kBand24Only;
  throw DataError("band must be 'dual' or '2.4'");
}

/// Band-selected view of a store: 2.4 evaluation runs on the band-filtered
/// dataset.
Dataset load_for_band(const std::filesystem::path& store, BandProfile band) {
  Dataset ds = read_store(store);
  if (band == BandProfile::kBand24Only) ds = filter_to_band(ds, Band::kBand24);
  return ds;
}

std::string utc_stamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
  return buf;
}

/// Reports are directories; the timestamp lives only in the directory name
/// so payloads stay byte-identical across reruns with the same seed.
std::filesystem::path make_report_dir(const std::string& out_root, const std::string& subcommand,
                                      const std::string& exact_dir) {
  std::filesystem::path dir =
      exact_dir.empty() ? std::filesystem::path(out_root) / (subcommand + "-" + utc_stamp())
                        : std::filesystem::path(exact_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create report directory " + dir.string());
  return dir;
}

void write_manifest(const std::filesystem::path& dir, const std::string& subcommand,
                    std::uint64_t seed, const nlohmann::json& parameters,
                    const std::vector<std::pair<std::string, std::string>>& files) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [name, kind] : files) entries.push_back({{"name", name}, {"kind", kind}});
  write_json_file({{"subcommand", subcommand},
                   {"seed", seed},
                   {"parameters", parameters},
                   {"files", std::move(entries)}},
                  dir / "manifest.json");
}

void print_summary(const IngestSummary& s) {
  std::cout << "kept " << s.kept << " of " << s.records_read << " records";
  if (s.malformed) std::cout << ", " << s.malformed << " malformed";
  if (s.unlabeled) std::cout << ", " << s.unlabeled << " unlabeled";
  if (s.empty_dropped) std::cout << ", " << s.empty_dropped << " empty";
  if (s.invalid_mac_signals) std::cout << ", " << s.invalid_mac_signals << " bad-mac signals";
  if (s.unknown_radio_signals)
    std::cout << ", " << s.unknown_radio_signals << " unknown-radio signals";
  if (s.clamped_rssi) std::cout << ", " << s.clamped_rssi << " clamped RSSI";
  if (s.ignored_fields) std::cout << ", " << s.ignored_fields << " ignored fields";
  std::cout << '\n';
  for (const auto& [label, count] : s.per_location)
    std::cout << "  location " << label << ": " << count << '\n';
}

int run_ingest(const std::string& in, const std::string& format, const std::string& registry_path,
               const std::string& out) {
  RadioRegistry registry = read_registry_csv(registry_path);
  IngestSummary summary;
  std::vector<Fingerprint> raw;
  if (format == "jsonl")
    raw = read_fingerprints_jsonl(in, summary);
  else if (format == "csv")
    raw = read_fingerprints_csv(in, summary);
  else if (format == "find3")
    raw = read_fingerprints_find3(in, summary);
  else
    throw DataError("format must be jsonl, csv or find3");

  auto fps = normalize_for_training(std::move(raw), registry, summary);
  if (fps.empty()) throw DataError("no valid labeled fingerprints in " + in);
  Dataset ds = build_dataset(std::move(fps), std::move(registry));
  write_store(ds, out);
  print_summary(summary);
  char digest[32];
  std::snprintf(digest, sizeof digest, "%016llx",
                static_cast<unsigned long long>(content_digest(ds.fingerprints)));
  std::cout << "store " << out << ": " << ds.size() << " fingerprints, " << ds.locations.size()
            << " locations, " << ds.radio_registry.size() << " radios, digest " << digest << '\n';
  return 0;
}

int run_train(const std::string& store, const std::string& out, const std::string& config_path,
              std::uint64_t seed) {
  Dataset ds = read_store(store);
  EngineConfig cfg = load_engine_config(config_path);
  const auto started = std::chrono::steady_clock::now();
  LocalizerBundle bundle = train_bundle(ds, cfg, seed);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - started)
                      .count();
  write_json_file(to_json(bundle), out);
  std::cout << "seed: " << seed << '\n';
  std::cout << "trained bundle " << out << " in " << ms << " ms\n";
  std::cout << "dual meta validation accuracy: " << bundle.dual.report.meta_validation_accuracy
            << '\n';
  std::cout << "2.4-only meta validation accuracy: "
            << bundle.only24.report.meta_validation_accuracy << '\n';
  return 0;
}

int run_evaluate(const std::string& store, const std::string& band_name, int repeats,
                 std::uint64_t seed, const std::string& config_path, const std::string& out_root,
                 const std::string& report_dir, int jobs) {
  const BandProfile band = parse_band(band_name);
  Dataset ds = load_for_band(store, band);
  EngineConfig cfg = load_engine_config(config_path);
  auto report = evaluate_repeated(ds, band, cfg, repeats, seed, jobs);

  const auto dir = make_report_dir(out_root, "evaluate", report_dir);
  write_json_file(to_json(report), dir / "report.json");
  export_confusion_csv(report.mean_confusion, dir / "confusion.csv");
  write_manifest(dir, "evaluate", seed,
                 {{"band", band_name}, {"repeats", repeats}, {"engine", to_json(cfg)}},
                 {{"report.json", "evaluation_report"}, {"confusion.csv", "confusion_matrix"}});

  std::cout << "seed: " << seed << '\n';
  std::cout << "evaluate band=" << band_name << " repeats=" << repeats
            << " mean_test_accuracy=" << report.test_accuracy.mean
            << " mean_validation_accuracy=" << report.validation_accuracy.mean << " -> "
            << dir.string() << '\n';
  return 0;
}

int run_ablate(const std::string& store, const std::string& band_name, std::vector<int> ap_counts,
               int repeats, std::uint64_t seed, const std::string& config_path,
               const std::string& out_root, const std::string& report_dir, int jobs) {
  const BandProfile band = parse_band(band_name);
  Dataset ds = load_for_band(store, band);
  EngineConfig cfg = load_engine_config(config_path);
  auto curve = ap_ablation(ds, band, ap_counts, cfg, repeats, seed, jobs);

  const auto dir = make_report_dir(out_root, "ablate", report_dir);
  export_curve_csv(curve, dir / "curve.csv");
  write_json_file(to_json(curve), dir / "curve.json");
  write_manifest(dir, "ablate", seed,
                 {{"band", band_name},
                  {"repeats", repeats},
                  {"ap_counts", ap_counts},
                  {"engine", to_json(cfg)}},
                 {{"curve.csv", "accuracy_curve"}, {"curve.json", "accuracy_curve"}});

  std::cout << "seed: " << seed << '\n';
  std::cout << "ablate points=" << curve.size() << " last_mean_accuracy="
            << (curve.empty() ? 0.0 : curve.back().stats.mean) << " -> " << dir.string() << '\n';
  return 0;
}

int run_subsample(const std::string& store, const std::string& band_name,
                  std::vector<double> fractions, int repeats, std::uint64_t seed,
                  const std::string& config_path, const std::string& out_root,
                  const std::string& report_dir, int jobs) {
  const BandProfile band = parse_band(band_name);
  Dataset ds = load_for_band(store, band);
  EngineConfig cfg = load_engine_config(config_path);
  auto curve = subsample_curve(ds, band, fractions, cfg, repeats, seed, jobs);

  const auto dir = make_report_dir(out_root, "subsample", report_dir);
  export_curve_csv(curve, dir / "curve.csv");
  write_json_file(to_json(curve), dir / "curve.json");
  write_manifest(dir, "subsample", seed,
                 {{"band", band_name},
                  {"repeats", repeats},
                  {"fractions", fractions},
                  {"engine", to_json(cfg)}},
                 {{"curve.csv", "accuracy_curve"}, {"curve.json", "accuracy_curve"}});

  std::cout << "seed: " << seed << '\n';
  std::cout << "subsample points=" << curve.size() << " -> " << dir.string() << '\n';
  return 0;
}

int run_synth(int cells, int aps, double sigma, int samples, std::uint64_t seed,
              const std::string& out) {
  Dataset ds = generate_synthetic(grid_fixture(cells, aps, sigma, samples, seed));
  write_store(ds, out);
  std::cout << "seed: " << seed << '\n';
  std::cout << "synthetic store " << out << ": " << ds.size() << " fingerprints, "
            << ds.locations.size() << " locations, " << ds.radio_registry.size() << " radios\n";
  return 0;
}

int run_predict(const std::string& bundle_path, const std::string& in) {
  LocalizerBundle bundle = bundle_from_json(read_json_file(bundle_path));
  nlohmann::json body;
  if (in.empty()) {
    std::stringstream buffer;
    buffer << std::cin.rdbuf();
    body = nlohmann::json::parse(buffer.str());
  } else {
    body = read_json_file(in);
  }
  Fingerprint fp = fingerprint_from_json(body);
  IngestSummary scratch;
  if (!sanitize_fingerprint(fp, nullptr, scratch))
    throw DataError("fingerprint has no usable signals");
  auto result = localize(bundle, fp);
  nlohmann::json scores = nlohmann::json::object();
  for (const auto& [id, q] : result.scores) scores[std::to_string(id)] = q;
  std::cout << nlohmann::json{{"location", result.location},
                              {"band", band_profile_name(result.band_used)},
                              {"scores", std::move(scores)}}
                   .dump()
            << '\n';
  return 0;
}

volatile std::sig_atomic_t g_stop = 0;

int run_serve(const std::string& config_path, const std::string& listen, int port,
              const std::string& data_dir, const std::string& token) {
  ServiceConfig cfg;
  if (!config_path.empty())
    cfg = load_service_config(config_path);
  else
    apply_env_overrides(cfg);
  if (!listen.empty()) cfg.listen_address = listen;
  if (port >= 0) cfg.port = port;
  if (!data_dir.empty()) cfg.data_dir = data_dir;
  if (!token.empty()) cfg.token = token;

  LocalizationService service(cfg);
  service.start();
  std::cout << "serving on " << cfg.listen_address << ":" << service.port() << ", data dir "
            << cfg.data_dir.string() << std::endl;
  std::signal(SIGINT, [](int) { g_stop = 1; });
  std::signal(SIGTERM, [](int) { g_stop = 1; });
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  std::cout << "shutting down\n";
  service.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wi-Fi fingerprint indoor localization engine"};
  app.require_subcommand(1);
  std::function<int()> action;

  std::uint64_t seed = 42;
  int jobs = 1;
  app.add_option("--seed", seed, "Base random seed (printed with every run)")
      ->capture_default_str();
  app.add_option("-j,--jobs", jobs, "Concurrent evaluation jobs")->capture_default_str();

  // ingest
  {
    auto* cmd = app.add_subcommand("ingest", "Normalize raw fingerprints into a store");
    auto in = std::make_shared<std::string>();
    auto format = std::make_shared<std::string>("jsonl");
    auto registry = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--in", *in, "Input file")->required();
    cmd->add_option("--format", *format, "Input format")
        ->check(CLI::IsMember({"jsonl", "csv", "find3"}))
        ->capture_default_str();
    cmd->add_option("--registry", *registry, "Radio registry CSV (mac,band[,ap])")->required();
    cmd->add_option("--out", *out, "Store directory to write")->required();
    cmd->callback([&action, in, format, registry, out] {
      action = [=] { return run_ingest(*in, *format, *registry, *out); };
    });
  }

  // train
  {
    auto* cmd = app.add_subcommand("train", "Train a localizer bundle from a store");
    auto store = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>("bundle.json");
    auto config = std::make_shared<std::string>();
    cmd->add_option("--store", *store, "Store directory")->required();
    cmd->add_option("--out", *out, "Bundle file to write")->capture_default_str();
    cmd->add_option("--config", *config, "Engine config overrides (JSON file)");
    cmd->callback([&action, &seed, store, out, config] {
      action = [=, &seed] { return run_train(*store, *out, *config, seed); };
    });
  }

  // evaluate
  {
    auto* cmd = app.add_subcommand("evaluate", "Repeated accuracy evaluation");
    auto store = std::make_shared<std::string>();
    auto band = std::make_shared<std::string>("dual");
    auto repeats = std::make_shared<int>(10);
    auto config = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>("reports");
    auto report_dir = std::make_shared<std::string>();
    cmd->add_option("--store", *store, "Store directory")->required();
    cmd->add_option("--band", *band, "dual or 2.4")
        ->check(CLI::IsMember({"dual", "2.4"}))
        ->capture_default_str();
    cmd->add_option("--repeats", *repeats, "Evaluation repeats")->capture_default_str();
    cmd->add_option("--config", *config, "Engine config overrides (JSON file)");
    cmd->add_option("--out", *out, "Root directory for timestamped reports")
        ->capture_default_str();
    cmd->add_option("--report-dir", *report_dir, "Exact report directory (no timestamp)");
    cmd->callback([&action, &seed, &jobs, store, band, repeats, config, out, report_dir] {
      action = [=, &seed, &jobs] {
        return run_evaluate(*store, *band, *repeats, seed, *config, *out, *report_dir, jobs);
      };
    });
  }

  // ablate
  {
    auto* cmd = app.add_subcommand("ablate", "Accuracy as APs are removed, most redundant first");
    auto store = std::make_shared<std::string>();
    auto band = std::make_shared<std::string>("dual");
    auto counts = std::make_shared<std::vector<int>>();
    auto repeats = std::make_shared<int>(10);
    auto config = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>("reports");
    auto report_dir = std::make_shared<std::string>();
    cmd->add_option("--store", *store, "Store directory")->required();
    cmd->add_option("--band", *band, "dual or 2.4")
        ->check(CLI::IsMember({"dual", "2.4"}))
        ->capture_default_str();
    cmd->add_option("--ap-counts", *counts, "AP counts to evaluate, e.g. 15,14,13")
        ->required()
        ->delimiter(',');
    cmd->add_option("--repeats", *repeats, "Evaluation repeats per point")->capture_default_str();
    cmd->add_option("--config", *config, "Engine config overrides (JSON file)");
    cmd->add_option("--out", *out, "Root directory for timestamped reports")
        ->capture_default_str();
    cmd->add_option("--report-dir", *report_dir, "Exact report directory (no timestamp)");
    cmd->callback([&action, &seed, &jobs, store, band, counts, repeats, config, out, report_dir] {
      action = [=, &seed, &jobs] {
        return run_ablate(*store, *band, *counts, *repeats, seed, *config, *out, *report_dir,
                          jobs);
      };
    });
  }

  // subsample
  {
    auto* cmd = app.add_subcommand("subsample", "Accuracy on stratified fingerprint subsamples");
    auto store = std::make_shared<std::string>();
    auto band = std::make_shared<std::string>("dual");
    auto fractions = std::make_shared<std::vector<double>>(
        std::vector<double>{0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0});
    auto repeats = std::make_shared<int>(10);
    auto config = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>("reports");
    auto report_dir = std::make_shared<std::string>();
    cmd->add_option("--store", *store, "Store directory")->required();
    cmd->add_option("--band", *band, "dual or 2.4")
        ->check(CLI::IsMember({"dual", "2.4"}))
        ->capture_default_str();
    cmd->add_option("--fractions", *fractions, "Fractions to evaluate, e.g. 0.3,0.4,1.0")
        ->delimiter(',');
    cmd->add_option("--repeats", *repeats, "Evaluation repeats per point")->capture_default_str();
    cmd->add_option("--config", *config, "Engine config overrides (JSON file)");
    cmd->add_option("--out", *out, "Root directory for timestamped reports")
        ->capture_default_str();
    cmd->add_option("--report-dir", *report_dir, "Exact report directory (no timestamp)");
    cmd->callback(
        [&action, &seed, &jobs, store, band, fractions, repeats, config, out, report_dir] {
          action = [=, &seed, &jobs] {
            return run_subsample(*store, *band, *fractions, *repeats, seed, *config, *out,
                                 *report_dir, jobs);
          };
        });
  }

  // synth
  {
    auto* cmd = app.add_subcommand("synth", "Generate a synthetic path-loss store");
    auto cells = std::make_shared<int>(4);
    auto aps = std::make_shared<int>(3);
    auto sigma = std::make_shared<double>(6.0);
    auto samples = std::make_shared<int>(250);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--cells", *cells, "Number of areas")->capture_default_str();
    cmd->add_option("--aps", *aps, "Number of dual-band APs")->capture_default_str();
    cmd->add_option("--sigma", *sigma, "Shadowing noise (dB)")->capture_default_str();
    cmd->add_option("--samples", *samples, "Fingerprints per area")->capture_default_str();
    cmd->add_option("--out", *out, "Store directory to write")->required();
    cmd->callback([&action, &seed, cells, aps, sigma, samples, out] {
      action = [=, &seed] { return run_synth(*cells, *aps, *sigma, *samples, seed, *out); };
    });
  }

  // predict
  {
    auto* cmd = app.add_subcommand("predict", "Localize one fingerprint JSON (file or stdin)");
    auto bundle = std::make_shared<std::string>();
    auto in = std::make_shared<std::string>();
    cmd->add_option("--bundle", *bundle, "Trained bundle file")->required();
    cmd->add_option("--in", *in, "Fingerprint JSON file (default: stdin)");
    cmd->callback([&action, bundle, in] {
      action = [=] { return run_predict(*bundle, *in); };
    });
  }

  // serve
  {
    auto* cmd = app.add_subcommand("serve", "Run the localization HTTP service");
    auto config = std::make_shared<std::string>();
    auto listen = std::make_shared<std::string>();
    auto port = std::make_shared<int>(-1);
    auto data_dir = std::make_shared<std::string>();
    auto token = std::make_shared<std::string>();
    cmd->add_option("--config", *config, "Service config JSON file");
    cmd->add_option("--listen", *listen, "Listen address override");
    cmd->add_option("--port", *port, "Port override (0 = ephemeral)");
    cmd->add_option("--data-dir", *data_dir, "Data directory override");
    cmd->add_option("--token", *token, "Bearer token override");
    cmd->callback([&action, config, listen, port, data_dir, token] {
      action = [=] { return run_serve(*config, *listen, *port, *data_dir, *token); };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const TrainError& e) {
    std::cerr << "training error: " << e.what() << '\n';
    return kExitTrain;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}
