// wvsim: batch front-end for the weak-value strong-measurement suite.
//
//   wvsim run <config.json>     execute a scenario, emit CSVs + manifest
//   wvsim verify <config.json>  dry-run the module property suites
//   wvsim scan <config.json> --param path=lo:hi:count [...]
//                               Cartesian parameter sweep, one subdir per point
//
// Exit codes: 0 success, 1 invariant/scenario failure, 2 config error.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "wvsim/scenarios.hpp"
#include "wvsim/verify.hpp"

namespace {

namespace fs = std::filesystem;

std::string resolve_output_dir(const std::string& config_dir,
                               const std::string& cli_root) {
  std::string root = cli_root;
  if (root.empty())
    if (const char* env = std::getenv("WVSIM_OUTPUT_ROOT")) root = env;
  if (root.empty()) return config_dir;
  return (fs::path(root) / config_dir).string();
}

struct SweepAxis {
  std::string pointer;  // JSON pointer, e.g. /state/momentum
  std::vector<double> values;
};

SweepAxis parse_axis(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos)
    throw wvsim::ConfigError("--param expects path=lo:hi:count, got " + arg);
  SweepAxis axis;
  axis.pointer = "/" + arg.substr(0, eq);
  for (auto& c : axis.pointer)
    if (c == '.') c = '/';
  const std::string range = arg.substr(eq + 1);
  const auto c1 = range.find(':');
  const auto c2 = range.rfind(':');
  if (c1 == std::string::npos || c2 == c1)
    throw wvsim::ConfigError("--param range must be lo:hi:count, got " + range);
  const double lo = std::stod(range.substr(0, c1));
  const double hi = std::stod(range.substr(c1 + 1, c2 - c1 - 1));
  const auto count = static_cast<std::size_t>(std::stoul(range.substr(c2 + 1)));
  if (count == 0) throw wvsim::ConfigError("--param count must be positive");
  for (std::size_t i = 0; i < count; ++i)
    axis.values.push_back(count > 1 ? lo + (hi - lo) * static_cast<double>(i) /
                                               static_cast<double>(count - 1)
                                    : lo);
  return axis;
}

int cmd_run(const std::string& config_path, const std::string& output_root) {
  const auto cfg = wvsim::ExperimentConfig::from_file(config_path);
  const auto dir = resolve_output_dir(cfg.output_dir, output_root);
  const auto manifest = wvsim::run_scenario(cfg, dir);
  for (const auto& check : manifest.checks)
    std::cout << (check.pass ? "[PASS] " : "[FAIL] ") << check.name << ": "
              << check.detail << "\n";
  std::cout << "wrote " << manifest.files.size() << " files to " << dir
            << " (config " << manifest.config_hash << ")\n";
  return manifest.all_pass() ? 0 : 1;
}

int cmd_verify(const std::string& config_path) {
  const auto cfg = wvsim::ExperimentConfig::from_file(config_path);
  const auto results = wvsim::verify_scenario(cfg);
  bool all_pass = true;
  for (const auto& check : results) {
    std::cout << (check.pass ? "[PASS] " : "[FAIL] ") << check.name << ": "
              << check.detail << "\n";
    all_pass = all_pass && check.pass;
  }
  std::cout << (all_pass ? "verification passed" : "verification FAILED")
            << " (" << results.size() << " checks)\n";
  return all_pass ? 0 : 1;
}

int cmd_scan(const std::string& config_path, const std::string& output_root,
             const std::vector<std::string>& param_args, std::size_t jobs) {
  const auto base_cfg = wvsim::ExperimentConfig::from_file(config_path);
  std::vector<SweepAxis> axes;
  for (const auto& arg : param_args) axes.push_back(parse_axis(arg));
  if (axes.empty()) throw wvsim::ConfigError("scan needs at least one --param");

  // Cartesian expansion.
  std::vector<std::vector<double>> points{{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<double>> next;
    for (const auto& partial : points)
      for (double v : axis.values) {
        auto p = partial;
        p.push_back(v);
        next.push_back(std::move(p));
      }
    points = std::move(next);
  }

  const auto root = resolve_output_dir(base_cfg.output_dir, output_root);
  fs::create_directories(root);

  std::atomic<std::size_t> cursor{0};
  std::atomic<bool> all_pass{true};
  std::mutex io_mutex;
  wvsim::Json scan_summary = wvsim::Json::array();

  auto worker = [&] {
    for (;;) {
      const std::size_t idx = cursor.fetch_add(1);
      if (idx >= points.size()) return;
      wvsim::Json doc = base_cfg.raw;
      for (std::size_t a = 0; a < axes.size(); ++a)
        doc[wvsim::Json::json_pointer(axes[a].pointer)] = points[idx][a];
      char label[32];
      std::snprintf(label, sizeof(label), "point_%04zu", idx);
      try {
        const auto cfg = wvsim::ExperimentConfig::from_json(doc);
        const auto manifest =
            wvsim::run_scenario(cfg, (fs::path(root) / label).string());
        std::lock_guard<std::mutex> lock(io_mutex);
        scan_summary.push_back({{"point", label},
                                {"values", points[idx]},
                                {"pass", manifest.all_pass()}});
        if (!manifest.all_pass()) all_pass = false;
      } catch (const wvsim::Error& e) {
        std::lock_guard<std::mutex> lock(io_mutex);
        scan_summary.push_back({{"point", label},
                                {"values", points[idx]},
                                {"pass", false},
                                {"error", e.what()}});
        all_pass = false;
      }
    }
  };

  const std::size_t n_workers =
      std::max<std::size_t>(1, std::min(jobs, points.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // Deterministic summary order regardless of worker interleaving.
  std::sort(scan_summary.begin(), scan_summary.end(),
            [](const wvsim::Json& a, const wvsim::Json& b) {
              return a.at("point").get<std::string>() <
                     b.at("point").get<std::string>();
            });
  std::ofstream out(fs::path(root) / "scan_manifest.json");
  out << wvsim::Json{{"config_hash", base_cfg.hash()}, {"points", scan_summary}}
             .dump(2)
      << "\n";
  std::cout << "scan: " << points.size() << " points -> " << root << "\n";
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weak values from strong measurement statistics"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_root;
  std::vector<std::string> params;
  std::size_t jobs = std::thread::hardware_concurrency();

  auto* run = app.add_subcommand("run", "execute a scenario config");
  run->add_option("config", config_path, "JSON experiment config")->required();
  run->add_option("--output-root", output_root, "prefix for output_dir");

  auto* verify = app.add_subcommand("verify", "dry-run module property suites");
  verify->add_option("config", config_path, "JSON experiment config")->required();

  auto* scan = app.add_subcommand("scan", "Cartesian parameter sweep");
  scan->add_option("config", config_path, "JSON experiment config")->required();
  scan->add_option("--param", params, "sweep axis: path=lo:hi:count")
      ->required();
  scan->add_option("--output-root", output_root, "prefix for output_dir");
  scan->add_option("--jobs", jobs, "worker pool size");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, output_root);
    if (verify->parsed()) return cmd_verify(config_path);
    if (scan->parsed()) return cmd_scan(config_path, output_root, params, jobs);
  } catch (const wvsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const wvsim::Error& e) {
    std::cerr << wvsim::error_kind(e) << ": " << e.what() << "\n";
    return 1;
  }
  return 2;
}
