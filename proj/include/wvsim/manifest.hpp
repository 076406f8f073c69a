#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wvsim/config.hpp"

namespace wvsim {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Run provenance: config hash, emitted files, and the invariant-check summary.
// Wall time is informational and excluded from determinism comparisons.
struct RunManifest {
  std::string config_hash;
  std::string artifact_version = kArtifactVersion;
  std::string scenario;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
  std::vector<std::string> files;
  std::vector<CheckResult> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  Json to_json() const {
    Json j;
    j["config_hash"] = config_hash;
    j["artifact_version"] = artifact_version;
    j["scenario"] = scenario;
    j["seed"] = seed;
    j["wall_time_s"] = wall_time_s;
    j["files"] = files;
    Json checks_json = Json::array();
    for (const auto& c : checks)
      checks_json.push_back({{"name", c.name}, {"pass", c.pass},
                             {"detail", c.detail}});
    j["checks"] = checks_json;
    return j;
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open manifest path " + path);
    out << to_json().dump(2) << "\n";
  }
};

}  // namespace wvsim
