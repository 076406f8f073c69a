#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wvsim/evolution.hpp"
#include "wvsim/potential.hpp"
#include "wvsim/spin.hpp"
#include "wvsim/tof_inference.hpp"

namespace wvsim {

using Json = nlohmann::json;

inline constexpr const char* kArtifactVersion = "0.1.0";

enum class Scenario { finite_dim, tof, bohmian, spin };

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::finite_dim: return "finite_dim";
    case Scenario::tof: return "tof";
    case Scenario::bohmian: return "bohmian";
    case Scenario::spin: return "spin";
  }
  return "?";
}

namespace detail {

inline const Json& require_field(const Json& j, const std::string& key,
                                 const std::string& context) {
  if (!j.contains(key))
    throw ConfigError("config missing field '" + key + "' in " + context);
  return j.at(key);
}

template <typename T>
T field_or(const Json& j, const std::string& key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace detail

struct GridSpec {
  double x_min, x_max;
  std::size_t n_points;
  Grid1D make() const { return Grid1D(x_min, x_max, n_points); }
};

struct PotentialSpec {
  std::string kind = "free";
  double height = 0.0, width = 1.0, center = 0.0;

  Potential make(const Grid1D& grid) const {
    if (kind == "free") return Potential::free_space(grid);
    if (kind == "gaussian_barrier")
      return Potential::gaussian_barrier(grid, height, width, center);
    if (kind == "eckart") return Potential::eckart(grid, height, width);
    throw ConfigError("unknown potential kind '" + kind + "'");
  }
};

struct ClickSpec {
  std::size_t n_events = 0;
  std::size_t bins = 80;
};

struct TofSpec {
  double source_x = 0.0;
  double shutter_time = 0.0;
  std::vector<double> detectors;
  double fd_step = 0.0;
  ClickSpec clicks;
};

struct BohmianSpec {
  std::vector<double> starts;
  std::size_t ensemble = 0;
};

struct SweepRange {
  double min = 0.0, max = 0.0;
  std::size_t count = 1;

  std::vector<double> values() const {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i)
      v[i] = count > 1
                 ? min + (max - min) * static_cast<double>(i) /
                       static_cast<double>(count - 1)
                 : min;
    return v;
  }
};

struct SpinSpec {
  SweepRange alpha;
  SweepRange post_angle;
  Eigen::Vector2cd path_pre;
  std::size_t shots = 0;
};

struct FiniteDimSpec {
  std::size_t instances = 1000;
  int dim_min = 2, dim_max = 8;
  double min_overlap = 1e-3;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::finite_dim;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  PhysicalParams physical;
  std::optional<GridSpec> grid;
  PotentialSpec potential;
  std::optional<CoherentStateSpec> state;
  std::optional<PropagatorConfig> propagation;
  std::optional<TofSpec> tof;
  std::optional<BohmianSpec> bohmian;
  std::optional<SpinSpec> spin;
  FiniteDimSpec finite_dim;
  Json raw;

  static ExperimentConfig from_json(const Json& j);
  static ExperimentConfig from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    Json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw ConfigError("config parse failure in " + path + ": " + e.what());
    }
    return from_json(j);
  }

  std::string hash() const;
};

inline ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  ExperimentConfig cfg;
  cfg.raw = j;

  const std::string scenario =
      detail::require_field(j, "scenario", "top level").get<std::string>();
  if (scenario == "finite_dim") cfg.scenario = Scenario::finite_dim;
  else if (scenario == "tof") cfg.scenario = Scenario::tof;
  else if (scenario == "bohmian") cfg.scenario = Scenario::bohmian;
  else if (scenario == "spin") cfg.scenario = Scenario::spin;
  else throw ConfigError("unknown scenario '" + scenario + "'");

  cfg.seed = detail::field_or<std::uint64_t>(j, "seed", 0);
  cfg.output_dir = detail::field_or<std::string>(j, "output_dir", "out");

  if (j.contains("physical")) {
    const auto& p = j.at("physical");
    cfg.physical.hbar = detail::field_or(p, "hbar", 1.0);
    cfg.physical.mass = detail::field_or(p, "mass", 1.0);
  }
  cfg.physical.validate();

  const bool needs_grid =
      cfg.scenario == Scenario::tof || cfg.scenario == Scenario::bohmian;
  if (needs_grid) {
    const auto& g = detail::require_field(j, "grid", "scenario " + scenario);
    GridSpec gs{};
    gs.x_min = detail::require_field(g, "x_min", "grid").get<double>();
    gs.x_max = detail::require_field(g, "x_max", "grid").get<double>();
    gs.n_points =
        detail::require_field(g, "n_points", "grid").get<std::size_t>();
    cfg.grid = gs;

    const auto& s = detail::require_field(j, "state", "scenario " + scenario);
    CoherentStateSpec state{};
    state.gamma = detail::require_field(s, "gamma", "state").get<double>();
    state.center = detail::require_field(s, "center", "state").get<double>();
    state.momentum = detail::require_field(s, "momentum", "state").get<double>();
    cfg.state = state;

    const auto& pr =
        detail::require_field(j, "propagation", "scenario " + scenario);
    PropagatorConfig prop{};
    prop.dt = detail::require_field(pr, "dt", "propagation").get<double>();
    prop.t_max = detail::require_field(pr, "t_max", "propagation").get<double>();
    prop.record_stride =
        detail::field_or<std::size_t>(pr, "record_stride", 1);
    prop.boundary_density_threshold =
        detail::field_or(pr, "boundary_density_threshold", 1e-8);
    prop.validate();
    cfg.propagation = prop;

    if (j.contains("potential")) {
      const auto& v = j.at("potential");
      cfg.potential.kind = detail::field_or<std::string>(v, "kind", "free");
      cfg.potential.height = detail::field_or(v, "height", 0.0);
      cfg.potential.width = detail::field_or(v, "width", 1.0);
      cfg.potential.center = detail::field_or(v, "center", 0.0);
    }
  }

  if (cfg.scenario == Scenario::tof) {
    const auto& t = detail::require_field(j, "protocol", "scenario tof");
    TofSpec spec{};
    spec.source_x =
        detail::require_field(t, "source_x", "protocol").get<double>();
    spec.shutter_time = detail::field_or(t, "shutter_time", 0.0);
    spec.detectors = detail::require_field(t, "detectors", "protocol")
                         .get<std::vector<double>>();
    if (spec.detectors.empty())
      throw ConfigError("protocol.detectors must not be empty");
    spec.fd_step = detail::field_or(t, "fd_step", 0.0);
    if (t.contains("clicks")) {
      const auto& c = t.at("clicks");
      spec.clicks.n_events = detail::field_or<std::size_t>(c, "n_events", 0);
      spec.clicks.bins = detail::field_or<std::size_t>(c, "bins", 80);
      if (spec.clicks.n_events > 0 && !j.contains("seed"))
        throw ConfigError("config missing field 'seed' (required when click "
                          "sampling is requested)");
    }
    cfg.tof = spec;
  }

  if (cfg.scenario == Scenario::bohmian) {
    const auto& b = detail::require_field(j, "trajectories", "scenario bohmian");
    BohmianSpec spec{};
    spec.starts = detail::require_field(b, "starts", "trajectories")
                      .get<std::vector<double>>();
    spec.ensemble = detail::field_or<std::size_t>(b, "ensemble", 0);
    if (spec.ensemble > 0 && !j.contains("seed"))
      throw ConfigError("config missing field 'seed' (required when ensemble "
                        "sampling is requested)");
    cfg.bohmian = spec;
  }

  if (cfg.scenario == Scenario::spin) {
    const auto& s = detail::require_field(j, "spin", "scenario spin");
    SpinSpec spec{};
    auto range = [&](const char* key) {
      const auto& r = detail::require_field(s, key, "spin");
      SweepRange sr{};
      sr.min = detail::require_field(r, "min", key).get<double>();
      sr.max = detail::require_field(r, "max", key).get<double>();
      sr.count = detail::field_or<std::size_t>(r, "count", 1);
      if (sr.count == 0) throw ConfigError(std::string(key) + ".count is zero");
      return sr;
    };
    spec.alpha = range("alpha");
    spec.post_angle = range("post_angle");
    const auto pre = detail::require_field(s, "path_pre", "spin");
    if (!pre.is_array() || pre.size() != 2)
      throw ConfigError("spin.path_pre must be [[re,im],[re,im]]");
    for (int i = 0; i < 2; ++i) {
      const auto& c = pre.at(i);
      spec.path_pre(i) = std::complex<double>(c.at(0).get<double>(),
                                              c.at(1).get<double>());
    }
    if (std::abs(spec.path_pre.norm() - 1.0) > 1e-12)
      throw ConfigError("spin.path_pre must be normalized");
    spec.shots = detail::field_or<std::size_t>(s, "shots", 0);
    if (spec.shots > 0 && !j.contains("seed"))
      throw ConfigError("config missing field 'seed' (required when shot "
                        "sampling is requested)");
    cfg.spin = spec;
  }

  if (cfg.scenario == Scenario::finite_dim && j.contains("finite_dim")) {
    const auto& f = j.at("finite_dim");
    cfg.finite_dim.instances =
        detail::field_or<std::size_t>(f, "instances", 1000);
    cfg.finite_dim.dim_min = detail::field_or(f, "dim_min", 2);
    cfg.finite_dim.dim_max = detail::field_or(f, "dim_max", 8);
    cfg.finite_dim.min_overlap = detail::field_or(f, "min_overlap", 1e-3);
    if (cfg.finite_dim.dim_min < 2 ||
        cfg.finite_dim.dim_max < cfg.finite_dim.dim_min)
      throw ConfigError("finite_dim dims must satisfy 2 <= dim_min <= dim_max");
  }

  return cfg;
}

// FNV-1a over the canonical (key-sorted) JSON dump.
inline std::string ExperimentConfig::hash() const {
  const std::string dump = raw.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

}  // namespace wvsim
