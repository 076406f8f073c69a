#pragma once

#include <stdexcept>
#include <string>

namespace wvsim {

// Base type for everything this library throws.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Two wavefunctions on different grids were combined.
struct GridMismatch : Error {
  using Error::Error;
};

// A prepared state's tails touch the grid edge (position or momentum space).
struct ContainmentError : Error {
  using Error::Error;
};

// Probability near the grid edge crossed the configured threshold during
// propagation; time-of-flight statistics past `time` would be contaminated.
struct BoundaryLeak : Error {
  BoundaryLeak(const std::string& msg, double t, double prob)
      : Error(msg), time(t), edge_probability(prob) {}
  double time;
  double edge_probability;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// Post-selected state is (numerically) orthogonal to the pre-selected one;
// the weak value is undefined.
struct OrthogonalSelection : Error {
  using Error::Error;
};

// Density at the requested point is below the node threshold.
struct NodeError : Error {
  using Error::Error;
};

// A time distribution was requested whose tail has not closed by t_max.
struct OpenTail : Error {
  using Error::Error;
};

struct NodeInInterval : Error {
  using Error::Error;
};

// A Bohmian trajectory entered a node-masked region.
struct NodeApproach : Error {
  using Error::Error;
};

// alpha at 0 or pi: cot(alpha/2) / sin(alpha) degenerate.
struct DegenerateAngle : Error {
  using Error::Error;
};

struct PotentialShapeError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// A module operation failed inside a scenario run; carries module/op context.
struct ScenarioError : Error {
  ScenarioError(const std::string& module, const std::string& op,
                const std::string& msg)
      : Error("[" + module + "/" + op + "] " + msg), module_name(module), op_name(op) {}
  std::string module_name;
  std::string op_name;
};

inline const char* error_kind(const Error& e) {
  if (dynamic_cast<const GridMismatch*>(&e)) return "GridMismatch";
  if (dynamic_cast<const ContainmentError*>(&e)) return "ContainmentError";
  if (dynamic_cast<const BoundaryLeak*>(&e)) return "BoundaryLeak";
  if (dynamic_cast<const DimensionMismatch*>(&e)) return "DimensionMismatch";
  if (dynamic_cast<const OrthogonalSelection*>(&e)) return "OrthogonalSelection";
  if (dynamic_cast<const NodeError*>(&e)) return "NodeError";
  if (dynamic_cast<const OpenTail*>(&e)) return "OpenTail";
  if (dynamic_cast<const NodeInInterval*>(&e)) return "NodeInInterval";
  if (dynamic_cast<const NodeApproach*>(&e)) return "NodeApproach";
  if (dynamic_cast<const DegenerateAngle*>(&e)) return "DegenerateAngle";
  if (dynamic_cast<const PotentialShapeError*>(&e)) return "PotentialShapeError";
  if (dynamic_cast<const ScenarioError*>(&e)) return "ScenarioError";
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  return "Error";
}

}  // namespace wvsim
