#pragma once

#include "wvsim/errors.hpp"

namespace wvsim {

// Simulation units. Defaults hbar = M = 1; every formula keeps the symbols so
// SI-like runs work unchanged.
struct PhysicalParams {
  double hbar = 1.0;
  double mass = 1.0;

  void validate() const {
    if (!(hbar > 0.0)) throw ConfigError("PhysicalParams: hbar must be > 0");
    if (!(mass > 0.0)) throw ConfigError("PhysicalParams: mass must be > 0");
  }
};

}  // namespace wvsim
