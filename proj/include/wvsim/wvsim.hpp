#pragma once

// Weak values of quantum operators from strong (projective) measurement
// statistics: operator triples and ratio identities, split-operator
// propagation, time-of-flight arrival distributions and estimators, Bohmian
// fields and trajectories, and the path/spin interferometer model.

#include "wvsim/bohmian.hpp"
#include "wvsim/bohmian_dynamics.hpp"
#include "wvsim/checks.hpp"
#include "wvsim/config.hpp"
#include "wvsim/csv.hpp"
#include "wvsim/errors.hpp"
#include "wvsim/evolution.hpp"
#include "wvsim/grid.hpp"
#include "wvsim/manifest.hpp"
#include "wvsim/momentum_weak.hpp"
#include "wvsim/operator_matrix.hpp"
#include "wvsim/params.hpp"
#include "wvsim/potential.hpp"
#include "wvsim/sampling.hpp"
#include "wvsim/scenarios.hpp"
#include "wvsim/spectral.hpp"
#include "wvsim/spin.hpp"
#include "wvsim/time_distribution.hpp"
#include "wvsim/tof_inference.hpp"
#include "wvsim/trajectory.hpp"
#include "wvsim/verify.hpp"
#include "wvsim/wavefunction.hpp"
#include "wvsim/weak_value.hpp"
