#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "wvsim/time_distribution.hpp"

namespace wvsim {

namespace detail {

// Uniform doubles in [0,1) straight from the engine bits, so the stream is
// bit-identical for a given seed on any conforming implementation.
class UniformBits {
 public:
  explicit UniformBits(std::uint64_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace detail

// Simulated strong-measurement record: i.i.d. arrival times drawn from a
// discretized rho(t|x). source_normalization carries N(x) of the generating
// distribution (operationally, the detector's absolute rate), which the
// histogram estimator needs for its baseline.
struct ClickSample {
  double detector_x = 0.0;
  std::uint64_t seed = 0;
  double source_normalization = 0.0;
  std::vector<double> event_times;
};

// Inverse-CDF sampling on the time mesh with uniform jitter within each cell.
inline ClickSample sample_clicks(const TimeDistribution& dist,
                                 std::size_t n_events, std::uint64_t seed) {
  if (dist.kind != DistributionKind::density)
    throw ConfigError("sample_clicks expects a density-kind distribution");
  const double dt = dist.dt();
  if (dt <= 0.0) throw ConfigError("sample_clicks: degenerate time mesh");

  std::vector<double> cum(dist.values.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < dist.values.size(); ++k) {
    acc += std::max(0.0, dist.values[k]) * dt;
    cum[k] = acc;
  }
  const double total = cum.back();
  if (total <= 0.0) throw ConfigError("sample_clicks: empty distribution");
  for (double& c : cum) c /= total;

  ClickSample sample;
  sample.detector_x = dist.detector_x;
  sample.seed = seed;
  sample.source_normalization = dist.normalization;
  sample.event_times.resize(n_events);
  detail::UniformBits rng(seed);
  for (std::size_t e = 0; e < n_events; ++e) {
    const double u = rng.next();
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    const auto k = static_cast<std::size_t>(it - cum.begin());
    const double lo = (k == 0) ? 0.0 : cum[k - 1];
    const double frac = (u - lo) / std::max(cum[k] - lo, 1e-300);
    sample.event_times[e] = dist.times[k] + frac * dt;
  }
  return sample;
}

// Histogram estimate of the Im weak-momentum field from two click records at
// x -/+ fd_step/2. Bins where either histogram is empty are dropped. The
// time-independent baseline (hbar/2) ln(N_+/N_-) / fd_step from the relative
// detection rates is subtracted, so the estimate converges to the Im field
// itself rather than Im minus its time average.
struct ImClickEstimate {
  double x = 0.0;
  double fd_step = 0.0;
  double baseline = 0.0;
  std::vector<double> bin_centers;
  std::vector<double> estimate;
  std::vector<double> std_error;
  std::vector<std::size_t> counts_left;
  std::vector<std::size_t> counts_right;
};

inline ImClickEstimate estimate_im_from_clicks(const ClickSample& left,
                                               const ClickSample& right,
                                               double fd_step, std::size_t bins,
                                               const PhysicalParams& params) {
  if (bins < 2) throw ConfigError("estimate_im_from_clicks: need >= 2 bins");
  if (left.event_times.empty() || right.event_times.empty())
    throw ConfigError("estimate_im_from_clicks: empty click sample");
  if (fd_step <= 0.0) fd_step = right.detector_x - left.detector_x;
  if (fd_step <= 0.0)
    throw ConfigError("estimate_im_from_clicks: detectors must be ordered");

  double lo = std::min(*std::min_element(left.event_times.begin(),
                                         left.event_times.end()),
                       *std::min_element(right.event_times.begin(),
                                         right.event_times.end()));
  double hi = std::max(*std::max_element(left.event_times.begin(),
                                         left.event_times.end()),
                       *std::max_element(right.event_times.begin(),
                                         right.event_times.end()));
  hi += (hi - lo) * 1e-9 + 1e-12;
  const double width = (hi - lo) / static_cast<double>(bins);

  std::vector<std::size_t> c_left(bins, 0), c_right(bins, 0);
  auto fill = [&](const std::vector<double>& events,
                  std::vector<std::size_t>& counts) {
    for (double t : events) {
      auto b = static_cast<std::size_t>((t - lo) / width);
      if (b >= bins) b = bins - 1;
      ++counts[b];
    }
  };
  fill(left.event_times, c_left);
  fill(right.event_times, c_right);

  const double n_left = static_cast<double>(left.event_times.size());
  const double n_right = static_cast<double>(right.event_times.size());

  ImClickEstimate est;
  est.x = 0.5 * (left.detector_x + right.detector_x);
  est.fd_step = fd_step;
  est.baseline = 0.0;
  if (left.source_normalization > 0.0 && right.source_normalization > 0.0)
    est.baseline = 0.5 * params.hbar *
                   std::log(right.source_normalization /
                            left.source_normalization) /
                   fd_step;
  for (std::size_t b = 0; b < bins; ++b) {
    if (c_left[b] == 0 || c_right[b] == 0) continue;  // empty bin: excluded
    const double rl = static_cast<double>(c_left[b]) / n_left;
    const double rr = static_cast<double>(c_right[b]) / n_right;
    const double value =
        -0.5 * params.hbar * std::log(rr / rl) / fd_step - est.baseline;
    const double sigma =
        0.5 * params.hbar / fd_step *
        std::sqrt(1.0 / static_cast<double>(c_left[b]) +
                  1.0 / static_cast<double>(c_right[b]));
    est.bin_centers.push_back(lo + (static_cast<double>(b) + 0.5) * width);
    est.estimate.push_back(value);
    est.std_error.push_back(sigma);
    est.counts_left.push_back(c_left[b]);
    est.counts_right.push_back(c_right[b]);
  }
  return est;
}

}  // namespace wvsim
