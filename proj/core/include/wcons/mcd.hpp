#pragma once

// Small Minimum Covariance Determinant estimator: random elemental starts
// refined by concentration steps. No partitioning or nesting, intended for
// per-unit samples of a few hundred points.

#include <cstddef>
#include <vector>

#include "wcons/gaussian_metric.hpp"
#include "wcons/rng.hpp"

namespace wcons {

struct McdOptions {
  std::size_t h = 0;  // subset size, d < h <= n
  int restarts = 20;
  int max_csteps = 100;
  /// Multiply the raw h-subset covariance by the chi-square consistency
  /// factor (h/n) / F_{d+2}(q_{d,h/n}) so that it targets the covariance
  /// of a Gaussian bulk. Off gives the raw subset covariance.
  bool consistency_correction = false;
};

struct McdResult {
  LocScatter estimate;
  std::vector<std::size_t> subset;  // sorted indices of the winning h-subset
  double log_det = 0.0;             // raw h-subset covariance
  int attempts = 0;                 // elemental starts drawn, including singular ones
};

/// Mean and covariance (divisor = subset size) of the selected rows.
LocScatter subset_moments(const Matrix& points, std::span<const std::size_t> rows);

/// Concentration path from an initial estimate: log-determinants of the
/// h-subset covariance after every C-step, ending when the subset repeats.
std::vector<double> c_step_path(const Matrix& points, std::size_t h, const LocScatter& start,
                                int max_steps = 100);

/// Throws SingularSubset after 10 * restarts singular elemental starts.
McdResult estimate_mcd(const Matrix& points, const McdOptions& opts, Rng& rng);

double mcd_consistency_factor(std::size_t dim, double fraction);

}  // namespace wcons
