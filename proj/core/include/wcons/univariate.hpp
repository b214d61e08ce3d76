#pragma once

// One-dimensional distributions represented by their quantile functions on
// the midpoint grid t_i = (i - 1/2) / N.

#include <iosfwd>
#include <span>
#include <vector>

namespace wcons {

class QuantileGrid {
 public:
  /// values must be nondecreasing and hold at least two entries.
  explicit QuantileGrid(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  /// Grid point t_i (0-based i).
  static double grid_point(std::size_t i, std::size_t n) noexcept {
    return (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  }

  double mean() const noexcept;

 private:
  std::vector<double> values_;
};

/// Squared 1D distance, midpoint rule for the integral of (F^-1 - G^-1)^2.
double w2_distance_1d(const QuantileGrid& f, const QuantileGrid& g);

/// Weighted average of quantile functions.
QuantileGrid quantile_barycenter(std::span<const double> weights,
                                 std::span<const QuantileGrid> grids);

/// Sum_j w_j * w2_distance_1d(grid_j, barycenter).
double variance_1d(std::span<const double> weights, std::span<const QuantileGrid> grids);

double normal_cdf(double x) noexcept;

/// Standard normal quantile, 0 < p < 1: rational approximation plus one
/// Newton step on the CDF.
double normal_quantile(double p);

QuantileGrid gaussian_quantiles(double mean, double sigma, std::size_t n);

inline constexpr std::size_t kDefaultGridSize = 4096;

/// CSV with header `quantile_value` and one value per line.
QuantileGrid read_quantile_csv(std::istream& in);
void write_quantile_csv(std::ostream& out, const QuantileGrid& grid);

}  // namespace wcons
