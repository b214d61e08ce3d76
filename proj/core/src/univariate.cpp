#include "wcons/univariate.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "wcons/error.hpp"
#include "wcons/weights.hpp"

namespace wcons {

QuantileGrid::QuantileGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw Error(ErrorCode::InvalidInput, "quantile grid needs N >= 2");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw Error(ErrorCode::InvalidInput, "non-finite quantile");
    if (i > 0 && values_[i] < values_[i - 1])
      throw Error(ErrorCode::InvalidInput, "quantile values must be nondecreasing");
  }
}

double QuantileGrid::mean() const noexcept {
  double s = 0.0;
  for (double v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

double w2_distance_1d(const QuantileGrid& f, const QuantileGrid& g) {
  if (f.size() != g.size()) throw Error(ErrorCode::GridMismatch, "quantile grids differ in size");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = f[i] - g[i];
    s += d * d;
  }
  return s / static_cast<double>(f.size());
}

QuantileGrid quantile_barycenter(std::span<const double> weights,
                                 std::span<const QuantileGrid> grids) {
  if (grids.empty() || weights.size() != grids.size())
    throw Error(ErrorCode::BadWeights, "need one weight per grid");
  validate_weights(weights);
  const std::size_t n = grids.front().size();
  for (const auto& g : grids)
    if (g.size() != n) throw Error(ErrorCode::GridMismatch, "quantile grids differ in size");

  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < grids.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) out[i] += weights[j] * grids[j][i];
  // rounding can break monotonicity by an ulp for (near-)constant stretches
  for (std::size_t i = 1; i < n; ++i) out[i] = std::max(out[i], out[i - 1]);
  return QuantileGrid(std::move(out));
}

double variance_1d(std::span<const double> weights, std::span<const QuantileGrid> grids) {
  const QuantileGrid bary = quantile_barycenter(weights, grids);
  double v = 0.0;
  for (std::size_t j = 0; j < grids.size(); ++j) v += weights[j] * w2_distance_1d(grids[j], bary);
  return v;
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

// Acklam's rational approximation (relative error ~1.15e-9).
double acklam(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log1p(-p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidInput, "quantile level outside (0,1)");
  if (p == 0.5) return 0.0;
  double x = acklam(p);
  constexpr double inv_sqrt_2pi = 0.3989422804014327;
  const double pdf = inv_sqrt_2pi * std::exp(-0.5 * x * x);
  // evaluate the tail that keeps relative precision
  const double f = p < 0.5 ? normal_cdf(x) - p
                           : (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2);
  if (pdf > 0.0) x -= f / pdf;
  return x;
}

QuantileGrid gaussian_quantiles(double mean, double sigma, std::size_t n) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidInput, "sigma must be positive");
  if (n < 2) throw Error(ErrorCode::InvalidInput, "quantile grid needs N >= 2");
  std::vector<double> z(n, 0.0);
  for (std::size_t i = 0; i < n / 2; ++i) {
    z[i] = normal_quantile(QuantileGrid::grid_point(i, n));
    z[n - 1 - i] = -z[i];
  }
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = mean + sigma * z[i];
  return QuantileGrid(std::move(values));
}

QuantileGrid read_quantile_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "empty quantile CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "quantile_value")
    throw Error(ErrorCode::ParseError, "quantile CSV header must be 'quantile_value'");
  std::vector<double> values;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(line, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != line.size())
      throw Error(ErrorCode::ParseError, "bad quantile value at line " + std::to_string(lineno));
    values.push_back(v);
  }
  return QuantileGrid(std::move(values));
}

void write_quantile_csv(std::ostream& out, const QuantileGrid& grid) {
  out << "quantile_value\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (double v : grid.values()) out << v << '\n';
}

}  // namespace wcons
