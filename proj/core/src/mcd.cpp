#include "wcons/mcd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include <boost/math/distributions/chi_squared.hpp>

#include "wcons/error.hpp"

namespace wcons {

namespace {

std::vector<double> mahalanobis_sq(const Matrix& points, const LocScatter& est) {
  const SpdMatrix inv = spd_power(est.cov(), -1.0);
  const std::size_t d = points.cols();
  std::vector<double> out(points.rows());
  Vector diff(d);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    for (std::size_t c = 0; c < d; ++c) diff[c] = points(i, c) - est.mean()[c];
    out[i] = dot(diff, inv.matrix() * diff);
  }
  return out;
}

std::vector<std::size_t> closest(std::span<const double> dist, std::size_t h) {
  std::vector<std::size_t> order(dist.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
  order.resize(h);
  std::sort(order.begin(), order.end());
  return order;
}

struct Concentrated {
  LocScatter estimate;
  std::vector<std::size_t> subset;
  std::vector<double> log_dets;
};

Concentrated concentrate(const Matrix& points, std::size_t h, LocScatter est, int max_steps) {
  std::vector<std::size_t> subset;
  std::vector<double> log_dets;
  for (int step = 0; step < max_steps; ++step) {
    std::vector<std::size_t> next = closest(mahalanobis_sq(points, est), h);
    if (next == subset) break;
    subset = std::move(next);
    est = subset_moments(points, subset);
    log_dets.push_back(log_determinant(est.cov()));
  }
  return {std::move(est), std::move(subset), std::move(log_dets)};
}

}  // namespace

LocScatter subset_moments(const Matrix& points, std::span<const std::size_t> rows) {
  const std::size_t d = points.cols();
  const auto count = static_cast<double>(rows.size());
  Vector mean(d, 0.0);
  for (std::size_t r : rows)
    for (std::size_t c = 0; c < d; ++c) mean[c] += points(r, c);
  for (double& m : mean) m /= count;
  Matrix cov(d, d);
  for (std::size_t r : rows)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        cov(a, b) += (points(r, a) - mean[a]) * (points(r, b) - mean[b]);
  cov *= 1.0 / count;
  return LocScatter(std::move(mean), certify_spd(cov));
}

std::vector<double> c_step_path(const Matrix& points, std::size_t h, const LocScatter& start,
                                int max_steps) {
  return concentrate(points, h, start, max_steps).log_dets;
}

double mcd_consistency_factor(std::size_t dim, double fraction) {
  if (fraction >= 1.0) return 1.0;
  const auto d = static_cast<double>(dim);
  const double q = boost::math::quantile(boost::math::chi_squared(d), fraction);
  return fraction / boost::math::cdf(boost::math::chi_squared(d + 2.0), q);
}

McdResult estimate_mcd(const Matrix& points, const McdOptions& opts, Rng& rng) {
  const std::size_t n = points.rows();
  const std::size_t d = points.cols();
  if (opts.h <= d || opts.h > n)
    throw Error(ErrorCode::InvalidInput, "MCD subset size must satisfy d < h <= n");
  if (opts.restarts < 1) throw Error(ErrorCode::InvalidInput, "MCD needs at least one restart");

  std::optional<Concentrated> best;
  int attempts = 0;
  int singular = 0;
  if (opts.h == n) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    LocScatter est = subset_moments(points, all);
    const double ld = log_determinant(est.cov());
    best = Concentrated{std::move(est), std::move(all), {ld}};
  } else {
    int accepted = 0;
    while (accepted < opts.restarts) {
      ++attempts;
      std::vector<std::size_t> start = rng.sample_without_replacement(n, d + 1);
      std::sort(start.begin(), start.end());
      std::optional<LocScatter> init;
      try {
        init = subset_moments(points, start);
      } catch (const NotPositiveDefiniteError&) {
        if (++singular >= 10 * opts.restarts)
          throw Error(ErrorCode::SingularSubset, "too many singular elemental subsets");
        continue;
      }
      std::optional<Concentrated> c;
      try {
        c = concentrate(points, opts.h, std::move(*init), opts.max_csteps);
      } catch (const NotPositiveDefiniteError&) {
        if (++singular >= 10 * opts.restarts)
          throw Error(ErrorCode::SingularSubset, "too many singular concentration subsets");
        continue;
      }
      ++accepted;
      if (!best || c->log_dets.back() < best->log_dets.back()) best = std::move(c);
    }
  }

  const double log_det = best->log_dets.back();
  LocScatter estimate = best->estimate;
  if (opts.consistency_correction) {
    const double factor =
        mcd_consistency_factor(d, static_cast<double>(opts.h) / static_cast<double>(n));
    estimate = LocScatter(estimate.mean(), certify_spd(estimate.cov().sym() * factor));
  }
  return {std::move(estimate), std::move(best->subset), log_det, attempts};
}

}  // namespace wcons
