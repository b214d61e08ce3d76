#include "wcons/trimming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include "wcons/parallel.hpp"
#include "wcons/rng.hpp"
#include "wcons/weights.hpp"

namespace wcons {

namespace {

constexpr double kMassTolerance = 1e-12;

std::vector<double> distances_to(const LocScatter& center, const WeightedEnsemble& ens) {
  const SpdMatrix root = spd_sqrt(center.cov());
  const double tc = center.cov().trace();
  std::vector<double> out;
  out.reserve(ens.size());
  for (const auto& item : ens.items()) {
    const double mean_term = squared_distance(center.mean(), item.dist.mean());
    const double tp = item.dist.cov().trace();
    const double v = mean_term + tc + tp - 2.0 * trace_sqrt_product(root, item.dist.cov());
    out.push_back(std::max(v, 0.0));
  }
  return out;
}

double weighted_sum(std::span<const double> w, std::span<const double> d) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] > 0.0) s += w[i] * d[i];
  return s;
}

double radius_of(std::span<const double> weights, std::span<const double> dist) {
  double r2 = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] > 0.0) r2 = std::max(r2, dist[i]);
  return std::sqrt(r2);
}

struct RestartOutcome {
  std::optional<LocScatter> bary;
  std::vector<double> weights;
  double variance = std::numeric_limits<double>::infinity();
  int outer_iterations = 0;
};

RestartOutcome concentrate(const WeightedEnsemble& ens, std::span<const double> base_weights,
                           const TrimConfig& cfg, LocScatter center) {
  BarycenterOptions inner;
  inner.tol = cfg.inner_tol;
  inner.max_iter = cfg.inner_max_iter;

  RestartOutcome out;
  for (int it = 0; it < cfg.outer_max_iter; ++it) {
    const std::vector<double> dist = distances_to(center, ens);
    std::vector<double> w = trim_weights(dist, base_weights, cfg.alpha);
    if (it > 0 && w == out.weights) break;

    inner.init = center.cov();
    BarycenterResult solved = fixed_point_barycenter(ens.restricted(w), inner);
    const bool stagnated =
        it > 0 && out.variance - solved.variance < 1e-12 * (1.0 + solved.variance);
    center = std::move(solved.bary);
    out.weights = std::move(w);
    out.variance = solved.variance;
    out.outer_iterations = it + 1;
    if (stagnated) break;
  }
  out.bary = std::move(center);
  return out;
}

// The first k restarts visit every member once, in a seeded random order.
// Later restarts start from the equal-weight barycenter of a random subset
// holding about 1 - alpha of the members.
LocScatter starting_point(const WeightedEnsemble& ens, const TrimConfig& cfg, std::size_t r) {
  const std::size_t k = ens.size();
  if (r < k) {
    Rng rng(derive_seed(cfg.seed, 0));
    return ens[rng.sample_without_replacement(k, k)[r]].dist;
  }
  Rng rng(derive_seed(cfg.seed, r));
  const double kept = std::ceil((1.0 - cfg.alpha) * static_cast<double>(k) - 1e-9);
  const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(kept));
  std::vector<LocScatter> members;
  for (std::size_t i : rng.sample_without_replacement(k, m)) members.push_back(ens[i].dist);
  return fixed_point_barycenter(WeightedEnsemble::uniform(std::move(members))).bary;
}

TrimmedResult finish(LocScatter bary, std::vector<double> weights, const WeightedEnsemble& ens,
                     int outer_iterations, int restart_index) {
  const std::vector<double> dist = distances_to(bary, ens);
  TrimmedResult res{std::move(bary), std::move(weights), 0.0, outer_iterations, restart_index,
                    0.0, {}};
  res.trimmed_variance = weighted_sum(res.active_weights, dist);
  res.radius = radius_of(res.active_weights, dist);
  return res;
}

}  // namespace

void TrimConfig::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw Error(ErrorCode::InvalidInput, "alpha must lie in [0, 1)");
  if (restarts < 1) throw Error(ErrorCode::InvalidInput, "restarts must be at least 1");
  if (!(inner_tol > 0.0)) throw Error(ErrorCode::InvalidInput, "inner tolerance must be positive");
  if (inner_max_iter < 1 || outer_max_iter < 1)
    throw Error(ErrorCode::InvalidInput, "iteration caps must be positive");
}

std::vector<double> trim_weights(std::span<const double> distances,
                                 std::span<const double> weights, double alpha) {
  if (distances.size() != weights.size())
    throw Error(ErrorCode::DimensionMismatch, "need one distance per weight");
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw Error(ErrorCode::InvalidInput, "alpha must lie in [0, 1)");
  if (alpha == 0.0) return {weights.begin(), weights.end()};

  const std::size_t k = weights.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return distances[a] < distances[b]; });

  const double keep = 1.0 - alpha;
  std::vector<double> out(k, 0.0);
  double cumulative = 0.0;
  for (std::size_t idx : order) {
    if (cumulative >= keep - kMassTolerance) break;
    const double remaining = keep - cumulative;
    const double take = remaining >= weights[idx] - kMassTolerance ? weights[idx] : remaining;
    out[idx] = take;
    cumulative += take;
  }
  for (double& w : out) w /= keep;
  return out;
}

TrimmedResult trimmed_barycenter(const WeightedEnsemble& ens, const TrimConfig& cfg) {
  cfg.validate();
  const std::vector<double> base = ens.weights();
  const double total = std::accumulate(base.begin(), base.end(), 0.0);
  if (1.0 - cfg.alpha > total + kWeightSumTolerance)
    throw Error(ErrorCode::DegenerateTrim, "retained mass exceeds total weight");

  const auto restarts = static_cast<std::size_t>(cfg.restarts);
  std::vector<RestartOutcome> outcomes(restarts);
  parallel_for(restarts, resolve_threads(cfg.threads), [&](std::size_t r) {
    outcomes[r] = concentrate(ens, base, cfg, starting_point(ens, cfg, r));
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts; ++r)
    if (outcomes[r].variance < outcomes[best].variance) best = r;

  std::vector<double> variances;
  variances.reserve(restarts);
  for (const auto& o : outcomes) variances.push_back(o.variance);

  RestartOutcome& win = outcomes[best];
  TrimmedResult res = finish(std::move(*win.bary), std::move(win.weights), ens,
                             win.outer_iterations, static_cast<int>(best));
  res.restart_variances = std::move(variances);
  return res;
}

BallReport verify_ball_property(const TrimmedResult& res, const WeightedEnsemble& ens,
                                double alpha) {
  BallReport report;
  auto fail = [&](std::string msg) {
    report.ok = false;
    report.violations.push_back(std::move(msg));
  };
  const std::size_t k = ens.size();
  if (res.active_weights.size() != k) {
    fail("weight vector length differs from ensemble size");
    return report;
  }

  const std::vector<double> dist = distances_to(res.bary, ens);
  double r2 = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    if (res.active_weights[i] > 0.0) r2 = std::max(r2, dist[i]);
  report.radius_sq = r2;
  const double shell = 1e-9 * (1.0 + r2);

  if (std::abs(res.radius * res.radius - r2) > shell) fail("reported radius disagrees");

  double sum = 0.0;
  int partial = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double w = res.active_weights[i];
    const double full = ens[i].weight / (1.0 - alpha);
    sum += w;
    std::ostringstream who;
    who << "member " << i;
    if (w < 0.0) fail(who.str() + " has negative weight");
    if (w > full + 1e-12) fail(who.str() + " exceeds the trimming bound");
    const bool is_full = std::abs(w - full) <= 1e-9 * full + 1e-12;
    if (dist[i] < r2 - shell) {
      if (!is_full) fail(who.str() + " lies inside the ball without full weight");
    } else if (dist[i] > r2 + shell) {
      if (w != 0.0) fail(who.str() + " lies outside the ball with positive weight");
    } else if (w > 0.0 && !is_full) {
      ++partial;
    }
  }
  if (partial > 1) fail("more than one partially weighted boundary member");
  if (std::abs(sum - 1.0) > 1e-9) fail("weights do not sum to one");
  return report;
}

std::vector<VariancePoint> variance_curve(const WeightedEnsemble& ens,
                                          std::span<const double> alphas, TrimConfig cfg) {
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] >= 0.0 && alphas[i] < 1.0))
      throw Error(ErrorCode::InvalidInput, "alpha must lie in [0, 1)");
    if (i > 0 && alphas[i] < alphas[i - 1])
      throw Error(ErrorCode::InvalidInput, "alphas must be ascending");
  }
  std::vector<VariancePoint> out;
  out.reserve(alphas.size());
  for (double a : alphas) {
    cfg.alpha = a;
    TrimmedResult res = trimmed_barycenter(ens, cfg);
    const double v = res.trimmed_variance;
    out.push_back({a, v, std::move(res)});
  }
  return out;
}

TrimmedResult brute_force_trimmed(const WeightedEnsemble& ens, double alpha) {
  const std::size_t k = ens.size();
  if (k > 12) throw Error(ErrorCode::UnsupportedConfiguration, "brute force limited to k <= 12");
  const double equal = 1.0 / static_cast<double>(k);
  for (const auto& item : ens.items())
    if (std::abs(item.weight - equal) > 1e-12)
      throw Error(ErrorCode::UnsupportedConfiguration, "brute force needs equal weights");
  const double scaled = alpha * static_cast<double>(k);
  const double j_real = std::round(scaled);
  if (!(alpha >= 0.0 && alpha < 1.0) || std::abs(scaled - j_real) > 1e-9)
    throw Error(ErrorCode::UnsupportedConfiguration, "alpha must be a multiple of 1/k");
  const auto m = k - static_cast<std::size_t>(j_real);

  std::vector<std::size_t> subset(m);
  std::iota(subset.begin(), subset.end(), std::size_t{0});
  std::optional<BarycenterResult> best;
  std::vector<std::size_t> best_subset;
  for (;;) {
    std::vector<LocScatter> members;
    members.reserve(m);
    for (std::size_t i : subset) members.push_back(ens[i].dist);
    BarycenterResult r = fixed_point_barycenter(WeightedEnsemble::uniform(std::move(members)));
    if (!best || r.variance < best->variance) {
      best = std::move(r);
      best_subset = subset;
    }
    // next combination in lexicographic order
    std::size_t pos = m;
    while (pos > 0 && subset[pos - 1] == k - m + pos - 1) --pos;
    if (pos == 0) break;
    ++subset[pos - 1];
    for (std::size_t q = pos; q < m; ++q) subset[q] = subset[q - 1] + 1;
  }

  std::vector<double> weights(k, 0.0);
  for (std::size_t i : best_subset) weights[i] = 1.0 / static_cast<double>(m);
  return finish(std::move(best->bary), std::move(weights), ens, 0, 0);
}

}  // namespace wcons
