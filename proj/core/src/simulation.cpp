#include "wcons/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/binomial.hpp>

#include "wcons/mcd.hpp"
#include "wcons/parallel.hpp"

namespace wcons {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Stream tags keep unit, trimming and reference draws disjoint.
constexpr std::uint64_t kTrimStream = 0x7472696D00000000ULL;
constexpr std::uint64_t kReferenceStream = 0x7265660000000000ULL;

}  // namespace

Matrix random_orthogonal(std::size_t d, Rng& rng) {
  Matrix q(d, d);
  for (std::size_t c = 0; c < d; ++c) {
    for (;;) {
      Vector v(d);
      for (double& x : v) x = rng.normal();
      // modified Gram-Schmidt against previous columns
      for (std::size_t p = 0; p < c; ++p) {
        double proj = 0.0;
        for (std::size_t r = 0; r < d; ++r) proj += q(r, p) * v[r];
        for (std::size_t r = 0; r < d; ++r) v[r] -= proj * q(r, p);
      }
      const double norm = std::sqrt(dot(v, v));
      if (norm < 1e-8) continue;
      for (std::size_t r = 0; r < d; ++r) q(r, c) = v[r] / norm;
      break;
    }
  }
  return q;
}

SpdMatrix random_spd(std::size_t d, double condition_cap, Rng& rng) {
  if (d == 0) throw Error(ErrorCode::InvalidInput, "dimension must be positive");
  if (!(condition_cap >= 1.0)) throw Error(ErrorCode::InvalidInput, "condition cap must be >= 1");
  if (condition_cap == 1.0) return SpdMatrix::identity(d);
  const double log_cap = std::log(condition_cap);
  Vector values(d);
  for (double& v : values) v = std::exp(rng.uniform(-0.5, 0.5) * log_cap);
  return spd_from_eigen(random_orthogonal(d, rng), std::move(values));
}

LocScatter random_loc_scatter(std::size_t d, double condition_cap, double mean_scale, Rng& rng) {
  Vector mean(d);
  for (double& m : mean) m = mean_scale * rng.normal();
  return LocScatter(std::move(mean), random_spd(d, condition_cap, rng));
}

WeightedEnsemble random_ensemble(std::size_t k, std::size_t d, double condition_cap,
                                 double mean_scale, bool equal_weights, Rng& rng) {
  std::vector<LocScatter> members;
  members.reserve(k);
  for (std::size_t i = 0; i < k; ++i)
    members.push_back(random_loc_scatter(d, condition_cap, mean_scale, rng));
  if (equal_weights) return WeightedEnsemble::uniform(std::move(members));
  std::vector<double> w(k);
  double sum = 0.0;
  for (double& x : w) sum += (x = rng.uniform(0.5, 1.5));
  for (double& x : w) x /= sum;
  return WeightedEnsemble(w, std::move(members));
}

WeightedEnsemble random_commuting_ensemble(std::size_t k, std::size_t d, double condition_cap,
                                           double mean_scale, Rng& rng, Matrix* basis) {
  const Matrix q = random_orthogonal(d, rng);
  const double log_cap = std::log(condition_cap);
  std::vector<LocScatter> members;
  members.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    Vector values(d);
    for (double& v : values) v = std::exp(rng.uniform(-0.5, 0.5) * log_cap);
    Vector mean(d);
    for (double& m : mean) m = mean_scale * rng.normal();
    members.emplace_back(std::move(mean), spd_from_eigen(q, std::move(values)));
  }
  std::vector<double> w(k);
  double sum = 0.0;
  for (double& x : w) sum += (x = rng.uniform(0.5, 1.5));
  for (double& x : w) x /= sum;
  if (basis) *basis = q;
  return WeightedEnsemble(w, std::move(members));
}

std::vector<std::array<double, 2>> ellipse_points(const LocScatter& p, std::size_t count) {
  if (p.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "ellipse points need d = 2");
  const SpdMatrix root = spd_sqrt(p.cov());
  std::vector<std::array<double, 2>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
    const double c = std::cos(t);
    const double s = std::sin(t);
    out.push_back({p.mean()[0] + root(0, 0) * c + root(0, 1) * s,
                   p.mean()[1] + root(1, 0) * c + root(1, 1) * s});
  }
  return out;
}

Matrix sample_mixture(const LocScatter& inlier, const LocScatter& outlier, double p,
                      std::size_t n, Rng& rng, int* outlier_count) {
  if (inlier.dim() != outlier.dim())
    throw Error(ErrorCode::DimensionMismatch, "mixture components differ in dimension");
  const std::size_t d = inlier.dim();
  const SpdMatrix root_in = spd_sqrt(inlier.cov());
  const SpdMatrix root_out = spd_sqrt(outlier.cov());
  Matrix x(n, d);
  int outliers = 0;
  Vector z(d);
  for (std::size_t i = 0; i < n; ++i) {
    const bool is_outlier = rng.bernoulli(p);
    outliers += is_outlier ? 1 : 0;
    const LocScatter& comp = is_outlier ? outlier : inlier;
    const SpdMatrix& root = is_outlier ? root_out : root_in;
    for (double& v : z) v = rng.normal();
    const Vector y = root.matrix() * z;
    for (std::size_t c = 0; c < d; ++c) x(i, c) = comp.mean()[c] + y[c];
  }
  if (outlier_count) *outlier_count = outliers;
  return x;
}

// ----------------------------------------------------------- hospitals

void HospitalConfig::validate() const {
  if (k < 1 || n < 2) throw Error(ErrorCode::InvalidInput, "need k >= 1 units and n >= 2 points");
  if (!(mcd_fraction > 0.0 && mcd_fraction <= 1.0))
    throw Error(ErrorCode::InvalidInput, "MCD fraction must lie in (0, 1]");
  if (!(beta_a > 0.0 && beta_b > 0.0))
    throw Error(ErrorCode::InvalidInput, "Beta parameters must be positive");
  if (fixed_contamination && !(*fixed_contamination >= 0.0 && *fixed_contamination <= 1.0))
    throw Error(ErrorCode::InvalidInput, "contamination must lie in [0, 1]");
  if (inlier.dim() != outlier.dim())
    throw Error(ErrorCode::DimensionMismatch, "inlier and outlier dimension differ");
}

HospitalReport hospital_experiment(const HospitalConfig& cfg) {
  cfg.validate();
  const std::size_t d = cfg.inlier.dim();
  const auto h = static_cast<std::size_t>(std::floor(cfg.mcd_fraction * static_cast<double>(cfg.n)));
  McdOptions mcd;
  mcd.h = std::max(h, d + 1);
  mcd.restarts = cfg.mcd_restarts;
  mcd.consistency_correction = cfg.mcd_consistency;

  std::vector<std::optional<UnitEstimate>> slots(cfg.k);
  parallel_for(cfg.k, resolve_threads(cfg.threads), [&](std::size_t u) {
    Rng rng(derive_seed(cfg.seed, u));
    const double p = cfg.fixed_contamination ? *cfg.fixed_contamination
                                             : rng.beta(cfg.beta_a, cfg.beta_b);
    int outliers = 0;
    const Matrix x = sample_mixture(cfg.inlier, cfg.outlier, p, cfg.n, rng, &outliers);
    McdResult est = estimate_mcd(x, mcd, rng);
    slots[u] = UnitEstimate{p, outliers, std::move(est.estimate)};
  });

  std::vector<UnitEstimate> units;
  std::vector<LocScatter> estimates;
  units.reserve(cfg.k);
  estimates.reserve(cfg.k);
  int bad = 0;
  for (auto& s : slots) {
    if (static_cast<double>(s->outliers) > 0.2 * static_cast<double>(cfg.n)) ++bad;
    estimates.push_back(s->estimate);
    units.push_back(std::move(*s));
  }
  const WeightedEnsemble ens = WeightedEnsemble::uniform(std::move(estimates));

  BarycenterResult bary = fixed_point_barycenter(ens);
  TrimConfig tc;
  tc.alpha = cfg.alpha;
  tc.restarts = cfg.trim_restarts;
  tc.seed = derive_seed(cfg.seed, kTrimStream);
  tc.threads = cfg.threads;
  TrimmedResult trim = trimmed_barycenter(ens, tc);
  LocScatter lin = linear_mean(ens);

  const double db = w2_distance_sq(bary.bary, cfg.inlier);
  const double dt = w2_distance_sq(trim.bary, cfg.inlier);
  const double dl = w2_distance_sq(lin, cfg.inlier);
  LocScatter trimmed = trim.bary;
  return HospitalReport{std::move(units), std::move(bary.bary), std::move(trimmed), std::move(lin),
                        db, dt, dl, bad, std::move(trim)};
}

double expected_badly_contaminated(const HospitalConfig& cfg, double threshold) {
  const boost::math::beta_distribution<> prior(cfg.beta_a, cfg.beta_b);
  const double limit = std::floor(threshold * static_cast<double>(cfg.n));
  constexpr int kNodes = 20000;
  double acc = 0.0;
  for (int i = 0; i < kNodes; ++i) {
    const double p = (i + 0.5) / kNodes;
    const boost::math::binomial_distribution<> bin(static_cast<double>(cfg.n), p);
    acc += boost::math::pdf(prior, p) * boost::math::cdf(boost::math::complement(bin, limit));
  }
  return static_cast<double>(cfg.k) * acc / kNodes;
}

// --------------------------------------------------------- consistency

LocScatterLaw gaussian_parameter_law(std::size_t d) {
  return [d](Rng& rng) { return random_loc_scatter(d, 10.0, 1.0, rng); };
}

ConsistencyReport consistency_harness(const LocScatterLaw& law, const ConsistencyConfig& cfg) {
  if (cfg.n_values.empty() || cfg.reps < 1)
    throw Error(ErrorCode::InvalidInput, "consistency harness needs n values and reps");
  const std::size_t n_ref = *std::max_element(cfg.n_values.begin(), cfg.n_values.end());

  auto solve = [&](std::size_t n, Rng& rng, std::uint64_t trim_seed) {
    std::vector<LocScatter> members;
    members.reserve(n);
    for (std::size_t i = 0; i < n; ++i) members.push_back(law(rng));
    TrimConfig tc;
    tc.alpha = cfg.alpha;
    tc.restarts = cfg.restarts;
    tc.seed = trim_seed;
    tc.threads = 1;
    return trimmed_barycenter(WeightedEnsemble::uniform(std::move(members)), tc);
  };

  Rng ref_rng(derive_seed(cfg.seed, kReferenceStream));
  const TrimmedResult ref = solve(n_ref, ref_rng, derive_seed(cfg.seed, kReferenceStream + 1));

  const auto reps = static_cast<std::size_t>(cfg.reps);
  const std::size_t tasks = cfg.n_values.size() * reps;
  std::vector<double> w2(tasks), var(tasks);
  parallel_for(tasks, resolve_threads(cfg.threads), [&](std::size_t t) {
    Rng rng(derive_seed(cfg.seed, t));
    const TrimmedResult r = solve(cfg.n_values[t / reps], rng, derive_seed(cfg.seed ^ kTrimStream, t));
    w2[t] = w2_distance_sq(r.bary, ref.bary);
    var[t] = r.trimmed_variance;
  });

  ConsistencyReport report{{}, ref.bary, ref.trimmed_variance};
  for (std::size_t i = 0; i < cfg.n_values.size(); ++i) {
    std::vector<double> a(w2.begin() + i * reps, w2.begin() + (i + 1) * reps);
    std::vector<double> v(var.begin() + i * reps, var.begin() + (i + 1) * reps);
    std::vector<double> gap(v.size());
    std::transform(v.begin(), v.end(), gap.begin(),
                   [&](double x) { return std::abs(x - ref.trimmed_variance); });
    report.rows.push_back({cfg.n_values[i], median(a), median(v), median(gap)});
  }
  return report;
}

}  // namespace wcons
