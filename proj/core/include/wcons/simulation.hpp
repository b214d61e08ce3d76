#pragma once

// Seeded experiment harnesses. Every output is a pure function of its
// configuration, seed included; per-unit and per-replication streams are
// derived with derive_seed so work can be split across threads without
// changing results.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "wcons/barycenter.hpp"
#include "wcons/rng.hpp"
#include "wcons/trimming.hpp"

namespace wcons {

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, signs fixed).
Matrix random_orthogonal(std::size_t d, Rng& rng);

/// Eigenvalues log-uniform on [cap^-1/2, cap^1/2] in a random orthonormal basis.
SpdMatrix random_spd(std::size_t d, double condition_cap, Rng& rng);

/// Mean ~ N(0, mean_scale^2 I), covariance random_spd(d, condition_cap).
LocScatter random_loc_scatter(std::size_t d, double condition_cap, double mean_scale, Rng& rng);

/// k random members; weights equal or drawn uniformly from [0.5, 1.5] then
/// normalized.
WeightedEnsemble random_ensemble(std::size_t k, std::size_t d, double condition_cap,
                                 double mean_scale, bool equal_weights, Rng& rng);

/// Covariances sharing one random eigenbasis; centered when mean_scale is 0.
WeightedEnsemble random_commuting_ensemble(std::size_t k, std::size_t d, double condition_cap,
                                           double mean_scale, Rng& rng, Matrix* basis = nullptr);

/// Points m + S^1/2 (cos t_i, sin t_i), t_i = 2 pi i / count, on the
/// ellipse (x - m)^t S^-1 (x - m) = 1.
std::vector<std::array<double, 2>> ellipse_points(const LocScatter& p, std::size_t count);

/// Draw `n` points from the mixture (1 - p) * inlier + p * outlier.
Matrix sample_mixture(const LocScatter& inlier, const LocScatter& outlier, double p,
                      std::size_t n, Rng& rng, int* outlier_count = nullptr);

// ----------------------------------------------------------- hospitals

struct HospitalConfig {
  std::size_t k = 100;
  std::size_t n = 100;
  LocScatter inlier = LocScatter::standard(2);
  LocScatter outlier = LocScatter({4.0, 4.0}, SpdMatrix::identity(2));
  double beta_a = 4.0;
  double beta_b = 36.0;
  std::optional<double> fixed_contamination;  // replaces the Beta draw when set
  double mcd_fraction = 0.8;
  int mcd_restarts = 20;
  bool mcd_consistency = true;
  double alpha = 0.2;
  int trim_restarts = 10;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  void validate() const;
};

struct UnitEstimate {
  double contamination;
  int outliers;
  LocScatter estimate;
};

struct HospitalReport {
  std::vector<UnitEstimate> units;
  LocScatter barycenter;
  LocScatter trimmed;
  LocScatter linear;
  double dist_barycenter;
  double dist_trimmed;
  double dist_linear;
  int badly_contaminated;  // units with more than 20% outliers in their sample
  TrimmedResult trim;
};

HospitalReport hospital_experiment(const HospitalConfig& cfg);

/// k * E_p[P(Binomial(n, p) > threshold * n)] with p ~ Beta(a, b).
double expected_badly_contaminated(const HospitalConfig& cfg, double threshold = 0.2);

// --------------------------------------------------------- consistency

using LocScatterLaw = std::function<LocScatter(Rng&)>;

/// Mean ~ N(0, I_d), covariance random_spd(d, 10).
LocScatterLaw gaussian_parameter_law(std::size_t d = 2);

struct ConsistencyConfig {
  std::vector<std::size_t> n_values{50, 200, 800};
  double alpha = 0.2;
  int reps = 20;
  int restarts = 10;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct ConsistencyRow {
  std::size_t n;
  double median_w2;       // median over reps of W2^2 to the reference solution
  double median_var;      // median trimmed variance
  double median_var_gap;  // median |Var_alpha - reference Var_alpha|
};

struct ConsistencyReport {
  std::vector<ConsistencyRow> rows;
  LocScatter reference;
  double reference_variance;
};

/// The reference solution comes from an independent draw at the largest n.
ConsistencyReport consistency_harness(const LocScatterLaw& law, const ConsistencyConfig& cfg);

}  // namespace wcons
