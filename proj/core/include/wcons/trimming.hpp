#pragma once

// Trimmed barycenters ("wide consensus") of weighted location-scatter
// ensembles.
//
// An alpha-trimming may down-weight any member, as long as no weight grows by
// more than a factor 1/(1 - alpha) after renormalization. The trimmed
// barycenter jointly minimizes, over trimmings and candidate centers, the
// weighted sum of squared W2 distances. Optimal trimmings keep exactly the
// members inside a W2 ball around the solution, with at most one partially
// weighted member on its boundary, which is what the concentration step
// below exploits.

#include <cstdint>
#include <string>
#include <vector>

#include "wcons/barycenter.hpp"

namespace wcons {

struct TrimConfig {
  double alpha = 0.0;  // in [0, 1)
  int restarts = 10;
  std::uint64_t seed = 0;
  double inner_tol = 1e-12;
  int inner_max_iter = 1000;
  int outer_max_iter = 100;
  unsigned threads = 0;  // 0: WCONS_THREADS or hardware concurrency

  void validate() const;
};

struct TrimmedResult {
  LocScatter bary;
  std::vector<double> active_weights;  // normalized; zero for trimmed members
  double trimmed_variance = 0.0;
  int outer_iterations = 0;
  int restart_index = 0;
  double radius = 0.0;  // W2 distance to the farthest member with positive weight
  std::vector<double> restart_variances;
};

/// Concentration step. Sorts members by ascending distance (ties by index),
/// keeps full weight until the cumulative weight first reaches 1 - alpha, gives
/// the boundary member the remainder, zeroes the rest, and renormalizes by
/// 1 / (1 - alpha).
std::vector<double> trim_weights(std::span<const double> distances,
                                 std::span<const double> weights, double alpha);

/// Alternates concentration steps with barycenter updates from `restarts`
/// data-anchored starting points and keeps the restart with the smallest
/// trimmed variance (ties go to the lower restart index). Restarts 0..k-1
/// start at each member once in a seeded order; further restarts start at
/// the barycenter of a random member subset of size ceil((1 - alpha) k).
TrimmedResult trimmed_barycenter(const WeightedEnsemble& ens, const TrimConfig& cfg);

struct BallReport {
  bool ok = true;
  double radius_sq = 0.0;
  std::vector<std::string> violations;
};

/// Checks that `res` keeps full weight on members strictly inside the ball of
/// radius `res.radius` around `res.bary`, zero weight strictly outside, and
/// partial weight only on the boundary shell (at most one member).
BallReport verify_ball_property(const TrimmedResult& res, const WeightedEnsemble& ens,
                                double alpha);

struct VariancePoint {
  double alpha;
  double variance;
  TrimmedResult result;
};

std::vector<VariancePoint> variance_curve(const WeightedEnsemble& ens,
                                          std::span<const double> alphas, TrimConfig cfg);

/// Exhaustive oracle for equal weights 1/k and alpha = j/k (k <= 12): the best
/// (k - j)-subset by trimmed variance, ties to the lexicographically smallest
/// subset.
TrimmedResult brute_force_trimmed(const WeightedEnsemble& ens, double alpha);

}  // namespace wcons
