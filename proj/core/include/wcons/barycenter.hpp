#pragma once

// Weighted 2-Wasserstein barycenters of location-scatter ensembles.
//
// The barycenter mean is the weighted mean of the member means. Its
// covariance is the unique SPD root of
//
//     sum_j w_j (S^1/2 S_j S^1/2)^1/2 = S,
//
// approximated by the fixed-point map
//
//     S <- S^-1/2 (sum_j w_j (S^1/2 S_j S^1/2)^1/2)^2 S^-1/2,
//
// which converges from any SPD starting point.

#include <optional>
#include <span>
#include <vector>

#include "wcons/error.hpp"
#include "wcons/gaussian_metric.hpp"

namespace wcons {

struct WeightedMember {
  double weight;
  LocScatter dist;
};

/// Finite discrete measure over location-scatter members: positive weights
/// summing to one, all members of one dimension.
class WeightedEnsemble {
 public:
  explicit WeightedEnsemble(std::vector<WeightedMember> items);
  WeightedEnsemble(std::span<const double> weights, std::vector<LocScatter> dists);

  static WeightedEnsemble uniform(std::vector<LocScatter> dists);

  std::size_t size() const noexcept { return items_.size(); }
  std::size_t dim() const noexcept { return items_.front().dist.dim(); }
  const std::vector<WeightedMember>& items() const noexcept { return items_; }
  const WeightedMember& operator[](std::size_t i) const noexcept { return items_[i]; }

  std::vector<double> weights() const;

  /// Members with strictly positive new weight, reweighted; `kept` receives
  /// the original indices when non-null.
  WeightedEnsemble restricted(std::span<const double> new_weights,
                              std::vector<std::size_t>* kept = nullptr) const;

 private:
  std::vector<WeightedMember> items_;
};

struct BarycenterOptions {
  double tol = 1e-12;
  int max_iter = 1000;
  std::optional<SpdMatrix> init;  // defaults to the weighted mean of covariances
};

struct BarycenterResult {
  LocScatter bary;
  int iterations = 0;
  double residual = 0.0;  // relative Frobenius defect of the fixed-point equation
  double variance = 0.0;  // sum_j w_j W2^2(P_j, bary)
};

class MaxIterationsExceeded : public Error {
 public:
  MaxIterationsExceeded(LocScatter last, double residual, int iterations);

  const LocScatter& last_iterate() const noexcept { return last_; }
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  LocScatter last_;
  double residual_;
  int iterations_;
};

BarycenterResult fixed_point_barycenter(const WeightedEnsemble& ens,
                                        const BarycenterOptions& opts = {});

/// One application of the barycenter map: pushes eta through the weighted
/// average of its optimal maps to the members.
LocScatter g_map(const WeightedEnsemble& ens, const LocScatter& eta);

/// ||sum_j w_j (S^1/2 S_j S^1/2)^1/2 - S||_F / ||S||_F.
double fixed_point_residual(const WeightedEnsemble& ens, const SpdMatrix& cov);

/// sum_j w_j W2^2(P_j, bary), evaluated directly.
double barycenter_variance(const WeightedEnsemble& ens, const LocScatter& bary);

/// V(eta) = sum_j w_j W2^2(eta, P_j).
inline double frechet_objective(const WeightedEnsemble& ens, const LocScatter& eta) {
  return barycenter_variance(ens, eta);
}

Vector weighted_mean(const WeightedEnsemble& ens);

/// exp(sum_j w_j log S_j) with the weighted mean location.
LocScatter log_euclidean_mean(const WeightedEnsemble& ens);

/// sum_j w_j S_j with the weighted mean location.
LocScatter linear_mean(const WeightedEnsemble& ens);

}  // namespace wcons
