#pragma once

// 2-Wasserstein geometry of a location-scatter family. Every member is fully
// described by its mean and covariance, and distances/maps between members
// depend only on those two moments.

#include <span>
#include <utility>

#include "wcons/spd.hpp"

namespace wcons {

/// A member of a location-scatter family: mean vector plus certified
/// covariance of matching dimension.
class LocScatter {
 public:
  LocScatter(Vector mean, SpdMatrix cov);

  static LocScatter standard(std::size_t dim);

  std::size_t dim() const noexcept { return mean_.size(); }
  const Vector& mean() const noexcept { return mean_; }
  const SpdMatrix& cov() const noexcept { return cov_; }

 private:
  Vector mean_;
  SpdMatrix cov_;
};

/// T(x) = target_mean + A (x - source_mean).
struct AffineMap {
  SpdMatrix matrix;
  Vector source_mean;
  Vector target_mean;

  Vector operator()(std::span<const double> x) const;
};

/// ||m_P - m_Q||^2 + tr(S_P + S_Q - 2 (S_P^1/2 S_Q S_P^1/2)^1/2).
double w2_distance_sq(const LocScatter& p, const LocScatter& q);

/// Trace part of the squared distance for centered members.
double bures_sq(const SpdMatrix& a, const SpdMatrix& b);

/// tr((A^1/2 B A^1/2)^1/2), given A^1/2.
double trace_sqrt_product(const SpdMatrix& sqrt_a, const SpdMatrix& b);

/// Optimal (monotone) transport map from p to q.
AffineMap optimal_map(const LocScatter& p, const LocScatter& q);

/// Split a member into its mean and its centered version.
std::pair<Vector, LocScatter> center_split(const LocScatter& p);

/// Image of p under x -> scale * rotation * x + shift (rotation orthogonal).
LocScatter push_similarity(const LocScatter& p, double scale, const Matrix& rotation,
                           std::span<const double> shift);

}  // namespace wcons
