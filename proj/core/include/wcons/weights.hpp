#pragma once

#include <cmath>
#include <span>

#include "wcons/error.hpp"

namespace wcons {

inline constexpr double kWeightSumTolerance = 1e-9;

/// Throws BadWeights unless every weight is positive and finite and the sum
/// is within `tol` of one.
inline void validate_weights(std::span<const double> weights, double tol = kWeightSumTolerance) {
  if (weights.empty()) throw Error(ErrorCode::BadWeights, "no weights");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w))
      throw Error(ErrorCode::BadWeights, "weights must be positive and finite");
    sum += w;
  }
  if (std::abs(sum - 1.0) > tol) throw Error(ErrorCode::BadWeights, "weights must sum to 1");
}

}  // namespace wcons
