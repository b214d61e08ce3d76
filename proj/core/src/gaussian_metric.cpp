#include "wcons/gaussian_metric.hpp"

#include <algorithm>
#include <cmath>

#include "wcons/error.hpp"

namespace wcons {

namespace {

void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) throw Error(ErrorCode::DimensionMismatch, "distributions have different dimension");
}

// Ignore negative round-off up to 1e-10 of the problem scale.
double clamp_roundoff(double value, double scale) {
  if (value >= 0.0) return value;
  if (value >= -1e-10 * scale) return 0.0;
  throw Error(ErrorCode::InvalidInput, "negative squared distance beyond round-off");
}

}  // namespace

LocScatter::LocScatter(Vector mean, SpdMatrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
  require_same_dim(mean_.size(), cov_.dim());
  if (!std::all_of(mean_.begin(), mean_.end(), [](double v) { return std::isfinite(v); }))
    throw Error(ErrorCode::InvalidInput, "non-finite mean");
}

LocScatter LocScatter::standard(std::size_t dim) {
  return LocScatter(Vector(dim, 0.0), SpdMatrix::identity(dim));
}

Vector AffineMap::operator()(std::span<const double> x) const {
  Vector centered(x.begin(), x.end());
  for (std::size_t i = 0; i < centered.size(); ++i) centered[i] -= source_mean[i];
  Vector y = matrix.matrix() * centered;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += target_mean[i];
  return y;
}

double trace_sqrt_product(const SpdMatrix& sqrt_a, const SpdMatrix& b) {
  const EigenDecomposition eig = sym_eigen(sandwich(sqrt_a.sym(), b.sym()));
  double s = 0.0;
  for (double v : eig.values) s += std::sqrt(std::max(v, 0.0));
  return s;
}

double bures_sq(const SpdMatrix& a, const SpdMatrix& b) {
  require_same_dim(a.dim(), b.dim());
  const double ta = a.trace();
  const double tb = b.trace();
  const double cross = trace_sqrt_product(spd_sqrt(a), b);
  return clamp_roundoff(ta + tb - 2.0 * cross, ta + tb);
}

double w2_distance_sq(const LocScatter& p, const LocScatter& q) {
  require_same_dim(p.dim(), q.dim());
  const double mean_term = squared_distance(p.mean(), q.mean());
  const double ta = p.cov().trace();
  const double tb = q.cov().trace();
  const double cross = trace_sqrt_product(spd_sqrt(p.cov()), q.cov());
  return clamp_roundoff(mean_term + ta + tb - 2.0 * cross, mean_term + ta + tb);
}

AffineMap optimal_map(const LocScatter& p, const LocScatter& q) {
  require_same_dim(p.dim(), q.dim());
  const SpdMatrix root = spd_sqrt(p.cov());
  const SpdMatrix inv_root = spd_inv_sqrt(p.cov());
  const SpdMatrix middle = spd_sqrt(certify_spd(sandwich(root.sym(), q.cov().sym())));
  SpdMatrix a = certify_spd(sandwich(inv_root.sym(), middle.sym()));
  return AffineMap{std::move(a), p.mean(), q.mean()};
}

std::pair<Vector, LocScatter> center_split(const LocScatter& p) {
  return {p.mean(), LocScatter(Vector(p.dim(), 0.0), p.cov())};
}

LocScatter push_similarity(const LocScatter& p, double scale, const Matrix& rotation,
                           std::span<const double> shift) {
  if (rotation.rows() != p.dim() || rotation.cols() != p.dim() || shift.size() != p.dim())
    throw Error(ErrorCode::DimensionMismatch, "similarity dimension");
  Vector mean = rotation * p.mean();
  for (std::size_t i = 0; i < mean.size(); ++i) mean[i] = scale * mean[i] + shift[i];
  SymMatrix cov = conjugate(rotation, p.cov().sym()) * (scale * scale);
  return LocScatter(std::move(mean), certify_spd(cov));
}

}  // namespace wcons
