#include "wcons/barycenter.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "wcons/weights.hpp"

namespace wcons {

namespace {

std::string max_iter_message(double residual, int iterations) {
  std::ostringstream os;
  os << "barycenter iteration did not converge after " << iterations
     << " iterations (residual " << residual << ")";
  return os.str();
}

// sum_j w_j (R S_j R)^1/2 for R = S^1/2.
SymMatrix averaged_root(const WeightedEnsemble& ens, const SpdMatrix& root) {
  SymMatrix acc = SymMatrix::zero(ens.dim());
  for (const auto& item : ens.items()) {
    EigenDecomposition eig = sym_eigen(sandwich(root.sym(), item.dist.cov().sym()));
    for (double& v : eig.values) v = std::sqrt(std::max(v, 0.0));
    acc += reconstruct(eig.vectors, eig.values) * item.weight;
  }
  return acc;
}

struct Step {
  SpdMatrix next;
  double residual;
};

Step fixed_point_step(const WeightedEnsemble& ens, const SpdMatrix& current) {
  const SpdMatrix root = spd_sqrt(current);
  const SymMatrix k = averaged_root(ens, root);
  const double residual = (k - current.sym()).frobenius_norm() / current.frobenius_norm();
  const SpdMatrix inv_root = spd_inv_sqrt(current);
  const SymMatrix k2(k.matrix() * k.matrix());
  return {certify_spd(sandwich(inv_root.sym(), k2)), residual};
}

}  // namespace

// ------------------------------------------------------ WeightedEnsemble

WeightedEnsemble::WeightedEnsemble(std::vector<WeightedMember> items) : items_(std::move(items)) {
  if (items_.empty()) throw Error(ErrorCode::BadWeights, "ensemble needs at least one member");
  const std::size_t d = items_.front().dist.dim();
  std::vector<double> w;
  w.reserve(items_.size());
  for (const auto& item : items_) {
    if (item.dist.dim() != d)
      throw Error(ErrorCode::DimensionMismatch, "ensemble members differ in dimension");
    w.push_back(item.weight);
  }
  validate_weights(w);
}

WeightedEnsemble::WeightedEnsemble(std::span<const double> weights, std::vector<LocScatter> dists)
    : WeightedEnsemble([&] {
        if (weights.size() != dists.size())
          throw Error(ErrorCode::BadWeights, "need one weight per member");
        std::vector<WeightedMember> items;
        items.reserve(dists.size());
        for (std::size_t i = 0; i < dists.size(); ++i)
          items.push_back({weights[i], std::move(dists[i])});
        return items;
      }()) {}

WeightedEnsemble WeightedEnsemble::uniform(std::vector<LocScatter> dists) {
  std::vector<double> w(dists.size(), 1.0 / static_cast<double>(dists.size()));
  return WeightedEnsemble(w, std::move(dists));
}

std::vector<double> WeightedEnsemble::weights() const {
  std::vector<double> w;
  w.reserve(items_.size());
  for (const auto& item : items_) w.push_back(item.weight);
  return w;
}

WeightedEnsemble WeightedEnsemble::restricted(std::span<const double> new_weights,
                                              std::vector<std::size_t>* kept) const {
  if (new_weights.size() != items_.size())
    throw Error(ErrorCode::BadWeights, "need one weight per member");
  std::vector<WeightedMember> items;
  if (kept) kept->clear();
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (new_weights[i] > 0.0) {
      items.push_back({new_weights[i], items_[i].dist});
      if (kept) kept->push_back(i);
    }
  }
  return WeightedEnsemble(std::move(items));
}

// ---------------------------------------------------------- solver

MaxIterationsExceeded::MaxIterationsExceeded(LocScatter last, double residual, int iterations)
    : Error(ErrorCode::MaxIterationsExceeded, max_iter_message(residual, iterations)),
      last_(std::move(last)),
      residual_(residual),
      iterations_(iterations) {}

Vector weighted_mean(const WeightedEnsemble& ens) {
  Vector m(ens.dim(), 0.0);
  for (const auto& item : ens.items())
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += item.weight * item.dist.mean()[i];
  return m;
}

BarycenterResult fixed_point_barycenter(const WeightedEnsemble& ens,
                                        const BarycenterOptions& opts) {
  if (!(opts.tol > 0.0)) throw Error(ErrorCode::InvalidInput, "tolerance must be positive");
  if (opts.init && opts.init->dim() != ens.dim())
    throw Error(ErrorCode::DimensionMismatch, "initial covariance dimension");

  Vector mean = weighted_mean(ens);
  if (ens.size() == 1) {
    LocScatter bary(std::move(mean), ens[0].dist.cov());
    return {std::move(bary), 0, 0.0, 0.0};
  }

  SpdMatrix current = opts.init ? *opts.init : linear_mean(ens).cov();
  double change = std::numeric_limits<double>::infinity();
  for (int iter = 0;; ++iter) {
    Step step = fixed_point_step(ens, current);
    if (step.residual == 0.0 || (change < opts.tol && step.residual <= 10.0 * opts.tol)) {
      LocScatter bary(std::move(mean), std::move(current));
      const double variance = barycenter_variance(ens, bary);
      return {std::move(bary), iter, step.residual, variance};
    }
    if (iter >= opts.max_iter)
      throw MaxIterationsExceeded(LocScatter(mean, current), step.residual, iter);
    change = (step.next.sym() - current.sym()).frobenius_norm() / current.frobenius_norm();
    current = std::move(step.next);
  }
}

LocScatter g_map(const WeightedEnsemble& ens, const LocScatter& eta) {
  if (eta.dim() != ens.dim()) throw Error(ErrorCode::DimensionMismatch, "eta dimension");
  return LocScatter(weighted_mean(ens), fixed_point_step(ens, eta.cov()).next);
}

double fixed_point_residual(const WeightedEnsemble& ens, const SpdMatrix& cov) {
  if (cov.dim() != ens.dim()) throw Error(ErrorCode::DimensionMismatch, "covariance dimension");
  const SymMatrix k = averaged_root(ens, spd_sqrt(cov));
  return (k - cov.sym()).frobenius_norm() / cov.frobenius_norm();
}

double barycenter_variance(const WeightedEnsemble& ens, const LocScatter& bary) {
  if (bary.dim() != ens.dim()) throw Error(ErrorCode::DimensionMismatch, "barycenter dimension");
  double v = 0.0;
  for (const auto& item : ens.items()) v += item.weight * w2_distance_sq(item.dist, bary);
  return v;
}

LocScatter log_euclidean_mean(const WeightedEnsemble& ens) {
  SymMatrix acc = SymMatrix::zero(ens.dim());
  for (const auto& item : ens.items()) acc += spd_log(item.dist.cov()) * item.weight;
  return LocScatter(weighted_mean(ens), spd_exp(acc));
}

LocScatter linear_mean(const WeightedEnsemble& ens) {
  SymMatrix acc = SymMatrix::zero(ens.dim());
  for (const auto& item : ens.items()) acc += item.dist.cov().sym() * item.weight;
  return LocScatter(weighted_mean(ens), certify_spd(acc));
}

}  // namespace wcons
