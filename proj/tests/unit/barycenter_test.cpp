#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wcons/barycenter.hpp"
#include "wcons/simulation.hpp"

namespace {

using namespace wcons;

LocScatter normal1(double m, double sd) { return LocScatter({m}, SpdMatrix{{sd * sd}}); }

WeightedEnsemble three_scales() {
  return WeightedEnsemble::uniform({normal1(0, 0.2), normal1(0, 1), normal1(0, 2)});
}

// Both closed-form lines for the variance at the barycenter.
std::pair<double, double> variance_lines(const WeightedEnsemble& ens, const LocScatter& bary) {
  double spread = 0.0, second = 0.0;
  for (const auto& it : ens.items()) {
    spread += it.weight * (squared_distance(it.dist.mean(), bary.mean()) +
                           it.dist.cov().trace() - bary.cov().trace());
    second += it.weight * (dot(it.dist.mean(), it.dist.mean()) + it.dist.cov().trace());
  }
  return {spread, second - (dot(bary.mean(), bary.mean()) + bary.cov().trace())};
}

TEST(WeightedEnsemble, Validation) {
  const std::vector<double> bad{0.5, 0.6};
  EXPECT_THROW(WeightedEnsemble(bad, {normal1(0, 1), normal1(1, 1)}), Error);
  const std::vector<double> neg{1.5, -0.5};
  EXPECT_THROW(WeightedEnsemble(neg, {normal1(0, 1), normal1(1, 1)}), Error);
  const std::vector<double> ok{0.5, 0.5};
  EXPECT_THROW(WeightedEnsemble(ok, {normal1(0, 1), LocScatter::standard(2)}), Error);
}

TEST(FixedPoint, SingletonReturnsInput) {
  const LocScatter p({1.0, 2.0}, SpdMatrix{{2.0, 0.3}, {0.3, 1.0}});
  const BarycenterResult r = fixed_point_barycenter(WeightedEnsemble::uniform({p}));
  EXPECT_EQ(r.bary.mean(), p.mean());
  EXPECT_EQ(r.bary.cov().matrix(), p.cov().matrix());
  EXPECT_EQ(r.residual, 0.0);
}

TEST(FixedPoint, CommutingPair) {
  const auto ens = WeightedEnsemble::uniform({LocScatter::standard(3),
                                              LocScatter({0, 0, 0}, certify_spd(SymMatrix::identity(3) * 9.0))});
  const BarycenterResult r = fixed_point_barycenter(ens);
  EXPECT_LE((r.bary.cov().matrix() - Matrix::identity(3) * 4.0).frobenius_norm(), 1e-12);
}

TEST(FixedPoint, ThreeScalesValues) {
  const BarycenterResult r = fixed_point_barycenter(three_scales());
  EXPECT_NEAR(std::sqrt(r.bary.cov()(0, 0)), 1.067, 1e-3);
  EXPECT_NEAR(std::sqrt(r.bary.cov()(0, 0)), 3.2 / 3.0, 1e-12);
  EXPECT_NEAR(r.variance, 1.68 - std::pow(3.2 / 3.0, 2), 1e-12);
  EXPECT_NEAR(r.variance, 0.5422, 1e-4);
}

TEST(FixedPoint, MeanIsWeightedMean) {
  Rng rng(1);
  const WeightedEnsemble ens = random_ensemble(7, 3, 10.0, 2.0, false, rng);
  const BarycenterResult r = fixed_point_barycenter(ens);
  EXPECT_EQ(r.bary.mean(), weighted_mean(ens));
}

TEST(FixedPoint, AgreesWithEigenOracle) {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const WeightedEnsemble ens = random_ensemble(2 + rng.uniform_index(8), 1 + rng.uniform_index(5),
                                                 100.0, 1.0, false, rng);
    const oracle::Mat ref = oracle::barycenter_cov(ens);
    const oracle::Mat got = oracle::to_eigen(fixed_point_barycenter(ens).bary.cov());
    EXPECT_LE((got - ref).norm(), 1e-9 * ref.norm());
  }
}

TEST(FixedPoint, ResidualOnRandomEnsembles) {
  Rng rng(3);
  for (int t = 0; t < 30; ++t) {
    const WeightedEnsemble ens = random_ensemble(1 + rng.uniform_index(50), 1 + rng.uniform_index(10),
                                                 1e4, 1.0, rng.bernoulli(0.5), rng);
    const BarycenterResult r = fixed_point_barycenter(ens);
    EXPECT_LE(r.residual, 1e-8);
    EXPECT_LE(fixed_point_residual(ens, r.bary.cov()), 1e-8);
  }
}

TEST(FixedPoint, ThrowsWhenCapped) {
  Rng rng(4);
  const WeightedEnsemble ens = random_ensemble(5, 4, 1e3, 1.0, true, rng);
  BarycenterOptions opts;
  opts.max_iter = 1;
  try {
    fixed_point_barycenter(ens, opts);
    FAIL();
  } catch (const MaxIterationsExceeded& e) {
    EXPECT_EQ(e.code(), ErrorCode::MaxIterationsExceeded);
    EXPECT_FALSE(e.is_validation_error());
    EXPECT_GT(e.residual(), 0.0);
    EXPECT_EQ(e.last_iterate().dim(), 4u);
  }
}

TEST(FixedPoint, AnyInitConverges) {
  Rng rng(5);
  const WeightedEnsemble ens = random_ensemble(6, 3, 50.0, 1.0, false, rng);
  const BarycenterResult a = fixed_point_barycenter(ens);
  BarycenterOptions opts;
  opts.init = certify_spd(SymMatrix::identity(3) * 1e-3);
  const BarycenterResult b = fixed_point_barycenter(ens, opts);
  EXPECT_LE((a.bary.cov().matrix() - b.bary.cov().matrix()).frobenius_norm(),
            1e-10 * a.bary.cov().frobenius_norm());
}

TEST(FixedPoint, PermutationInvariant) {
  Rng rng(6);
  for (int t = 0; t < 20; ++t) {
    const WeightedEnsemble ens = random_ensemble(3 + rng.uniform_index(10), 1 + rng.uniform_index(5),
                                                 100.0, 1.0, false, rng);
    std::vector<WeightedMember> items = ens.items();
    std::reverse(items.begin(), items.end());
    std::swap(items.front(), items[items.size() / 2]);
    const LocScatter a = fixed_point_barycenter(ens).bary;
    const LocScatter b = fixed_point_barycenter(WeightedEnsemble(items)).bary;
    EXPECT_LE((a.cov().matrix() - b.cov().matrix()).frobenius_norm(), 1e-10 * a.cov().frobenius_norm());
    EXPECT_LE(std::sqrt(squared_distance(a.mean(), b.mean())), 1e-10 * (1.0 + std::sqrt(dot(a.mean(), a.mean()))));
  }
}

TEST(FixedPoint, SimilarityEquivariant) {
  Rng rng(7);
  for (int t = 0; t < 30; ++t) {
    const std::size_t d = 1 + rng.uniform_index(5);
    const WeightedEnsemble ens = random_ensemble(2 + rng.uniform_index(8), d, 100.0, 1.0, false, rng);
    const double c = rng.uniform(0.3, 3.0);
    const Matrix r = random_orthogonal(d, rng);
    Vector b(d);
    for (double& x : b) x = rng.normal(0.0, 2.0);
    std::vector<WeightedMember> pushed;
    for (const auto& it : ens.items()) pushed.push_back({it.weight, push_similarity(it.dist, c, r, b)});
    const LocScatter lhs = push_similarity(fixed_point_barycenter(ens).bary, c, r, b);
    const LocScatter rhs = fixed_point_barycenter(WeightedEnsemble(pushed)).bary;
    EXPECT_LE(w2_distance_sq(lhs, rhs), 1e-8 * c * c);
  }
}

TEST(FixedPoint, OneDimensionalClosedForm) {
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const std::size_t k = 1 + rng.uniform_index(10);
    std::vector<LocScatter> members;
    std::vector<double> sd;
    for (std::size_t j = 0; j < k; ++j) {
      sd.push_back(std::exp(rng.uniform(-2.0, 2.0)));
      members.push_back(normal1(rng.normal(), sd.back()));
    }
    const WeightedEnsemble ens = WeightedEnsemble::uniform(members);
    const double mean_sd = std::accumulate(sd.begin(), sd.end(), 0.0) / static_cast<double>(k);
    const double got = fixed_point_barycenter(ens).bary.cov()(0, 0);
    EXPECT_NEAR(got, mean_sd * mean_sd, 1e-10 * std::max(1.0, mean_sd * mean_sd));
  }
}

TEST(FixedPoint, VarianceMatchesBothClosedFormLines) {
  Rng rng(9);
  for (int t = 0; t < 50; ++t) {
    const WeightedEnsemble ens = random_ensemble(1 + rng.uniform_index(20), 1 + rng.uniform_index(6),
                                                 1e3, 2.0, false, rng);
    const BarycenterResult r = fixed_point_barycenter(ens);
    const auto [first, second] = variance_lines(ens, r.bary);
    EXPECT_NEAR(first, r.variance, 1e-8 * std::max(r.variance, 1e-12));
    EXPECT_NEAR(second, r.variance, 1e-8 * std::max(r.variance, 1e-12) + 1e-12 * (1.0 + std::abs(second)));
  }
}

TEST(BarycenterVariance, Examples) {
  const LocScatter p({1.0, 0.0}, SpdMatrix{{2.0, 0.0}, {0.0, 1.0}});
  EXPECT_NEAR(barycenter_variance(WeightedEnsemble::uniform({p, p, p}), p), 0.0, 1e-15);
  const auto ens = WeightedEnsemble::uniform({normal1(0, 1), normal1(2, 1)});
  EXPECT_NEAR(fixed_point_barycenter(ens).variance, 1.0, 1e-14);
}

TEST(GMap, FixedPointAndScalarExample) {
  Rng rng(10);
  const WeightedEnsemble ens = random_ensemble(5, 3, 100.0, 1.0, false, rng);
  const LocScatter bary = fixed_point_barycenter(ens).bary;
  EXPECT_LE(w2_distance_sq(g_map(ens, bary), bary), 1e-10);

  const auto pair = WeightedEnsemble::uniform({normal1(0, 1), normal1(0, 3)});
  EXPECT_NEAR(g_map(pair, normal1(0, 1)).cov()(0, 0), 4.0, 1e-14);
}

TEST(GMap, DescentOnRandomPairs) {
  Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = 1 + rng.uniform_index(5);
    const WeightedEnsemble ens = random_ensemble(2 + rng.uniform_index(8), d, 100.0, 1.0, false, rng);
    const LocScatter eta = random_loc_scatter(d, 100.0, 3.0, rng);
    const LocScatter next = g_map(ens, eta);
    const double v0 = frechet_objective(ens, eta), v1 = frechet_objective(ens, next);
    EXPECT_LT(v1, v0);
    EXPECT_LE(v1 + w2_distance_sq(eta, next), v0 * (1.0 + 1e-10));
  }
}

TEST(GMap, DescentAlongIteration) {
  Rng rng(12);
  const WeightedEnsemble ens = random_ensemble(10, 4, 1e3, 1.0, false, rng);
  LocScatter eta = random_loc_scatter(4, 1e3, 1.0, rng);
  const double v0 = frechet_objective(ens, eta);
  double prev = v0;
  for (int it = 0; it < 30; ++it) {
    eta = g_map(ens, eta);
    const double v = frechet_objective(ens, eta);
    EXPECT_LE(v, prev + 1e-12 * v0);
    prev = v;
  }
}

TEST(Baselines, ThreeScalesValues) {
  EXPECT_NEAR(std::sqrt(log_euclidean_mean(three_scales()).cov()(0, 0)), 0.737, 1e-3);
  EXPECT_NEAR(std::sqrt(log_euclidean_mean(three_scales()).cov()(0, 0)), std::cbrt(0.4), 1e-12);
  EXPECT_NEAR(linear_mean(three_scales()).cov()(0, 0), 1.68, 1e-14);
  EXPECT_NEAR(std::sqrt(linear_mean(three_scales()).cov()(0, 0)), 1.296, 1e-3);
}

TEST(Baselines, DiagonalExamples) {
  const auto a = LocScatter({0, 0}, SpdMatrix{{1, 0}, {0, 4}});
  const auto b = LocScatter({0, 0}, SpdMatrix{{4, 0}, {0, 1}});
  const LocScatter le = log_euclidean_mean(WeightedEnsemble::uniform({a, b}));
  EXPECT_NEAR(le.cov()(0, 0), 2.0, 1e-14);
  EXPECT_NEAR(le.cov()(1, 1), 2.0, 1e-14);
  EXPECT_NEAR(le.cov()(0, 1), 0.0, 1e-14);
  const auto c = LocScatter({0, 0}, SpdMatrix{{3, 0}, {0, 2}});
  const LocScatter lin = linear_mean(WeightedEnsemble::uniform({a, c}));
  EXPECT_DOUBLE_EQ(lin.cov()(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(lin.cov()(1, 1), 3.0);
  for (const auto& f : {log_euclidean_mean, linear_mean}) {
    const LocScatter same = f(WeightedEnsemble::uniform({a, a}));
    EXPECT_LE((same.cov().matrix() - a.cov().matrix()).frobenius_norm(), 1e-14);
  }
}

TEST(Baselines, JensenChainForCommutingCovariances) {
  Rng rng(13);
  for (int t = 0; t < 50; ++t) {
    Matrix q;
    const std::size_t d = 1 + rng.uniform_index(6);
    const WeightedEnsemble ens = random_commuting_ensemble(2 + rng.uniform_index(8), d, 1e3, 0.0, rng, &q);
    auto per_axis = [&](const LocScatter& p) {
      const Matrix dg = q.transpose() * p.cov().matrix() * q;
      Vector s(d);
      for (std::size_t i = 0; i < d; ++i) s[i] = std::sqrt(dg(i, i));
      return s;
    };
    const Vector le = per_axis(log_euclidean_mean(ens));
    const Vector bc = per_axis(fixed_point_barycenter(ens).bary);
    const Vector li = per_axis(linear_mean(ens));
    for (std::size_t i = 0; i < d; ++i) {
      EXPECT_LE(le[i], bc[i] + 1e-10);
      EXPECT_LE(bc[i], li[i] + 1e-10);
    }
  }
}

TEST(Baselines, SizeBound) {
  Rng rng(14);
  for (int t = 0; t < 50; ++t) {
    const WeightedEnsemble ens = random_ensemble(2 + rng.uniform_index(10), 1 + rng.uniform_index(6),
                                                 1e3, 0.0, false, rng);
    double bound = 0.0;
    for (const auto& it : ens.items()) bound += it.weight * std::sqrt(it.dist.cov().trace());
    EXPECT_LE(std::sqrt(fixed_point_barycenter(ens).bary.cov().trace()), bound + 1e-10);
  }
}

}  // namespace
