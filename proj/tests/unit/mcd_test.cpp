#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wcons/mcd.hpp"
#include "wcons/simulation.hpp"

namespace {

using namespace wcons;

Matrix gaussian_cloud(std::size_t n, Rng& rng, double contamination = 0.0) {
  return sample_mixture(LocScatter::standard(2), LocScatter({4.0, 4.0}, SpdMatrix::identity(2)),
                        contamination, n, rng);
}

TEST(SubsetMoments, UsesSubsetSizeDivisor) {
  const Matrix pts{{0, 0}, {2, 0}, {0, 2}, {2, 2}, {100, 100}};
  const std::vector<std::size_t> rows{0, 1, 2, 3};
  const LocScatter m = subset_moments(pts, rows);
  EXPECT_DOUBLE_EQ(m.mean()[0], 1.0);
  EXPECT_DOUBLE_EQ(m.mean()[1], 1.0);
  EXPECT_DOUBLE_EQ(m.cov()(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(m.cov()(0, 1), 0.0);
}

TEST(Mcd, FullSubsetIsSampleMoments) {
  Rng rng(1);
  const Matrix pts = gaussian_cloud(60, rng);
  McdOptions opts;
  opts.h = 60;
  const McdResult r = estimate_mcd(pts, opts, rng);
  std::vector<std::size_t> all(60);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const LocScatter ref = subset_moments(pts, all);
  EXPECT_EQ(r.estimate.mean(), ref.mean());
  EXPECT_EQ(r.estimate.cov().matrix(), ref.cov().matrix());

  oracle::Mat x(60, 2);
  for (int i = 0; i < 60; ++i) x(i, 0) = pts(i, 0), x(i, 1) = pts(i, 1);
  const oracle::Mat c = x.rowwise() - x.colwise().mean();
  const oracle::Mat cov = (c.transpose() * c) / 60.0;
  EXPECT_LE((oracle::to_eigen(r.estimate.cov()) - cov).norm(), 1e-12);
}

TEST(Mcd, CleanSample) {
  Rng rng(2);
  const Matrix pts = gaussian_cloud(1000, rng);
  McdOptions opts;
  opts.h = 800;
  const McdResult r = estimate_mcd(pts, opts, rng);
  EXPECT_LE(std::hypot(r.estimate.mean()[0], r.estimate.mean()[1]), 0.15);
  // raw subset covariance is a shrunken multiple of the identity
  const double c = r.estimate.cov().trace() / 2.0;
  const Matrix dev = r.estimate.cov().matrix() - Matrix::identity(2) * c;
  EXPECT_LE(dev.frobenius_norm(), 0.25);
  EXPECT_LT(c, 1.0);
}

TEST(Mcd, RobustToTenPercentCluster) {
  Rng rng(3);
  const Matrix pts = gaussian_cloud(1000, rng, 0.1);
  McdOptions opts;
  opts.h = 800;
  const McdResult r = estimate_mcd(pts, opts, rng);
  EXPECT_LE(std::hypot(r.estimate.mean()[0], r.estimate.mean()[1]), 0.15);
  const double c = r.estimate.cov().trace() / 2.0;
  EXPECT_LE((r.estimate.cov().matrix() - Matrix::identity(2) * c).frobenius_norm(), 0.25);
}

TEST(Mcd, ConsistencyFactor) {
  EXPECT_EQ(mcd_consistency_factor(2, 1.0), 1.0);
  // d = 2: q = -2 ln(1 - a), F_4(q) = 1 - (1 + q/2) e^{-q/2}
  const double a = 0.8, q = -2.0 * std::log(1.0 - a);
  const double f4 = 1.0 - (1.0 + q / 2.0) * std::exp(-q / 2.0);
  EXPECT_NEAR(mcd_consistency_factor(2, a), a / f4, 1e-12);

  Rng rng(4);
  const Matrix pts = gaussian_cloud(4000, rng);
  McdOptions opts;
  opts.h = 3200;
  opts.consistency_correction = true;
  const McdResult r = estimate_mcd(pts, opts, rng);
  EXPECT_NEAR(r.estimate.cov()(0, 0), 1.0, 0.12);
  EXPECT_NEAR(r.estimate.cov()(1, 1), 1.0, 0.12);
}

TEST(Mcd, CStepObjectiveNonincreasing) {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const Matrix pts = gaussian_cloud(200, rng, 0.2);
    const auto start = rng.sample_without_replacement(200, 3);
    const std::vector<double> path = c_step_path(pts, 160, subset_moments(pts, start));
    ASSERT_FALSE(path.empty());
    for (std::size_t i = 1; i < path.size(); ++i) EXPECT_LE(path[i], path[i - 1] + 1e-12);
  }
}

TEST(Mcd, SingularDataFails) {
  Matrix pts(30, 2);
  for (std::size_t i = 0; i < 30; ++i) pts(i, 0) = pts(i, 1) = static_cast<double>(i);
  McdOptions opts;
  opts.h = 20;
  opts.restarts = 3;
  Rng rng(6);
  try {
    estimate_mcd(pts, opts, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularSubset);
  }
}

TEST(Mcd, RejectsBadSubsetSize) {
  Rng rng(7);
  const Matrix pts = gaussian_cloud(10, rng);
  McdOptions opts;
  opts.h = 2;
  EXPECT_THROW(estimate_mcd(pts, opts, rng), Error);
  opts.h = 11;
  EXPECT_THROW(estimate_mcd(pts, opts, rng), Error);
}

}  // namespace
