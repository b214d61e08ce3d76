#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wcons/error.hpp"
#include "wcons/rng.hpp"
#include "wcons/simulation.hpp"
#include "wcons/spd.hpp"

namespace {

using namespace wcons;

double rel_err(const Matrix& a, const Matrix& b) {
  return (a - b).frobenius_norm() / std::max(1e-300, b.frobenius_norm());
}

TEST(SymEigen, DiagonalInputKeepsIdentityBasis) {
  const auto eig = sym_eigen(SymMatrix{{3.0, 0.0}, {0.0, 1.0}});
  EXPECT_DOUBLE_EQ(eig.values[0], 3.0);
  EXPECT_DOUBLE_EQ(eig.values[1], 1.0);
  EXPECT_EQ(eig.vectors, Matrix::identity(2));
}

TEST(SymEigen, TwoByTwoCharacteristicRoots) {
  const auto eig = sym_eigen(SymMatrix{{2.0, 1.0}, {1.0, 2.0}});
  EXPECT_NEAR(eig.values[0], 3.0, 1e-14);
  EXPECT_NEAR(eig.values[1], 1.0, 1e-14);
  const double h = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(eig.vectors(0, 0), h, 1e-14);
  EXPECT_NEAR(eig.vectors(1, 0), h, 1e-14);
  EXPECT_NEAR(std::abs(eig.vectors(0, 1)), h, 1e-14);
  EXPECT_NEAR(eig.vectors(0, 1), -eig.vectors(1, 1), 1e-14);
}

TEST(SymEigen, IdentityReconstructs) {
  const auto eig = sym_eigen(SymMatrix::identity(3));
  for (double v : eig.values) EXPECT_DOUBLE_EQ(v, 1.0);
  EXPECT_LE(rel_err(reconstruct(eig.vectors, eig.values).matrix(), Matrix::identity(3)), 1e-12);
}

TEST(SymEigen, TiesKeepPivotOrder) {
  const auto eig = sym_eigen(SymMatrix::diagonal(std::vector<double>{1.0, 2.0, 2.0}));
  EXPECT_DOUBLE_EQ(eig.values[0], 2.0);
  EXPECT_DOUBLE_EQ(eig.vectors(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(eig.vectors(2, 1), 1.0);
  EXPECT_DOUBLE_EQ(eig.vectors(0, 2), 1.0);
}

TEST(SymEigen, RejectsNonFinite) {
  SymMatrix m{{1.0, NAN}, {NAN, 1.0}};
  try {
    sym_eigen(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
  }
}

TEST(SymEigen, MatchesEigenOnRandomMatrices) {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = 1 + rng.uniform_index(10);
    Matrix a(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) a(i, j) = rng.normal();
    const SymMatrix m(a);
    const auto eig = sym_eigen(m);
    Eigen::SelfAdjointEigenSolver<oracle::Mat> ref(oracle::to_eigen(m.matrix()));
    for (std::size_t i = 0; i < d; ++i)
      EXPECT_NEAR(eig.values[i], ref.eigenvalues()(static_cast<Eigen::Index>(d - 1 - i)),
                  1e-12 * m.frobenius_norm());
    const Matrix v = eig.vectors;
    EXPECT_LE((v.transpose() * v - Matrix::identity(d)).frobenius_norm(), 1e-12);
    EXPECT_LE((reconstruct(v, eig.values).matrix() - m.matrix()).frobenius_norm(),
              1e-12 * m.frobenius_norm());
  }
}

TEST(SpdPower, Examples) {
  EXPECT_EQ(spd_sqrt(SpdMatrix::identity(3)).matrix(), Matrix::identity(3));
  const SpdMatrix r = spd_sqrt(SpdMatrix{{4.0, 0.0}, {0.0, 9.0}});
  EXPECT_NEAR(r(0, 0), 2.0, 1e-15);
  EXPECT_NEAR(r(1, 1), 3.0, 1e-15);
  EXPECT_EQ(r(0, 1), 0.0);

  const SpdMatrix s = spd_sqrt(SpdMatrix{{2.0, 1.0}, {1.0, 2.0}});
  const double a = (std::sqrt(3.0) + 1.0) / 2.0, b = (std::sqrt(3.0) - 1.0) / 2.0;
  EXPECT_NEAR(s(0, 0), a, 1e-14);
  EXPECT_NEAR(s(0, 1), b, 1e-14);
  EXPECT_NEAR(s(1, 1), a, 1e-14);
  EXPECT_LE(rel_err(s.matrix() * s.matrix(), Matrix{{2.0, 1.0}, {1.0, 2.0}}), 1e-14);
}

TEST(SpdPower, RandomSquareAndInverse) {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = 1 + rng.uniform_index(10);
    const SpdMatrix m = random_spd(d, 1e4, rng);
    const SpdMatrix r = spd_sqrt(m);
    const SpdMatrix ri = spd_inv_sqrt(m);
    EXPECT_LE(rel_err(r.matrix() * r.matrix(), m.matrix()), 1e-10);
    EXPECT_LE((r.matrix() * ri.matrix() - Matrix::identity(d)).frobenius_norm(), 1e-10 * std::sqrt(1e4));
    const oracle::Mat inv = oracle::to_eigen(r.matrix()).inverse();
    EXPECT_LE((oracle::to_eigen(ri.matrix()) - inv).norm(), 1e-10 * inv.norm());
  }
}

TEST(SpdPower, CommutesWithConjugation) {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = 2 + rng.uniform_index(8);
    const SpdMatrix m = random_spd(d, 100.0, rng);
    const Matrix q = random_orthogonal(d, rng);
    const SpdMatrix qm = certify_spd(conjugate(q, m.sym()));
    for (double p : {0.5, -0.5}) {
      const Matrix lhs = spd_power(qm, p).matrix();
      const Matrix rhs = conjugate(q, spd_power(m, p).sym()).matrix();
      EXPECT_LE((lhs - rhs).frobenius_norm(), 1e-10 * std::max(1.0, rhs.frobenius_norm()));
    }
  }
}

TEST(SpdPower, DiagonalStaysDiagonal) {
  const SpdMatrix m = certify_spd(SymMatrix::diagonal(std::vector<double>{5.0, 0.3, 7.0, 2.0}));
  for (double p : {0.5, -0.5}) {
    const SpdMatrix r = spd_power(m, p);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        if (i != j) EXPECT_LE(std::abs(r(i, j)), 1e-12 * m.frobenius_norm());
  }
}

TEST(SpdLogExp, Examples) {
  const SymMatrix l = spd_log(SpdMatrix::identity(3));
  EXPECT_LE(l.frobenius_norm(), 1e-15);
  const SymMatrix l2 = spd_log(SpdMatrix{{std::exp(1.0), 0.0}, {0.0, std::exp(2.0)}});
  EXPECT_NEAR(l2(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(l2(1, 1), 2.0, 1e-14);
  const SpdMatrix back = spd_exp(spd_log(SpdMatrix{{0.04, 0.0}, {0.0, 4.0}}));
  EXPECT_NEAR(back(0, 0), 0.04, 1e-15);
  EXPECT_NEAR(back(1, 1), 4.0, 1e-14);
}

TEST(SpdLogExp, RoundTripOnRandomMatrices) {
  Rng rng(7);
  for (int t = 0; t < 100; ++t) {
    const SpdMatrix m = random_spd(1 + rng.uniform_index(10), 1e3, rng);
    EXPECT_LE(rel_err(spd_exp(spd_log(m)).matrix(), m.matrix()), 1e-10);
  }
}

TEST(CertifySpd, Examples) {
  EXPECT_DOUBLE_EQ(certify_spd(SymMatrix::identity(2)).min_eigenvalue(), 1.0);
  try {
    certify_spd(SymMatrix{{1.0, 0.0}, {0.0, 0.0}});
    FAIL();
  } catch (const NotPositiveDefiniteError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPositiveDefinite);
    EXPECT_EQ(e.eigenvalue(), 0.0);
  }
  const SpdMatrix m = certify_spd(SymMatrix{{1.0, 0.999}, {0.999, 1.0}});
  EXPECT_NEAR(m.min_eigenvalue(), 0.001, 1e-14);
  EXPECT_NEAR(m.max_eigenvalue(), 1.999, 1e-14);
}

TEST(SymMatrix, SymmetrizesOnConstruction) {
  const SymMatrix s(Matrix{{1.0, 2.0}, {4.0, 1.0}});
  EXPECT_EQ(s(0, 1), 3.0);
  EXPECT_EQ(s(1, 0), 3.0);
}

TEST(SpdMatrix, PdFloorIsScaleRelative) {
  EXPECT_DOUBLE_EQ(pd_floor(0.5), 1e-10);
  EXPECT_DOUBLE_EQ(pd_floor(1e6), 1e-4);
  EXPECT_THROW(certify_spd(SymMatrix::diagonal(std::vector<double>{1e6, 1e-5})),
               NotPositiveDefiniteError);
}

TEST(LogDeterminant, MatchesEigen) {
  Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    const SpdMatrix m = random_spd(1 + rng.uniform_index(6), 50.0, rng);
    EXPECT_NEAR(log_determinant(m), std::log(oracle::to_eigen(m.matrix()).determinant()), 1e-10);
  }
}

}  // namespace
