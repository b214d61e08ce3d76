#pragma once

// Dense symmetric / SPD linear algebra for small dimensions.
//
// Everything here is a value type; eigendecompositions use cyclic Jacobi
// rotations and every matrix function (powers, log, exp) is evaluated by
// transforming eigenvalues and reconstructing, so results are symmetric by
// construction.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace wcons {

using Vector = std::vector<double>;

/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transpose() const;
  double trace() const;
  double frobenius_norm() const;
  bool all_finite() const noexcept;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s) noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Square matrix with exactly symmetric entries; construction averages the
/// input with its transpose.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);
  SymMatrix(std::initializer_list<std::initializer_list<double>> rows)
      : SymMatrix(Matrix(rows)) {}

  static SymMatrix identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }
  static SymMatrix diagonal(std::span<const double> diag) {
    return SymMatrix(Matrix::diagonal(diag));
  }
  static SymMatrix zero(std::size_t n) { return SymMatrix(Matrix(n, n)); }

  std::size_t dim() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
  const Matrix& matrix() const noexcept { return m_; }

  double trace() const { return m_.trace(); }
  double frobenius_norm() const { return m_.frobenius_norm(); }

  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator*=(double s) noexcept;

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  Matrix m_;
};

SymMatrix operator+(SymMatrix a, const SymMatrix& b);
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator*(SymMatrix a, double s);
SymMatrix operator*(double s, SymMatrix a);

/// outer * inner * outer for symmetric outer; symmetric by construction.
SymMatrix sandwich(const SymMatrix& outer, const SymMatrix& inner);

/// Orthogonal similarity Q * inner * Q^t.
SymMatrix conjugate(const Matrix& q, const SymMatrix& inner);

struct EigenDecomposition {
  Vector values;   // descending
  Matrix vectors;  // columns are orthonormal eigenvectors
};

/// Cyclic Jacobi eigendecomposition. Eigenvalues are sorted descending
/// (stable in the original pivot order); each eigenvector is signed so its
/// largest-magnitude component is positive. Throws InvalidInput on
/// non-finite entries.
EigenDecomposition sym_eigen(const SymMatrix& m);

/// Rebuild V * diag(values) * V^t.
SymMatrix reconstruct(const Matrix& vectors, std::span<const double> values);

/// Scale-relative singularity threshold: 1e-10 * max(1, largest eigenvalue).
double pd_floor(double largest_eigenvalue) noexcept;

/// Symmetric matrix whose positive definiteness has been certified. Keeps the
/// eigendecomposition computed during certification so fractional powers do
/// not need a second solve.
class SpdMatrix {
 public:
  SpdMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static SpdMatrix identity(std::size_t n);

  std::size_t dim() const noexcept { return sym_.dim(); }
  const SymMatrix& sym() const noexcept { return sym_; }
  const Matrix& matrix() const noexcept { return sym_.matrix(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return sym_(i, j); }

  double min_eigenvalue() const noexcept { return eig_.values.back(); }
  double max_eigenvalue() const noexcept { return eig_.values.front(); }
  const EigenDecomposition& eigen() const noexcept { return eig_; }

  double trace() const { return sym_.trace(); }
  double frobenius_norm() const { return sym_.frobenius_norm(); }

  friend SpdMatrix certify_spd(const SymMatrix& m);
  friend SpdMatrix spd_from_eigen(Matrix vectors, Vector values);

 private:
  SpdMatrix(SymMatrix sym, EigenDecomposition eig) : sym_(std::move(sym)), eig_(std::move(eig)) {}

  SymMatrix sym_;
  EigenDecomposition eig_;
};

/// Succeeds iff the minimum eigenvalue exceeds pd_floor; otherwise throws
/// NotPositiveDefiniteError carrying the offending eigenvalue.
SpdMatrix certify_spd(const SymMatrix& m);
inline SpdMatrix certify_spd(const Matrix& m) { return certify_spd(SymMatrix(m)); }

/// Build from a known orthonormal eigenbasis and eigenvalues (any order);
/// still certifies against pd_floor.
SpdMatrix spd_from_eigen(Matrix vectors, Vector values);

SpdMatrix spd_power(const SpdMatrix& m, double p);
inline SpdMatrix spd_sqrt(const SpdMatrix& m) { return spd_power(m, 0.5); }
inline SpdMatrix spd_inv_sqrt(const SpdMatrix& m) { return spd_power(m, -0.5); }

SymMatrix spd_log(const SpdMatrix& m);
SpdMatrix spd_exp(const SymMatrix& m);

/// Sum of log-eigenvalues.
double log_determinant(const SpdMatrix& m);

}  // namespace wcons
