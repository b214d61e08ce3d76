#include "wcons/spd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wcons/error.hpp"

namespace wcons {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::DimensionMismatch, "matrix shapes differ");
}

constexpr int kMaxSweeps = 64;
constexpr double kOffDiagonalTolerance = 1e-13;

}  // namespace

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorCode::InvalidInput, "ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
  return s;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) noexcept {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "matrix product shapes");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw Error(ErrorCode::DimensionMismatch, "matrix-vector shapes");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "vector lengths differ");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "vector lengths differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// ------------------------------------------------------------- SymMatrix

SymMatrix::SymMatrix(const Matrix& m) : m_(m) {
  if (!m.is_square()) throw Error(ErrorCode::InvalidInput, "symmetric matrix must be square");
  const std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      m_(i, j) = v;
      m_(j, i) = v;
    }
  }
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  m_ += other.m_;
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) noexcept {
  m_ *= s;
  return *this;
}

SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  return SymMatrix(a.matrix() - b.matrix());
}
SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

SymMatrix sandwich(const SymMatrix& outer, const SymMatrix& inner) {
  return SymMatrix(outer.matrix() * inner.matrix() * outer.matrix());
}

SymMatrix conjugate(const Matrix& q, const SymMatrix& inner) {
  return SymMatrix(q * inner.matrix() * q.transpose());
}

// --------------------------------------------------------------- Jacobi

EigenDecomposition sym_eigen(const SymMatrix& m) {
  if (!m.matrix().all_finite()) throw Error(ErrorCode::InvalidInput, "non-finite matrix entry");

  const std::size_t n = m.dim();
  Matrix a = m.matrix();
  Matrix v = Matrix::identity(n);
  const double threshold = kOffDiagonalTolerance * m.frobenius_norm();

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= threshold) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigenDecomposition out{Vector(n), Matrix(n, n)};
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t src = order[c];
    out.values[c] = a(src, src);
    std::size_t lead = 0;
    for (std::size_t k = 1; k < n; ++k)
      if (std::abs(v(k, src)) > std::abs(v(lead, src)) + 1e-12) lead = k;
    const double sign = v(lead, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, c) = sign * v(k, src);
  }
  return out;
}

SymMatrix reconstruct(const Matrix& vectors, std::span<const double> values) {
  const std::size_t n = vectors.rows();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < values.size(); ++k) s += vectors(i, k) * values[k] * vectors(j, k);
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return SymMatrix(out);
}

double pd_floor(double largest_eigenvalue) noexcept {
  return 1e-10 * std::max(1.0, largest_eigenvalue);
}

// ------------------------------------------------------------- SpdMatrix

SpdMatrix::SpdMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : SpdMatrix(certify_spd(SymMatrix(Matrix(rows)))) {}

SpdMatrix SpdMatrix::identity(std::size_t n) {
  return SpdMatrix(SymMatrix::identity(n),
                   EigenDecomposition{Vector(n, 1.0), Matrix::identity(n)});
}

SpdMatrix certify_spd(const SymMatrix& m) {
  if (m.dim() == 0) throw Error(ErrorCode::InvalidInput, "empty matrix");
  EigenDecomposition eig = sym_eigen(m);
  const double lo = eig.values.back();
  if (!(lo > pd_floor(eig.values.front()))) throw NotPositiveDefiniteError(lo);
  return SpdMatrix(m, std::move(eig));
}

SpdMatrix spd_from_eigen(Matrix vectors, Vector values) {
  const std::size_t n = values.size();
  if (n == 0 || vectors.rows() != n || vectors.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "eigenbasis shape");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] > values[j]; });
  EigenDecomposition eig{Vector(n), Matrix(n, n)};
  for (std::size_t c = 0; c < n; ++c) {
    eig.values[c] = values[order[c]];
    for (std::size_t k = 0; k < n; ++k) eig.vectors(k, c) = vectors(k, order[c]);
  }
  if (!std::all_of(eig.values.begin(), eig.values.end(), [](double x) { return std::isfinite(x); }))
    throw Error(ErrorCode::InvalidInput, "non-finite eigenvalue");
  if (!(eig.values.back() > pd_floor(eig.values.front())))
    throw NotPositiveDefiniteError(eig.values.back());

  SymMatrix sym = reconstruct(eig.vectors, eig.values);
  return SpdMatrix(std::move(sym), std::move(eig));
}

SpdMatrix spd_power(const SpdMatrix& m, double p) {
  if (p == 1.0) return m;
  const auto& eig = m.eigen();
  Vector values(eig.values.size());
  std::transform(eig.values.begin(), eig.values.end(), values.begin(),
                 [p](double x) { return p == 0.5 ? std::sqrt(x) : std::pow(x, p); });
  return spd_from_eigen(eig.vectors, std::move(values));
}

SymMatrix spd_log(const SpdMatrix& m) {
  const auto& eig = m.eigen();
  Vector values(eig.values.size());
  std::transform(eig.values.begin(), eig.values.end(), values.begin(),
                 [](double x) { return std::log(x); });
  return reconstruct(eig.vectors, values);
}

SpdMatrix spd_exp(const SymMatrix& m) {
  EigenDecomposition eig = sym_eigen(m);
  for (double& x : eig.values) x = std::exp(x);
  return spd_from_eigen(std::move(eig.vectors), std::move(eig.values));
}

double log_determinant(const SpdMatrix& m) {
  double s = 0.0;
  for (double x : m.eigen().values) s += std::log(x);
  return s;
}

}  // namespace wcons
