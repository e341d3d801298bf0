#include "kalman/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "kalman/error.hpp"

namespace kalman {

namespace {

void require_finite(const Matrix& m, const char* op) {
  if (!m.all_finite()) {
    throw NumericalError(std::string(op) + ": result contains non-finite entries");
  }
}

void require_square(const Matrix& a, const char* op) {
  if (!a.is_square()) {
    throw ShapeError(std::string(op) + ": expected a square matrix, got " + a.shape());
  }
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.shape() + " vs " + b.shape());
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("Matrix: " + std::to_string(data_.size()) + " entries do not fill " + shape());
  }
  if (!all_finite()) {
    throw DomainError("Matrix: non-finite entry in " + shape() + " literal");
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw ShapeError("Matrix: ragged row literal");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
  if (!all_finite()) {
    throw DomainError("Matrix: non-finite entry in " + shape() + " literal");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
  Matrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  require_finite(m, "Matrix::diagonal");
  return m;
}

Matrix Matrix::diagonal(std::initializer_list<double> values) {
  return diagonal(std::span<const double>(values.begin(), values.size()));
}

Matrix Matrix::column(std::span<const double> values) {
  return Matrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

Matrix Matrix::column(std::initializer_list<double> values) {
  return Matrix(values.size(), 1, std::vector<double>(values));
}

double Matrix::at(std::size_t r, std::size_t c) const {
  if (r >= rows_ || c >= cols_) {
    throw ShapeError("Matrix::at: index (" + std::to_string(r) + ", " + std::to_string(c) +
                     ") out of range for " + shape());
  }
  return (*this)(r, c);
}

Matrix Matrix::col(std::size_t c) const {
  if (c >= cols_) {
    throw ShapeError("Matrix::col: column " + std::to_string(c) + " out of range for " + shape());
  }
  Matrix out(rows_, 1);
  for (std::size_t r = 0; r < rows_; ++r) out(r, 0) = (*this)(r, c);
  return out;
}

std::vector<double> Matrix::diag() const {
  std::vector<double> d(std::min(rows_, cols_));
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = (*this)(i, i);
  return d;
}

std::string Matrix::shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix mat_mul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("mat_mul: cannot multiply " + a.shape() + " by " + b.shape());
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  require_finite(out, "mat_mul");
  return out;
}

Matrix mat_transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Matrix mat_inverse(const Matrix& a) {
  require_square(a, "mat_inverse");
  const std::size_t n = a.rows();
  Matrix work = a;
  Matrix inv = Matrix::identity(n);

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot_row = col;
    double best = std::abs(work(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(work(r, col)) > best) {
        best = std::abs(work(r, col));
        pivot_row = r;
      }
    }
    if (!(best >= kPivotTolerance)) {
      throw SingularMatrixError("mat_inverse: singular " + a.shape() + " matrix, pivot |" +
                                    std::to_string(best) + "| in column " + std::to_string(col),
                                col);
    }
    if (pivot_row != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(work(col, j), work(pivot_row, j));
        std::swap(inv(col, j), inv(pivot_row, j));
      }
    }

    const double scale = 1.0 / work(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      work(col, j) *= scale;
      inv(col, j) *= scale;
    }
    work(col, col) = 1.0;

    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double factor = work(r, col);
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        work(r, j) -= factor * work(col, j);
        inv(r, j) -= factor * inv(col, j);
      }
      work(r, col) = 0.0;
    }
  }
  require_finite(inv, "mat_inverse");
  return inv;
}

double mat_det(const Matrix& a) {
  require_square(a, "mat_det");
  const std::size_t n = a.rows();
  Matrix lu = a;
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot_row = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(lu(r, col)) > std::abs(lu(pivot_row, col))) pivot_row = r;
    }
    if (!(std::abs(lu(pivot_row, col)) >= kPivotTolerance)) return 0.0;
    if (pivot_row != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(col, j), lu(pivot_row, j));
      det = -det;
    }
    const double pivot = lu(col, col);
    det *= pivot;
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = lu(r, col) / pivot;
      for (std::size_t j = col + 1; j < n; ++j) lu(r, j) -= factor * lu(col, j);
    }
  }
  return det;
}

Matrix symmetrize(const Matrix& a) {
  require_square(a, "symmetrize");
  Matrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      const double m = 0.5 * (a(i, j) + a(j, i));
      out(i, j) = m;
      out(j, i) = m;
    }
  }
  return out;
}

bool is_symmetric(const Matrix& a, double tol) {
  if (!a.is_square()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      const double scale = std::max({1.0, std::abs(a(i, j)), std::abs(a(j, i))});
      if (std::abs(a(i, j) - a(j, i)) > tol * scale) return false;
    }
  }
  return true;
}

namespace {

// Factorizes the lower triangle. Returns the smallest pivot seen; stops early
// once a pivot is <= stop_below.
double cholesky_walk(const Matrix& a, Matrix* factor, double stop_below) {
  const std::size_t n = a.rows();
  Matrix l(n, n);
  double min_pivot = n == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    min_pivot = std::min(min_pivot, d);
    if (!(d > stop_below)) return std::isnan(d) ? -std::numeric_limits<double>::infinity() : min_pivot;
    if (d <= 0.0) continue;  // semidefinite direction: leave column j zero
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  if (factor != nullptr) *factor = std::move(l);
  return min_pivot;
}

}  // namespace

double min_cholesky_pivot(const Matrix& a) {
  require_square(a, "min_cholesky_pivot");
  return cholesky_walk(a, nullptr, -std::numeric_limits<double>::infinity());
}

bool is_spd(const Matrix& a, double tol) {
  if (!a.is_square() || a.rows() == 0 || !is_symmetric(a, 1e-9)) return false;
  return cholesky_walk(a, nullptr, tol) > tol;
}

Matrix cholesky(const Matrix& a) {
  require_square(a, "cholesky");
  if (!is_symmetric(a, 1e-9)) {
    throw DomainError("cholesky: matrix is not symmetric");
  }
  Matrix l;
  if (!(cholesky_walk(a, &l, 0.0) > 0.0)) {
    throw DomainError("cholesky: matrix " + a.shape() + " is not positive definite");
  }
  return l;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double trace(const Matrix& a) {
  require_square(a, "trace");
  double t = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "operator+");
  Matrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) += b(i, j);
  require_finite(out, "operator+");
  return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "operator-");
  Matrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) -= b(i, j);
  require_finite(out, "operator-");
  return out;
}

Matrix operator*(const Matrix& a, const Matrix& b) { return mat_mul(a, b); }

Matrix operator*(double s, const Matrix& a) {
  Matrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) *= s;
  require_finite(out, "operator*");
  return out;
}

}  // namespace kalman
