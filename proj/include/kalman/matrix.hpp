#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace kalman {

/// Dense row-major real matrix with explicit dimensions. Vectors are n x 1
/// column matrices.
class Matrix {
 public:
  Matrix() = default;

  /// Zero-filled rows x cols matrix.
  Matrix(std::size_t rows, std::size_t cols);

  /// Takes ownership of row-major `data`. Throws ShapeError if the length is
  /// not rows * cols and DomainError on any non-finite entry.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  /// Row literal: Matrix{{1, 2}, {3, 4}}.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
  static Matrix diagonal(std::span<const double> values);
  static Matrix diagonal(std::initializer_list<double> values);
  static Matrix column(std::span<const double> values);
  static Matrix column(std::initializer_list<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool is_column() const noexcept { return cols_ == 1; }

  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }

  /// Bounds-checked access; throws ShapeError.
  double at(std::size_t r, std::size_t c) const;

  std::span<const double> data() const noexcept { return data_; }

  /// Column `c` as an n x 1 matrix.
  Matrix col(std::size_t c) const;
  std::vector<double> diag() const;

  /// "rows x cols", used in error messages.
  std::string shape() const;

  bool all_finite() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Standard product. ShapeError if a.cols != b.rows, NumericalError on a
/// non-finite result.
Matrix mat_mul(const Matrix& a, const Matrix& b);
Matrix mat_transpose(const Matrix& a);

/// Gauss-Jordan elimination with partial pivoting. Throws
/// SingularMatrixError when the selected pivot magnitude is below
/// kPivotTolerance.
Matrix mat_inverse(const Matrix& a);

/// Determinant from the pivoted LU factors; 0.0 when a pivot falls below
/// kPivotTolerance.
double mat_det(const Matrix& a);

/// (a + a^T) / 2
Matrix symmetrize(const Matrix& a);

/// Max-abs asymmetry check, scaled by max(1, |a_ij|).
bool is_symmetric(const Matrix& a, double tol = 1e-9);

/// Smallest pivot of a Cholesky-style factorization of a symmetric matrix.
/// Pivots at or below zero zero their column so semidefinite inputs are
/// walked to the end instead of dividing by zero.
double min_cholesky_pivot(const Matrix& a);

/// True iff `a` is square, symmetric within 1e-9 and every Cholesky pivot
/// exceeds `tol`. A negative `tol` turns this into a semidefinite check.
bool is_spd(const Matrix& a, double tol);

/// Lower-triangular L with L * L^T == a. Requires every pivot > 0, otherwise
/// DomainError.
Matrix cholesky(const Matrix& a);

double max_abs(const Matrix& a);
double trace(const Matrix& a);

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

inline constexpr double kPivotTolerance = 1e-12;

}  // namespace kalman
