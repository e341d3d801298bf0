#include "kalman/gaussian.hpp"

#include <cmath>
#include <numbers>

#include "kalman/error.hpp"

namespace kalman {

namespace {

/// cov^-1 and the normalizing term shared by every evaluation against one
/// covariance. All three evaluation entry points go through this so their
/// results agree bit for bit.
struct Precision {
  Matrix inv;
  double log_norm = 0.0;  // 0.5 k log(2 pi) + 0.5 log det cov
};

Precision precision_of(const Matrix& cov, const char* op) {
  if (!cov.is_square()) {
    throw ShapeError(std::string(op) + ": covariance must be square, got " + cov.shape());
  }
  if (!is_symmetric(cov, 1e-9) || !is_spd(cov, 1e-12)) {
    throw DomainError(std::string(op) + ": covariance " + cov.shape() +
                      " is not symmetric positive definite");
  }
  const double det = mat_det(cov);
  if (!(det > 0.0)) {
    throw DomainError(std::string(op) + ": covariance determinant is not positive");
  }
  const double k = static_cast<double>(cov.rows());
  return {mat_inverse(cov), 0.5 * k * std::log(2.0 * std::numbers::pi) + 0.5 * std::log(det)};
}

// d = lhs[:, lhs_col] - rhs[:, rhs_col]
LikelihoodResult evaluate(const Matrix& lhs, std::size_t lhs_col, const Matrix& rhs,
                          std::size_t rhs_col, const Precision& prec) {
  const std::size_t d = prec.inv.rows();
  std::vector<double> diff(d);
  for (std::size_t i = 0; i < d; ++i) diff[i] = lhs(i, lhs_col) - rhs(i, rhs_col);
  double quad = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < d; ++j) row += prec.inv(i, j) * diff[j];
    quad += diff[i] * row;
  }
  const double e = 0.5 * quad + prec.log_norm;
  if (!std::isfinite(e)) {
    throw NumericalError("gauss_pdf: non-finite negative log density");
  }
  return {std::exp(-e), e};
}

void require_rows(const Matrix& m, std::size_t d, const char* op, const char* what) {
  if (m.rows() != d) {
    throw ShapeError(std::string(op) + ": " + what + " has shape " + m.shape() +
                     ", expected " + std::to_string(d) + " rows");
  }
}

}  // namespace

LikelihoodResult gauss_pdf(const Matrix& x, const GaussianParams& params) {
  if (!x.is_column() || !params.mean.is_column()) {
    throw ShapeError("gauss_pdf: x " + x.shape() + " and mean " + params.mean.shape() +
                     " must be columns");
  }
  require_rows(x, params.mean.rows(), "gauss_pdf", "x");
  require_rows(params.cov, params.mean.rows(), "gauss_pdf", "cov");
  const Precision prec = precision_of(params.cov, "gauss_pdf");
  return evaluate(x, 0, params.mean, 0, prec);
}

std::vector<LikelihoodResult> gauss_pdf_batch(const Matrix& points, const Matrix& mean,
                                              const Matrix& cov) {
  if (!mean.is_column()) {
    throw ShapeError("gauss_pdf_batch: mean must be a column, got " + mean.shape());
  }
  require_rows(points, mean.rows(), "gauss_pdf_batch", "points");
  require_rows(cov, mean.rows(), "gauss_pdf_batch", "cov");
  const Precision prec = precision_of(cov, "gauss_pdf_batch");

  const auto n = static_cast<std::ptrdiff_t>(points.cols());
  std::vector<LikelihoodResult> out(points.cols());
  bool failed = false;
#pragma omp parallel for schedule(static) if (n > 4096) reduction(|| : failed)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = evaluate(points, i, mean, 0, prec);
    } catch (const NumericalError&) {
      failed = true;
    }
  }
  if (failed) throw NumericalError("gauss_pdf_batch: non-finite negative log density");
  return out;
}

std::vector<LikelihoodResult> serial::gauss_pdf_batch(const Matrix& points, const Matrix& mean,
                                                      const Matrix& cov) {
  if (!mean.is_column()) {
    throw ShapeError("gauss_pdf_batch: mean must be a column, got " + mean.shape());
  }
  require_rows(points, mean.rows(), "gauss_pdf_batch", "points");
  require_rows(cov, mean.rows(), "gauss_pdf_batch", "cov");
  const Precision prec = precision_of(cov, "gauss_pdf_batch");
  std::vector<LikelihoodResult> out;
  out.reserve(points.cols());
  for (std::size_t i = 0; i < points.cols(); ++i) out.push_back(evaluate(points, i, mean, 0, prec));
  return out;
}

std::vector<LikelihoodResult> gauss_pdf_many_means(const Matrix& x, const Matrix& means,
                                                   const Matrix& cov) {
  if (!x.is_column()) {
    throw ShapeError("gauss_pdf_many_means: x must be a column, got " + x.shape());
  }
  require_rows(means, x.rows(), "gauss_pdf_many_means", "means");
  require_rows(cov, x.rows(), "gauss_pdf_many_means", "cov");
  const Precision prec = precision_of(cov, "gauss_pdf_many_means");
  std::vector<LikelihoodResult> out;
  out.reserve(means.cols());
  for (std::size_t i = 0; i < means.cols(); ++i) out.push_back(evaluate(x, 0, means, i, prec));
  return out;
}

double SeededRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

Matrix sample_gaussian(SeededRng& rng, const GaussianParams& params) {
  if (!params.mean.is_column() || params.cov.rows() != params.mean.rows()) {
    throw ShapeError("sample_gaussian: mean " + params.mean.shape() + " and cov " +
                     params.cov.shape() + " disagree");
  }
  const Matrix l = cholesky(params.cov);
  const std::size_t d = params.mean.rows();
  Matrix z(d, 1);
  for (std::size_t i = 0; i < d; ++i) z(i, 0) = rng.normal();
  return params.mean + l * z;
}

}  // namespace kalman
