#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "kalman/matrix.hpp"

namespace kalman {

/// Mean (d x 1) and covariance (d x d) of a multivariate normal.
struct GaussianParams {
  Matrix mean;
  Matrix cov;
};

/// Density and its negative log. The log value is authoritative: density
/// may underflow to zero while neg_log_density stays finite.
struct LikelihoodResult {
  double density = 0.0;
  double neg_log_density = 0.0;

  friend bool operator==(const LikelihoodResult&, const LikelihoodResult&) = default;
};

/// Density of column `x` under N(mean, cov):
///   E = 0.5 * d^T cov^-1 d + 0.5 * k * log(2 pi) + 0.5 * log det cov,  d = x - mean
///   density = exp(-E)
/// Throws ShapeError on dimension mismatch and DomainError unless cov is
/// symmetric within 1e-9 and SPD at pivot tolerance 1e-12.
LikelihoodResult gauss_pdf(const Matrix& x, const GaussianParams& params);

/// Each column of `points` (d x N) against one Gaussian.
std::vector<LikelihoodResult> gauss_pdf_batch(const Matrix& points, const Matrix& mean,
                                              const Matrix& cov);

/// One point against each column of `means` (d x N), shared covariance.
std::vector<LikelihoodResult> gauss_pdf_many_means(const Matrix& x, const Matrix& means,
                                                   const Matrix& cov);

namespace serial {

/// Single-threaded reference for gauss_pdf_batch.
std::vector<LikelihoodResult> gauss_pdf_batch(const Matrix& points, const Matrix& mean,
                                              const Matrix& cov);

}  // namespace serial

/// Seeded source of standard normal deviates.
///
/// Contract, fixed so that every seeded run is reproducible bit for bit:
///  - engine: std::mt19937_64 seeded with the 64-bit seed (its output
///    sequence is pinned by the C++ standard);
///  - uniform: u = (engine() >> 11) * 2^-53, in [0, 1);
///  - normal: Box-Muller on a pair (u1, u2) with r = sqrt(-2 log(1 - u1)),
///    yielding r cos(2 pi u2) first and r sin(2 pi u2) on the next call.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// mean + L z with L the Cholesky factor of cov and z iid N(0, 1) from `rng`.
/// Any covariance with strictly positive Cholesky pivots is accepted.
Matrix sample_gaussian(SeededRng& rng, const GaussianParams& params);

}  // namespace kalman
