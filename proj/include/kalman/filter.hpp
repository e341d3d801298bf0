#pragma once

#include <utility>

#include "kalman/gaussian.hpp"
#include "kalman/matrix.hpp"

namespace kalman {

/// Linear-Gaussian state-space model
///   x_k = A x_{k-1} + B u_k + w,   w ~ N(0, Q)
///   y_k = H x_k + v,               v ~ N(0, R)
/// with n states, l control inputs and m measurements. The matrices are
/// taken per call, so callers may vary them between steps.
struct StateSpaceModel {
  Matrix A;  // n x n
  Matrix B;  // n x l
  Matrix H;  // m x n
  Matrix Q;  // n x n, symmetric PSD
  Matrix R;  // m x m, SPD

  std::size_t state_dim() const noexcept { return A.rows(); }
  std::size_t control_dim() const noexcept { return B.cols(); }
  std::size_t measurement_dim() const noexcept { return H.rows(); }
};

/// Mean and covariance of a state estimate, prior or posterior.
struct GaussianState {
  Matrix mean;  // n x 1
  Matrix cov;   // n x n
};

struct ControlInput {
  Matrix u;  // l x 1
};

/// Per-update byproducts. `likelihood` is the density of the measurement
/// under N(predicted_measurement, innovation_cov).
struct UpdateDiagnostics {
  Matrix innovation;             // V = y - H x-
  Matrix innovation_cov;         // S = H P- H^T + R
  Matrix gain;                   // K = P- H^T S^-1
  Matrix predicted_measurement;  // H x-
  LikelihoodResult likelihood;
};

/// Checks dimensions, Q symmetric PSD (pivots >= -1e-12) and R SPD.
/// Throws ShapeError or DomainError.
void validate(const StateSpaceModel& model);

/// Checks the covariance is symmetric within 1e-9 and PSD (min Cholesky
/// pivot >= -1e-9 after symmetrization).
void validate(const GaussianState& state, std::size_t expected_dim);

/// x- = A x + B u,  P- = sym(A P A^T + Q)
GaussianState predict(const GaussianState& state, const StateSpaceModel& model,
                      const ControlInput& control);

/// Measurement update of a predicted state:
///   IM = H x-,  V = y - IM,  S = sym(H P- H^T + R),  K = P- H^T S^-1
///   x = x- + K V,  P = sym(P- - K S K^T)
/// Throws SingularMatrixError when S cannot be inverted.
std::pair<GaussianState, UpdateDiagnostics> update(const GaussianState& predicted,
                                                   const Matrix& y,
                                                   const StateSpaceModel& model);

/// update(predict(state, model, control), y, model)
std::pair<GaussianState, UpdateDiagnostics> step(const GaussianState& state,
                                                 const ControlInput& control, const Matrix& y,
                                                 const StateSpaceModel& model);

}  // namespace kalman
