#include "kalman/filter.hpp"

#include "kalman/error.hpp"

namespace kalman {

namespace {

constexpr double kSymmetryTol = 1e-9;
constexpr double kStatePsdTol = -1e-9;
constexpr double kProcessPsdTol = -1e-12;

void require_shape(const Matrix& m, std::size_t rows, std::size_t cols, const char* op,
                   const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ShapeError(std::string(op) + ": " + name + " has shape " + m.shape() + ", expected " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
}

}  // namespace

void validate(const StateSpaceModel& model) {
  const std::size_t n = model.state_dim();
  const std::size_t m = model.measurement_dim();
  if (n == 0 || m == 0) throw ShapeError("model: empty A or H");
  require_shape(model.A, n, n, "model", "A");
  require_shape(model.B, n, model.control_dim(), "model", "B");
  require_shape(model.H, m, n, "model", "H");
  require_shape(model.Q, n, n, "model", "Q");
  require_shape(model.R, m, m, "model", "R");
  if (!is_symmetric(model.Q, kSymmetryTol) || !(min_cholesky_pivot(model.Q) >= kProcessPsdTol)) {
    throw DomainError("model: Q must be symmetric positive semidefinite");
  }
  if (!is_spd(model.R, 1e-12)) {
    throw DomainError("model: R must be symmetric positive definite");
  }
}

void validate(const GaussianState& state, std::size_t expected_dim) {
  require_shape(state.mean, expected_dim, 1, "state", "mean");
  require_shape(state.cov, expected_dim, expected_dim, "state", "cov");
  if (!is_symmetric(state.cov, kSymmetryTol)) {
    throw DomainError("state: covariance is not symmetric");
  }
  if (!(min_cholesky_pivot(symmetrize(state.cov)) >= kStatePsdTol)) {
    throw DomainError("state: covariance is not positive semidefinite");
  }
}

GaussianState predict(const GaussianState& state, const StateSpaceModel& model,
                      const ControlInput& control) {
  validate(model);
  validate(state, model.state_dim());
  require_shape(control.u, model.control_dim(), 1, "predict", "u");

  GaussianState out;
  out.mean = model.A * state.mean + model.B * control.u;
  out.cov = symmetrize(model.A * state.cov * mat_transpose(model.A) + model.Q);
  if (!(min_cholesky_pivot(out.cov) >= kStatePsdTol)) {
    throw NumericalError("predict: predicted covariance lost positive semidefiniteness");
  }
  return out;
}

std::pair<GaussianState, UpdateDiagnostics> update(const GaussianState& predicted,
                                                   const Matrix& y,
                                                   const StateSpaceModel& model) {
  validate(model);
  validate(predicted, model.state_dim());
  require_shape(y, model.measurement_dim(), 1, "update", "y");

  const Matrix& P = predicted.cov;
  const Matrix Ht = mat_transpose(model.H);

  UpdateDiagnostics diag;
  diag.predicted_measurement = model.H * predicted.mean;
  diag.innovation = y - diag.predicted_measurement;
  diag.innovation_cov = symmetrize(model.H * P * Ht + model.R);
  diag.gain = P * Ht * mat_inverse(diag.innovation_cov);

  GaussianState post;
  post.mean = predicted.mean + diag.gain * diag.innovation;
  post.cov = symmetrize(P - diag.gain * diag.innovation_cov * mat_transpose(diag.gain));
  if (!(min_cholesky_pivot(post.cov) >= kStatePsdTol)) {
    throw NumericalError("update: posterior covariance lost positive semidefiniteness");
  }

  diag.likelihood = gauss_pdf(y, {diag.predicted_measurement, diag.innovation_cov});
  return {std::move(post), std::move(diag)};
}

std::pair<GaussianState, UpdateDiagnostics> step(const GaussianState& state,
                                                 const ControlInput& control, const Matrix& y,
                                                 const StateSpaceModel& model) {
  return update(predict(state, model, control), y, model);
}

}  // namespace kalman
