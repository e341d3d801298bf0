#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "kalman/filter.hpp"
#include "kalman/gaussian.hpp"
#include "kalman/localize.hpp"

namespace kalman {

enum class MeasurementMode { direct_position, toa_trilateration };

struct NoiseConfig {
  /// Std. dev. of measurement noise, per position axis (direct mode) or per
  /// range (ToA mode), meters.
  double meas_sigma = 0.1;
  /// Truth disturbance w ~ N(0, process_sigma^2 I4) per step.
  double process_sigma = 0.0;
  /// Fold measurement noise to |N(0, sigma)|, which biases it positive.
  bool paper_faithful = false;
  /// Overrides meas_sigma for the very first measurement only.
  std::optional<double> initial_meas_sigma;
};

/// Everything needed to rerun a tracking experiment deterministically. The
/// state is (x, y, vx, vy); the measurement is a planar position.
struct Scenario {
  double dt = 0.1;
  std::size_t n_iter = 50;
  GaussianState initial_state;
  StateSpaceModel model;
  ControlInput control;
  std::vector<Anchor> anchors;
  MeasurementMode mode = MeasurementMode::direct_position;
  NoiseConfig noise;
  /// Draw each measurement around the current estimate instead of the truth.
  bool center_on_estimate = false;
  std::uint64_t seed = 0;
};

struct StepRecord {
  std::size_t step = 0;
  std::array<double, 4> true_state{};
  std::array<double, 2> measurement{};
  std::array<double, 4> predicted_mean{};
  std::array<double, 4> posterior_mean{};
  std::array<double, 4> posterior_cov_diag{};
  Matrix posterior_cov;
  double nees = 0.0;
  double neg_log_likelihood = 0.0;
};

struct RunSummary {
  std::uint64_t seed = 0;
  double rmse_measurement = 0.0;
  double rmse_filtered = 0.0;
  double mean_nees = 0.0;
  std::vector<StepRecord> records;
};

struct MeanWithError {
  double mean = 0.0;
  double standard_error = 0.0;
};

struct MonteCarloAggregate {
  std::size_t n_runs = 0;
  MeanWithError rmse_measurement;
  MeanWithError rmse_filtered;
  MeanWithError mean_nees;
  std::vector<RunSummary> runs;  // indexed by run, seed = scenario.seed + i

  double improvement_ratio() const { return rmse_filtered.mean / rmse_measurement.mean; }
};

/// Flag-level knobs from which a scenario is assembled.
struct ScenarioOptions {
  double dt = 0.1;
  std::size_t n_iter = 50;
  double sigma = 0.1;
  std::uint64_t seed = 0;
  MeasurementMode mode = MeasurementMode::direct_position;
  std::vector<Anchor> anchors;  // empty: default_anchors() in ToA mode
  bool paper_faithful = false;
  bool center_on_estimate = false;
};

/// Constant-velocity model: A = [[I2, dt I2], [0, I2]], B = I4,
/// H = [I2 0], Q = q I4, R = r I2.
StateSpaceModel constant_velocity_model(double dt, double q, double r);

/// Anchors at (0,0), (20,0), (0,20) m.
std::vector<Anchor> default_anchors();

/// The mobile-tracking experiment: X0 = (0, 0, 0.1, 0.1), P0 = 0.01 I4,
/// Q = I4, B = I4, U = 0, R = I2, 50 steps of 0.1 s. Measurements are
/// unbiased N(0, 0.1^2) around the truth; the truth moves at constant
/// velocity.
Scenario default_scenario(std::uint64_t seed = 0);

/// default_scenario with the listing's measurement quirks: folded noise, each
/// measurement drawn around the current estimate, and a first measurement
/// with unit spread.
Scenario paper_repro_scenario(std::uint64_t seed);

/// Truth and filter agree: process_sigma = 0.1 with Q = 0.01 I4, meas_sigma
/// = 0.1 with R = 0.01 I2.
Scenario consistent_scenario(std::uint64_t seed = 0);

Scenario build_scenario(const ScenarioOptions& options);

/// Throws DomainError or ShapeError describing the first violated rule.
void validate(const Scenario& scenario);

/// n_iter true states. Step 0 is drawn from the initial state (its mean when
/// its covariance is zero); later steps follow x_k = A x_{k-1} + B u + w.
std::vector<Matrix> generate_truth(const Scenario& scenario, SeededRng& rng);

/// Noisy planar position around `true_state` (2 x 1).
Matrix generate_measurement(const Matrix& true_state, const Scenario& scenario, SeededRng& rng);

/// Runs predict/update over n_iter steps. Throws SimulationError carrying the
/// failing step and the seed.
RunSummary run_scenario(const Scenario& scenario);

/// n_runs independent runs, run i with seed scenario.seed + i, executed in
/// parallel. Aggregation is by run index, so the result is identical to
/// serial::run_monte_carlo.
MonteCarloAggregate run_monte_carlo(const Scenario& scenario, std::size_t n_runs);

/// Combines per-run summaries (ordered by run index) into means and
/// standard errors.
MonteCarloAggregate aggregate(std::vector<RunSummary> runs);

namespace serial {

MonteCarloAggregate run_monte_carlo(const Scenario& scenario, std::size_t n_runs);

}  // namespace serial

}  // namespace kalman
