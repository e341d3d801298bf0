#include "kalman/sim.hpp"

#include <cmath>
#include <exception>

#include "kalman/error.hpp"

namespace kalman {

StateSpaceModel constant_velocity_model(double dt, double q, double r) {
  StateSpaceModel m;
  m.A = Matrix{{1, 0, dt, 0}, {0, 1, 0, dt}, {0, 0, 1, 0}, {0, 0, 0, 1}};
  m.B = Matrix::identity(4);
  m.H = Matrix{{1, 0, 0, 0}, {0, 1, 0, 0}};
  m.Q = q * Matrix::identity(4);
  m.R = r * Matrix::identity(2);
  return m;
}

std::vector<Anchor> default_anchors() {
  return {{"a0", Matrix::column({0.0, 0.0})},
          {"a1", Matrix::column({20.0, 0.0})},
          {"a2", Matrix::column({0.0, 20.0})}};
}

Scenario build_scenario(const ScenarioOptions& options) {
  Scenario s;
  s.dt = options.dt;
  s.n_iter = options.n_iter;
  s.initial_state = {Matrix::column({0.0, 0.0, 0.1, 0.1}), Matrix::diagonal({0.01, 0.01, 0.01, 0.01})};
  if (options.dt > 0.0 && std::isfinite(options.dt)) {
    s.model = constant_velocity_model(options.dt, 1.0, 1.0);
  }
  s.control = {Matrix::zeros(4, 1)};
  s.mode = options.mode;
  s.anchors = options.anchors;
  if (s.anchors.empty() && s.mode == MeasurementMode::toa_trilateration) {
    s.anchors = default_anchors();
  }
  s.noise.meas_sigma = options.sigma;
  s.noise.paper_faithful = options.paper_faithful;
  s.center_on_estimate = options.center_on_estimate;
  s.seed = options.seed;
  validate(s);
  return s;
}

Scenario default_scenario(std::uint64_t seed) {
  ScenarioOptions o;
  o.seed = seed;
  return build_scenario(o);
}

Scenario paper_repro_scenario(std::uint64_t seed) {
  ScenarioOptions o;
  o.seed = seed;
  o.paper_faithful = true;
  o.center_on_estimate = true;
  Scenario s = build_scenario(o);
  s.noise.initial_meas_sigma = 1.0;
  return s;
}

Scenario consistent_scenario(std::uint64_t seed) {
  Scenario s = default_scenario(seed);
  s.model = constant_velocity_model(s.dt, 0.01, 0.01);
  s.noise.process_sigma = 0.1;
  s.noise.meas_sigma = 0.1;
  return s;
}

void validate(const Scenario& s) {
  if (!(s.dt > 0.0) || !std::isfinite(s.dt)) {
    throw DomainError("scenario: dt must be positive, got " + std::to_string(s.dt));
  }
  if (s.n_iter < 1) throw DomainError("scenario: n_iter must be at least 1");
  if (!(s.noise.meas_sigma >= 0.0) || !(s.noise.process_sigma >= 0.0) ||
      !std::isfinite(s.noise.meas_sigma) || !std::isfinite(s.noise.process_sigma)) {
    throw DomainError("scenario: noise sigmas must be finite and non-negative");
  }
  if (s.noise.initial_meas_sigma && !(*s.noise.initial_meas_sigma >= 0.0)) {
    throw DomainError("scenario: initial measurement sigma must be non-negative");
  }
  validate(s.model);
  if (s.model.state_dim() != 4 || s.model.measurement_dim() != 2) {
    throw ShapeError("scenario: expected a 4-state model with 2 measurements, got A " +
                     s.model.A.shape() + " and H " + s.model.H.shape());
  }
  validate(s.initial_state, 4);
  if (s.control.u.rows() != s.model.control_dim() || !s.control.u.is_column()) {
    throw ShapeError("scenario: control " + s.control.u.shape() + " does not match B " +
                     s.model.B.shape());
  }
  if (s.mode == MeasurementMode::toa_trilateration && s.anchors.size() < 3) {
    throw DomainError("scenario: ToA mode needs at least 3 anchors, got " +
                      std::to_string(s.anchors.size()));
  }
}

std::vector<Matrix> generate_truth(const Scenario& scenario, SeededRng& rng) {
  validate(scenario);
  std::vector<Matrix> truth;
  truth.reserve(scenario.n_iter);

  const GaussianState& init = scenario.initial_state;
  truth.push_back(max_abs(init.cov) == 0.0 ? init.mean : sample_gaussian(rng, {init.mean, init.cov}));

  const double q = scenario.noise.process_sigma;
  const GaussianParams disturbance{Matrix::zeros(4, 1), (q * q) * Matrix::identity(4)};
  const Matrix drive = scenario.model.B * scenario.control.u;
  for (std::size_t k = 1; k < scenario.n_iter; ++k) {
    Matrix next = scenario.model.A * truth.back() + drive;
    if (q > 0.0) next = next + sample_gaussian(rng, disturbance);
    truth.push_back(std::move(next));
  }
  return truth;
}

namespace {

double draw_noise(double sigma, bool folded, SeededRng& rng) {
  if (sigma == 0.0) return 0.0;
  const double n = sigma * rng.normal();
  return folded ? std::abs(n) : n;
}

Matrix measure(const Matrix& state, const Scenario& s, double sigma, SeededRng& rng) {
  const double x = state(0, 0);
  const double y = state(1, 0);
  if (s.mode == MeasurementMode::direct_position) {
    const double nx = draw_noise(sigma, s.noise.paper_faithful, rng);
    const double ny = draw_noise(sigma, s.noise.paper_faithful, rng);
    return Matrix::column({x + nx, y + ny});
  }

  std::vector<ToaObservation> obs;
  obs.reserve(s.anchors.size());
  for (const auto& a : s.anchors) {
    const double range = std::hypot(x - a.position(0, 0), y - a.position(1, 0));
    // A ranging device never reports a negative distance.
    const double noisy = std::max(0.0, range + draw_noise(sigma, s.noise.paper_faithful, rng));
    obs.push_back({a.id, noisy / kSpeedOfLight});
  }
  return fix_position(s.anchors, obs);
}

std::array<double, 4> to_array4(const Matrix& m) {
  return {m(0, 0), m(1, 0), m(2, 0), m(3, 0)};
}

}  // namespace

Matrix generate_measurement(const Matrix& true_state, const Scenario& scenario, SeededRng& rng) {
  if (true_state.rows() != 4 || !true_state.is_column()) {
    throw ShapeError("generate_measurement: state has shape " + true_state.shape() +
                     ", expected 4x1");
  }
  return measure(true_state, scenario, scenario.noise.meas_sigma, rng);
}

RunSummary run_scenario(const Scenario& scenario) {
  validate(scenario);
  SeededRng rng(scenario.seed);
  const std::vector<Matrix> truth = generate_truth(scenario, rng);

  RunSummary summary;
  summary.seed = scenario.seed;
  summary.records.reserve(scenario.n_iter);

  GaussianState estimate = scenario.initial_state;
  double sq_meas = 0.0;
  double sq_filt = 0.0;
  double nees_sum = 0.0;

  for (std::size_t k = 0; k < scenario.n_iter; ++k) {
    try {
      const double sigma = (k == 0 && scenario.noise.initial_meas_sigma)
                               ? *scenario.noise.initial_meas_sigma
                               : scenario.noise.meas_sigma;
      const Matrix& center = scenario.center_on_estimate ? estimate.mean : truth[k];
      const Matrix y = measure(center, scenario, sigma, rng);

      const GaussianState predicted = predict(estimate, scenario.model, scenario.control);
      auto [posterior, diag] = update(predicted, y, scenario.model);

      const Matrix err = posterior.mean - truth[k];
      const double nees = (mat_transpose(err) * mat_inverse(posterior.cov) * err)(0, 0);

      StepRecord rec;
      rec.step = k;
      rec.true_state = to_array4(truth[k]);
      rec.measurement = {y(0, 0), y(1, 0)};
      rec.predicted_mean = to_array4(predicted.mean);
      rec.posterior_mean = to_array4(posterior.mean);
      const auto d = posterior.cov.diag();
      rec.posterior_cov_diag = {d[0], d[1], d[2], d[3]};
      rec.posterior_cov = posterior.cov;
      rec.nees = nees;
      rec.neg_log_likelihood = diag.likelihood.neg_log_density;

      const double mx = rec.measurement[0] - rec.true_state[0];
      const double my = rec.measurement[1] - rec.true_state[1];
      const double fx = rec.posterior_mean[0] - rec.true_state[0];
      const double fy = rec.posterior_mean[1] - rec.true_state[1];
      sq_meas += mx * mx + my * my;
      sq_filt += fx * fx + fy * fy;
      nees_sum += nees;

      summary.records.push_back(std::move(rec));
      estimate = std::move(posterior);
    } catch (const SimulationError&) {
      throw;
    } catch (const Error& e) {
      throw SimulationError("run_scenario: step " + std::to_string(k) + " of seed " +
                                std::to_string(scenario.seed) + " failed: " + e.what(),
                            k, scenario.seed);
    }
  }

  const auto n = static_cast<double>(scenario.n_iter);
  summary.rmse_measurement = std::sqrt(sq_meas / n);
  summary.rmse_filtered = std::sqrt(sq_filt / n);
  summary.mean_nees = nees_sum / n;
  return summary;
}

namespace {

MeanWithError mean_with_error(const std::vector<RunSummary>& runs, double RunSummary::*field) {
  const auto n = static_cast<double>(runs.size());
  double sum = 0.0;
  for (const auto& r : runs) sum += r.*field;
  const double mean = sum / n;
  if (runs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (const auto& r : runs) ss += (r.*field - mean) * (r.*field - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

MonteCarloAggregate aggregate(std::vector<RunSummary> runs) {
  if (runs.empty()) throw DomainError("aggregate: no runs");
  MonteCarloAggregate agg;
  agg.n_runs = runs.size();
  agg.rmse_measurement = mean_with_error(runs, &RunSummary::rmse_measurement);
  agg.rmse_filtered = mean_with_error(runs, &RunSummary::rmse_filtered);
  agg.mean_nees = mean_with_error(runs, &RunSummary::mean_nees);
  agg.runs = std::move(runs);
  return agg;
}

MonteCarloAggregate run_monte_carlo(const Scenario& scenario, std::size_t n_runs) {
  if (n_runs < 1) throw DomainError("run_monte_carlo: n_runs must be at least 1");
  validate(scenario);

  std::vector<RunSummary> runs(n_runs);
  std::vector<std::exception_ptr> failures(n_runs);
  const auto n = static_cast<std::ptrdiff_t>(n_runs);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    Scenario s = scenario;
    s.seed = scenario.seed + static_cast<std::uint64_t>(i);
    try {
      runs[i] = run_scenario(s);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return aggregate(std::move(runs));
}

MonteCarloAggregate serial::run_monte_carlo(const Scenario& scenario, std::size_t n_runs) {
  if (n_runs < 1) throw DomainError("run_monte_carlo: n_runs must be at least 1");
  validate(scenario);
  std::vector<RunSummary> runs;
  runs.reserve(n_runs);
  for (std::size_t i = 0; i < n_runs; ++i) {
    Scenario s = scenario;
    s.seed = scenario.seed + i;
    runs.push_back(run_scenario(s));
  }
  return aggregate(std::move(runs));
}

}  // namespace kalman
