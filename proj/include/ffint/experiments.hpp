#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ffint/geometry.hpp"
#include "ffint/schemes.hpp"

namespace ffint {

struct ExperimentConfig {
  std::string experiment;     // so3_weak | sphere_ergodic | cauchy_decay
  std::string scheme = "euler_ff";
  std::string manifold;       // defaults from the experiment
  std::string test_function;  // defaults from the experiment
  std::string noise;          // empty: scheme default
  double T = 1.0;
  std::vector<double> h_list;
  long long trajectories = 100000;
  std::uint64_t seed = 0;
  std::string ref_scheme;     // weak error: reference scheme at ref_h
  double ref_h = 0.0;
  double closed_form = std::nan("");  // reference value when known
  double beta = 4.0;
  double x0_r = 2.0;
  double x0_theta = 0.0;
  int threads = 0;            // 0: hardware concurrency
  std::string out;            // csv destination, empty = stdout
  // Weak-error runs: drive the coarse and reference paths with the same
  // Brownian increments (exact Gaussian conditioning), so the per-trajectory
  // difference carries only the discretization error. Requires tableau
  // schemes with Gaussian noise; falls back to independent sampling else.
  bool coupled = true;
};

// Flat key=value text, '#' comments. Unknown keys are rejected.
ExperimentConfig read_config_file(const std::string& path);
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value);

struct ErrorRow {
  double h = 0;
  double estimate = 0;
  double reference = 0;
  double abs_error = 0;
  double mc_stderr = 0;
  bool at_mc_floor = false;
};

struct ErrorTable {
  std::vector<ErrorRow> rows;
  double slope = std::nan("");  // log-log fit, floor points excluded
  int slope_points = 0;
  StepStats stats;
};

struct DecayRow {
  double t = 0;
  double estimate = 0;
  double abs_value = 0;
  double mc_stderr = 0;
};

struct DecaySeries {
  std::vector<DecayRow> rows;
  double fitted_rate = std::nan("");
  int fit_points = 0;
  StepStats stats;
  double resample_rate = 0.0;
  bool flagged = false;  // domain-exit resamples exceeded 1% of steps
};

// E[phi(X_T)] per step size against a fine-step reference scheme or a
// closed-form value, with the fitted weak-order slope.
ErrorTable run_weak_error(const ExperimentConfig& cfg);

// Long-time average of the sphere test function against the stationary
// closed form 3 - 2/tanh(1). The estimate averages the test function over
// the second half of each trajectory.
ErrorTable run_sphere_ergodic(const ExperimentConfig& cfg);

// |E[phi^k(X_t)]| time series from a fixed start and the fitted exponential
// decay rate before the noise/bias floor. Uses cfg.test_function.
DecaySeries run_cauchy_ergodic(const ExperimentConfig& cfg);

// Least-squares slope of ys against xs.
double estimate_slope(std::span<const double> xs, std::span<const double> ys);

double sphere_stationary_x3sq();  // 3 - 2/tanh(1)

std::function<double(const ManifoldPoint&)> test_function_by_name(const std::string& name,
                                                                  double beta);

void write_error_csv(std::ostream& os, const ExperimentConfig& cfg, const ErrorTable& table);
void write_decay_csv(std::ostream& os, const DecaySeries& series);

// Deterministic parallel Monte-Carlo reduction: trajectories are processed
// in fixed blocks, each block reduced with compensated summation, blocks
// combined in index order; results are bitwise independent of the worker
// count. `body` fills n_obs values for one trajectory.
void mc_reduce(long long trajectories, int n_obs, int threads,
               const std::function<void(std::uint32_t, std::span<double>)>& body,
               std::span<double> means, std::span<double> stderrs);

}  // namespace ffint
