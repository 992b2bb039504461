#pragma once

#include <span>
#include <string>
#include <vector>

#include "ffint/geometry.hpp"
#include "ffint/rng.hpp"
#include "ffint/tableau.hpp"

namespace ffint {

// Per-step random variables. ThreePoint takes {0, +-sqrt(3)} with
// P(0) = 2/3, matching Gaussian moments through order four; Rademacher is
// +-1. All channels are independent across d, l, and steps.
enum class NoiseSource { Gaussian, ThreePoint, Rademacher };

NoiseSource noise_by_name(const std::string& name);  // gaussian, threepoint, rademacher
const char* noise_name(NoiseSource src);

// One variate for the given draw site.
double draw_noise(NoiseSource src, const DrawKey& key);

struct MomentReport {
  std::vector<double> empirical;  // moments 1..6
  std::vector<double> target;
  std::vector<double> stderr_est;
};

MomentReport moment_check(NoiseSource src, long long n_samples, std::uint64_t seed = 0);

struct StepStats {
  long long chart_switches = 0;
  long long resamples = 0;
  long long steps = 0;
};

// One attempted step of the tableau runner. xi holds the step's variates,
// indexed xi[l*D + d]; the k=1 exponential is applied first. All drift
// evaluations and exponentials use the chart of x, which is kept fixed for
// the whole step. Throws GeometryError when a frozen flow is undefined.
ManifoldPoint tableau_step(const Problem& prob, const Tableau& t, const ManifoldPoint& x,
                           double h, std::span<const double> xi);

// Order-one reference schemes on the sphere. xi holds 2 (geodesic) or 3
// (projection) variates.
ManifoldPoint geodesic_langevin_step(const Problem& prob, const ManifoldPoint& x, double h,
                                     std::span<const double> xi);
ManifoldPoint projection_euler_step(const Problem& prob, const ManifoldPoint& x, double h,
                                    std::span<const double> xi);

enum class SchemeKind { TableauScheme, GeodesicLangevin, ProjectionEuler };

struct Scheme {
  std::string name;
  SchemeKind kind = SchemeKind::TableauScheme;
  Tableau tableau;
  NoiseSource default_noise = NoiseSource::Gaussian;

  int draws_per_step(int frame_dim) const;
};

// Registry: euler_ff, sff2, brownian2, geodesic_langevin, projection_euler.
Scheme scheme_by_name(const std::string& name);
std::vector<std::string> scheme_names();

// Dispatches on the scheme kind; xi sized by draws_per_step.
ManifoldPoint scheme_step(const Problem& prob, const Scheme& s, const ManifoldPoint& x, double h,
                          std::span<const double> xi);

// Runs one step with the deterministic draw discipline: variates are
// addressed by (seed; trajectory, step, attempt * draws + index), and a step
// rejected by the geometry is redrawn at the next attempt slot.
ManifoldPoint run_step(const Problem& prob, const Scheme& s, NoiseSource noise,
                       const ManifoldPoint& x, double h, std::uint64_t seed,
                       std::uint32_t trajectory, std::uint32_t step, StepStats& stats);

}  // namespace ffint
