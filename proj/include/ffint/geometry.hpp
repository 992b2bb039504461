#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>

namespace ffint {

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// The frozen flow would leave the manifold's domain (Cauchy surface, r <= 0).
struct DomainExitError : GeometryError {
  using GeometryError::GeometryError;
};
// The flow runs into a coordinate singularity in every available chart.
struct ChartError : GeometryError {
  using GeometryError::GeometryError;
};

// Coordinates of one manifold point. Interpretation is manifold-specific:
// R^n uses coord[0..n); SO(3) stores the row-major 3x3 matrix; the sphere
// stores (theta, phi) plus the active chart; the Cauchy surface stores
// (r, theta).
struct ManifoldPoint {
  std::array<double, 9> coord{};
  std::uint8_t chart = 0;
};

// Scalars multiplying the frame fields E_1..E_D in one exponential.
using FrameCoefficients = std::array<double, 9>;

class Manifold {
 public:
  virtual ~Manifold() = default;
  virtual const std::string& name() const = 0;
  virtual int frame_dim() const = 0;

  // Exact time-1 flow of the frozen field sum_d c[d] E_d from p, within p's
  // chart. Throws DomainExitError / ChartError when undefined.
  virtual ManifoldPoint frozen_flow(const ManifoldPoint& p,
                                    std::span<const double> c) const = 0;

  // Moves p to the numerically preferred chart; returns true if it switched.
  virtual bool normalize_chart(ManifoldPoint& p) const { (void)p; return false; }
};

std::shared_ptr<const Manifold> make_rn(int dim);
std::shared_ptr<const Manifold> make_so3();
std::shared_ptr<const Manifold> make_sphere2();
std::shared_ptr<const Manifold> make_cauchy();
// By registry name: "rn" (dim via parameter), "so3", "sphere2", "cauchy".
std::shared_ptr<const Manifold> manifold_by_name(const std::string& name, int rn_dim = 2);

// Orthonormal basis of so(3) for the trace metric g(A,B) = Tr(A^T B):
// (e_i e_j^T - e_j e_i^T)/sqrt(2) for (i,j) in {(1,2),(1,3),(2,3)}.
std::array<std::array<double, 9>, 3> so3_basis();

// Frobenius deviation of X^T X from the identity.
double so3_orthogonality_defect(const ManifoldPoint& p);

// Sphere chart conversions (chart 0: poles at +-z; chart 1: poles at +-x).
std::array<double, 3> sphere2_ambient(const ManifoldPoint& p);
ManifoldPoint sphere2_from_ambient(const std::array<double, 3>& x, int chart);

// Langevin drift on the sphere for V = -x3, including the connection
// correction -sum_d nabla_{E_d} E_d; the V = 0 variant keeps only the
// correction term.
void sphere_langevin_drift(const ManifoldPoint& p, std::span<double> f);
void sphere_zero_potential_drift(const ManifoldPoint& p, std::span<double> f);

// Drift of the generalized Cauchy dynamics: f1 = 1/tanh(r) - (2b-1) tanh(r).
void cauchy_drift(const ManifoldPoint& p, double beta, std::span<double> f);

// A concrete SDE: manifold, frame dimension, drift coefficients, and the
// noise scale multiplying sqrt(h) on the tableau's zhat/Zhat rows.
struct Problem {
  std::shared_ptr<const Manifold> manifold;
  std::function<void(const ManifoldPoint&, std::span<double>)> drift;
  double noise_scale = 1.0;
  std::string name;
  // Sphere problems sample V = -sphere_potential * x3; the baseline schemes
  // read the potential from here rather than from the frozen-flow drift.
  double sphere_potential = 0.0;

  int frame_dim() const { return manifold->frame_dim(); }
};

Problem so3_brownian_problem();
Problem sphere_langevin_problem();
Problem sphere_uniform_problem();
Problem cauchy_problem(double beta);
// Free R^n problem with optional linear drift x -> A x (for tests).
Problem rn_problem(int dim, std::function<void(const ManifoldPoint&, std::span<double>)> drift,
                   double noise_scale = 1.0);

}  // namespace ffint
