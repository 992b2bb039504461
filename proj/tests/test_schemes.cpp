#include "ffint/schemes.hpp"

#include <cmath>
#include <random>

#include "doctest.h"

using namespace ffint;

namespace {

std::vector<double> step_draws(NoiseSource src, std::uint64_t seed, std::uint32_t traj,
                               std::uint32_t step, int n) {
  std::vector<double> xi(n);
  for (int q = 0; q < n; ++q)
    xi[q] = draw_noise(src, DrawKey{seed, traj, step, std::uint32_t(q), 0});
  return xi;
}

// The two-stage second-order method written out literally, for comparison
// against the generic tableau runner.
ManifoldPoint sff2_by_hand(const Problem& prob, const ManifoldPoint& x, double h,
                           std::span<const double> xi) {
  const int D = prob.frame_dim();
  const double r2 = std::sqrt(2.0);
  const double sh = prob.noise_scale * std::sqrt(h);
  std::vector<double> f1(D), f2(D), c(D);
  prob.drift(x, f1);
  for (int d = 0; d < D; ++d) c[d] = 0.5 * h * f1[d] + sh * xi[d];
  ManifoldPoint h2 = prob.manifold->frozen_flow(x, c);
  prob.drift(h2, f2);
  for (int d = 0; d < D; ++d)
    c[d] = (1.0 - r2 / 2.0) * h * f1[d] + (r2 - 1.0) * h * f2[d] + r2 * sh * xi[d];
  ManifoldPoint y = prob.manifold->frozen_flow(x, c);
  for (int d = 0; d < D; ++d)
    c[d] = (r2 / 2.0 - 1.0) * h * f1[d] + (2.0 - r2) * h * f2[d] + (1.0 - r2) * sh * xi[d] +
           sh * xi[std::size_t(D) + d];
  return prob.manifold->frozen_flow(y, c);
}

}  // namespace

TEST_CASE("noise sources hit their moments") {
  const long long n = 200000;
  auto three = moment_check(NoiseSource::ThreePoint, n, 5);
  CHECK(std::abs(three.empirical[0]) < 4.0 / std::sqrt(double(n)));
  CHECK(three.empirical[1] == doctest::Approx(1.0).epsilon(0.02));
  CHECK(three.empirical[3] == doctest::Approx(3.0).epsilon(0.05));
  CHECK(three.target[5] == 9.0);

  auto rad = moment_check(NoiseSource::Rademacher, n, 5);
  CHECK(rad.empirical[1] == 1.0);  // squares are exactly one
  CHECK(std::abs(rad.empirical[0]) < 4.0 / std::sqrt(double(n)));

  auto gauss = moment_check(NoiseSource::Gaussian, n, 5);
  CHECK(gauss.empirical[1] == doctest::Approx(1.0).epsilon(0.02));
  CHECK(gauss.empirical[3] == doctest::Approx(3.0).epsilon(0.08));
}

TEST_CASE("euler step on euclidean space is the explicit formula") {
  auto prob = rn_problem(2, [](const ManifoldPoint&, std::span<double> f) {
    f[0] = 1.0;
    f[1] = -2.0;
  });
  Scheme euler = scheme_by_name("euler_ff");
  double h = 0.25;
  ManifoldPoint x;
  x.coord = {0.5, 1.5};
  auto xi = step_draws(NoiseSource::Gaussian, 42, 7, 3, 2);
  ManifoldPoint y = tableau_step(prob, euler.tableau, x, h, xi);
  double sh = std::sqrt(2.0 * h);
  CHECK(y.coord[0] == 0.5 + h * 1.0 + sh * xi[0]);
  CHECK(y.coord[1] == 1.5 + h * (-2.0) + sh * xi[1]);
}

TEST_CASE("zero tableau leaves the state unchanged") {
  auto prob = rn_problem(2, nullptr);
  Tableau z = Tableau::zeros(1, 1, 1);
  ManifoldPoint x;
  x.coord = {0.3, -0.7};
  double xi[2] = {1.5, -0.5};
  ManifoldPoint y = tableau_step(prob, z, x, 0.1, xi);
  CHECK(y.coord[0] == x.coord[0]);
  CHECK(y.coord[1] == x.coord[1]);
}

TEST_CASE("sff2 noise combines to the exact Gaussian variance on flat space") {
  auto prob = rn_problem(1, nullptr);
  Scheme sff2 = scheme_by_name("sff2");
  double h = 0.37;
  const long long M = 100000;
  double sum = 0, sumsq = 0;
  for (long long traj = 0; traj < M; ++traj) {
    ManifoldPoint x;
    auto xi = step_draws(NoiseSource::Gaussian, 9, std::uint32_t(traj), 0, 2);
    ManifoldPoint y = tableau_step(prob, sff2.tableau, x, h, xi);
    sum += y.coord[0];
    sumsq += y.coord[0] * y.coord[0];
  }
  double mean = sum / M;
  double var = sumsq / M - mean * mean;
  CHECK(var == doctest::Approx(2.0 * h).epsilon(0.04));  // law of sqrt(2) W_h
}

TEST_CASE("tableau runner reproduces the hand-coded method bit for bit") {
  std::mt19937_64 gen(1234);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Scheme sff2 = scheme_by_name("sff2");

  auto so3 = so3_brownian_problem();
  auto sphere = sphere_langevin_problem();
  auto cauchy = cauchy_problem(4.0);
  auto rn = rn_problem(2, [](const ManifoldPoint& p, std::span<double> f) {
    f[0] = -p.coord[0] + 0.3 * p.coord[1];
    f[1] = -p.coord[1];
  });

  for (int rep = 0; rep < 100; ++rep) {
    const Problem* prob;
    ManifoldPoint x;
    switch (rep % 4) {
      case 0:
        prob = &so3;
        x.coord = {1, 0, 0, 0, 1, 0, 0, 0, 1};
        break;
      case 1:
        prob = &sphere;
        x.coord = {0.6 * u(gen), u(gen)};
        break;
      case 2:
        prob = &cauchy;
        x.coord = {1.5 + u(gen), u(gen)};
        break;
      default:
        prob = &rn;
        x.coord = {u(gen), u(gen)};
        break;
    }
    double h = 0.01 + 0.03 * (u(gen) + 0.5);
    auto xi = step_draws(NoiseSource::Gaussian, 1000 + rep, std::uint32_t(rep), 0,
                         2 * prob->frame_dim());
    ManifoldPoint a = tableau_step(*prob, sff2.tableau, x, h, xi);
    ManifoldPoint b = sff2_by_hand(*prob, x, h, xi);
    for (int i = 0; i < 9; ++i) CHECK(a.coord[i] == b.coord[i]);
    CHECK(a.chart == b.chart);
  }
}

TEST_CASE("deterministic part of sff2 matches a second-order expansion") {
  // linear rotation field: exact flow is a rotation matrix
  auto prob = rn_problem(2, [](const ManifoldPoint& p, std::span<double> f) {
    f[0] = p.coord[1];
    f[1] = -p.coord[0];
  });
  Scheme sff2 = scheme_by_name("sff2");
  std::vector<double> xs, ys;
  std::vector<double> zero(4, 0.0);
  for (int k = 3; k <= 8; ++k) {
    double h = std::pow(2.0, -k);
    ManifoldPoint x;
    x.coord = {1.0, 0.0};
    ManifoldPoint y = tableau_step(prob, sff2.tableau, x, h, zero);
    double ex = std::cos(h), ey = -std::sin(h);
    double err = std::hypot(y.coord[0] - ex, y.coord[1] - ey);
    xs.push_back(std::log(h));
    ys.push_back(std::log(err));
  }
  double n = double(xs.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope >= 2.9);
}

TEST_CASE("permuting noise channels consistently leaves the step unchanged") {
  auto prob = cauchy_problem(4.0);
  Scheme sff2 = scheme_by_name("sff2");
  Tableau permuted = sff2.tableau;  // swap channels l=0 and l=1
  for (int i = 0; i < permuted.s; ++i)
    for (int k = 0; k < permuted.K; ++k)
      std::swap(permuted.Zhat_ref(i, k, 0), permuted.Zhat_ref(i, k, 1));
  for (int k = 0; k < permuted.K; ++k)
    std::swap(permuted.zhat_ref(k, 0), permuted.zhat_ref(k, 1));

  ManifoldPoint x;
  x.coord = {2.0, 0.4};
  const int D = 2;
  auto xi = step_draws(NoiseSource::Gaussian, 77, 0, 0, 2 * D);
  std::vector<double> xi_swapped(xi);
  for (int d = 0; d < D; ++d) std::swap(xi_swapped[d], xi_swapped[D + d]);

  ManifoldPoint a = tableau_step(prob, sff2.tableau, x, 0.02, xi);
  ManifoldPoint b = tableau_step(prob, permuted, x, 0.02, xi_swapped);
  CHECK(a.coord[0] == b.coord[0]);
  CHECK(a.coord[1] == b.coord[1]);
}

TEST_CASE("brownian2 and sff2 take identical steps on drift-free problems") {
  auto prob = so3_brownian_problem();
  Scheme a = scheme_by_name("sff2");
  Scheme b = scheme_by_name("brownian2");
  ManifoldPoint xa, xb;
  xa.coord = xb.coord = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  StepStats sa, sb;
  for (int n = 0; n < 50; ++n) {
    xa = run_step(prob, a, NoiseSource::ThreePoint, xa, 0.05, 3, 0, std::uint32_t(n), sa);
    xb = run_step(prob, b, NoiseSource::ThreePoint, xb, 0.05, 3, 0, std::uint32_t(n), sb);
  }
  for (int i = 0; i < 9; ++i) CHECK(xa.coord[i] == xb.coord[i]);
}

TEST_CASE("so3 orthogonality holds over many composed sff2 steps") {
  auto prob = so3_brownian_problem();
  Scheme sff2 = scheme_by_name("sff2");
  ManifoldPoint x;
  x.coord = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  StepStats st;
  for (int n = 0; n < 100000; ++n)
    x = run_step(prob, sff2, NoiseSource::ThreePoint, x, 0.01, 13, 0, std::uint32_t(n), st);
  CHECK(so3_orthogonality_defect(x) < 1e-10);
}

TEST_CASE("geodesic Langevin baseline") {
  auto uniform = sphere_uniform_problem();
  ManifoldPoint x;
  x.coord = {0.3, 0.8};
  double zero[2] = {0, 0};
  ManifoldPoint y = geodesic_langevin_step(uniform, x, 0.1, zero);
  CHECK(y.coord[0] == doctest::Approx(x.coord[0]));
  CHECK(y.coord[1] == doctest::Approx(x.coord[1]));

  // tangent of norm pi from the equator lands at the antipode
  ManifoldPoint eq;
  eq.coord = {0.0, 0.0};
  double xi[2] = {M_PI, 0.0};  // sqrt(2h) = 1 at h = 0.5
  ManifoldPoint anti = geodesic_langevin_step(uniform, eq, 0.5, xi);
  auto amb = sphere2_ambient(anti);
  CHECK(amb[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(amb[1]) < 1e-12);
  CHECK(std::abs(amb[2]) < 1e-9);

  auto langevin = sphere_langevin_problem();
  CHECK_THROWS(geodesic_langevin_step(cauchy_problem(4.0), x, 0.1, zero));
  ManifoldPoint moved = geodesic_langevin_step(langevin, x, 0.1, zero);
  CHECK(moved.coord[0] != x.coord[0]);  // drift pushes toward the north pole
}

TEST_CASE("projection Euler baseline stays on the sphere") {
  auto uniform = sphere_uniform_problem();
  ManifoldPoint x;
  x.coord = {0.2, -0.4};
  double zero[3] = {0, 0, 0};
  ManifoldPoint y = projection_euler_step(uniform, x, 0.05, zero);
  CHECK(y.coord[0] == doctest::Approx(x.coord[0]));
  CHECK(y.coord[1] == doctest::Approx(x.coord[1]));

  std::mt19937_64 gen(5);
  std::normal_distribution<double> g;
  auto langevin = sphere_langevin_problem();
  for (int rep = 0; rep < 100; ++rep) {
    double xi[3] = {g(gen), g(gen), g(gen)};
    ManifoldPoint q = projection_euler_step(langevin, x, 0.1, xi);
    auto amb = sphere2_ambient(q);
    double norm = std::sqrt(amb[0] * amb[0] + amb[1] * amb[1] + amb[2] * amb[2]);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-14));
    x = q;
  }
}

TEST_CASE("scheme registry") {
  CHECK(scheme_names().size() == 5);
  CHECK_THROWS(scheme_by_name("does_not_exist"));
  CHECK(scheme_by_name("brownian2").default_noise == NoiseSource::ThreePoint);
  CHECK(scheme_by_name("euler_ff").draws_per_step(3) == 3);
  CHECK(scheme_by_name("sff2").draws_per_step(3) == 6);
  CHECK(scheme_by_name("geodesic_langevin").draws_per_step(2) == 2);
  CHECK_THROWS(noise_by_name("bogus"));
}
