#include "ffint/geometry.hpp"

#include <cmath>
#include <random>

#include "doctest.h"

using namespace ffint;

namespace {

// RK4 oracle for the chart ODE of the frozen field, y' = sum c_d E_d(y).
ManifoldPoint rk4_chart_flow(const ManifoldPoint& p, double c1, double c2,
                             bool sphere, int n_steps) {
  auto rhs = [&](double a, double& da, double& db) {
    da = c1;
    db = sphere ? c2 / std::cos(a) : c2 / std::tanh(a);
  };
  double a = p.coord[0], b = p.coord[1];
  double dt = 1.0 / n_steps;
  for (int i = 0; i < n_steps; ++i) {
    double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
    rhs(a, k1a, k1b);
    rhs(a + 0.5 * dt * k1a, k2a, k2b);
    rhs(a + 0.5 * dt * k2a, k3a, k3b);
    rhs(a + dt * k3a, k4a, k4b);
    a += dt / 6.0 * (k1a + 2 * k2a + 2 * k3a + k4a);
    b += dt / 6.0 * (k1b + 2 * k2b + 2 * k3b + k4b);
  }
  ManifoldPoint q = p;
  q.coord[0] = a;
  q.coord[1] = b;
  return q;
}

std::array<double, 3> sphere_frame_e1(const ManifoldPoint& p) {
  double ct = std::cos(p.coord[0]), st = std::sin(p.coord[0]);
  double cp = std::cos(p.coord[1]), sp = std::sin(p.coord[1]);
  if (p.chart == 0) return {-st * cp, -st * sp, ct};
  return {ct, -st * cp, -st * sp};
}

std::array<double, 3> sphere_frame_e2(const ManifoldPoint& p) {
  double cp = std::cos(p.coord[1]), sp = std::sin(p.coord[1]);
  if (p.chart == 0) return {-sp, cp, 0.0};
  return {0.0, -sp, cp};
}

}  // namespace

TEST_CASE("euclidean frozen flow is translation") {
  auto rn = make_rn(2);
  ManifoldPoint p;
  p.coord = {0.0, 0.0};
  double c[2] = {1.0, 2.0};
  auto q = rn->frozen_flow(p, c);
  CHECK(q.coord[0] == 1.0);
  CHECK(q.coord[1] == 2.0);
}

TEST_CASE("so3 basis is trace-orthonormal and non-commuting") {
  auto basis = so3_basis();
  auto trace_dot = [&](int d, int e) {
    double s = 0;
    for (int i = 0; i < 9; ++i) s += basis[d][i] * basis[e][i];
    return s;
  };
  for (int d = 0; d < 3; ++d)
    for (int e = 0; e < 3; ++e)
      CHECK(trace_dot(d, e) == doctest::Approx(d == e ? 1.0 : 0.0));
  // [A1, A2] != 0
  double comm = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double ab = 0, ba = 0;
      for (int k = 0; k < 3; ++k) {
        ab += basis[0][3 * i + k] * basis[1][3 * k + j];
        ba += basis[1][3 * i + k] * basis[0][3 * k + j];
      }
      comm += std::abs(ab - ba);
    }
  CHECK(comm > 0.1);
}

TEST_CASE("so3 frozen flow: identity at zero, orthogonality preserved") {
  auto so3 = make_so3();
  ManifoldPoint x;
  x.coord = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  double zero[3] = {0, 0, 0};
  auto q = so3->frozen_flow(x, zero);
  for (int i = 0; i < 9; ++i) CHECK(q.coord[i] == doctest::Approx(x.coord[i]));

  std::mt19937_64 gen(7);
  std::normal_distribution<double> g(0.0, 0.3);
  ManifoldPoint y = x;
  for (int n = 0; n < 10000; ++n) {
    double c[3] = {g(gen), g(gen), g(gen)};
    y = so3->frozen_flow(y, c);
  }
  CHECK(so3_orthogonality_defect(y) < 1e-10);
}

TEST_CASE("sphere chart conversion round trips away from seams") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int rep = 0; rep < 200; ++rep) {
    ManifoldPoint p;
    p.chart = rep % 2;
    p.coord[0] = u(gen);
    p.coord[1] = u(gen) + 0.8;
    auto amb = sphere2_ambient(p);
    auto other = sphere2_from_ambient(amb, 1 - p.chart);
    auto back = sphere2_from_ambient(sphere2_ambient(other), p.chart);
    CHECK(back.coord[0] == doctest::Approx(p.coord[0]).epsilon(1e-12));
    CHECK(back.coord[1] == doctest::Approx(p.coord[1]).epsilon(1e-12));
  }
}

TEST_CASE("sphere and cauchy closed-form flows match the ODE oracle") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  auto sphere = make_sphere2();
  auto cauchy = make_cauchy();
  for (int rep = 0; rep < 300; ++rep) {
    ManifoldPoint p;
    p.chart = rep % 2;
    p.coord[0] = 0.8 * u(gen);
    p.coord[1] = 4.0 * u(gen);
    double c[2] = {u(gen), u(gen)};
    auto q = sphere->frozen_flow(p, c);
    auto r = rk4_chart_flow(p, c[0], c[1], true, 2000);
    CHECK(q.coord[0] == doctest::Approx(r.coord[0]).epsilon(1e-8));
    CHECK(q.coord[1] == doctest::Approx(r.coord[1]).epsilon(1e-8));

    ManifoldPoint cp;
    cp.coord[0] = 1.0 + u(gen);  // r in [0.5, 1.5]
    cp.coord[1] = 4.0 * u(gen);
    double cc[2] = {u(gen), u(gen)};
    auto cq = cauchy->frozen_flow(cp, cc);
    auto cr = rk4_chart_flow(cp, cc[0], cc[1], false, 2000);
    CHECK(cq.coord[0] == doctest::Approx(cr.coord[0]).epsilon(1e-8));
    CHECK(cq.coord[1] == doctest::Approx(cr.coord[1]).epsilon(1e-8));
  }
}

TEST_CASE("cauchy worked flow value and domain exit") {
  auto cauchy = make_cauchy();
  ManifoldPoint p;
  p.coord = {1.0, 0.0};
  double c[2] = {1.0, 1.0};
  auto q = cauchy->frozen_flow(p, c);
  CHECK(q.coord[0] == doctest::Approx(2.0));
  CHECK(q.coord[1] == doctest::Approx(std::log(std::sinh(2.0) / std::sinh(1.0))));
  CHECK(q.coord[1] == doctest::Approx(1.1269280).epsilon(1e-6));

  double bad[2] = {-1.5, 0.0};
  CHECK_THROWS_AS((void)cauchy->frozen_flow(p, bad), DomainExitError);
}

TEST_CASE("sphere pole crossing raises a chart error") {
  auto sphere = make_sphere2();
  ManifoldPoint p;
  p.coord = {1.2, 0.0};
  double c[2] = {0.5, 0.3};  // would pass theta = pi/2
  CHECK_THROWS_AS((void)sphere->frozen_flow(p, c), ChartError);
}

TEST_CASE("flow along a ray composes (frozen geodesic property)") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  for (auto m : {make_sphere2(), make_cauchy()}) {
    for (int rep = 0; rep < 50; ++rep) {
      ManifoldPoint p;
      p.coord[0] = m->name() == "cauchy" ? 1.0 + 0.5 * u(gen) : 0.6 * u(gen);
      p.coord[1] = u(gen);
      double c[2] = {u(gen), u(gen)};
      double s = 0.4, t = 0.6;
      double cs[2] = {s * c[0], s * c[1]};
      double ct[2] = {t * c[0], t * c[1]};
      auto direct = m->frozen_flow(p, c);
      auto two_leg = m->frozen_flow(m->frozen_flow(p, cs), ct);
      CHECK(direct.coord[0] == doctest::Approx(two_leg.coord[0]).epsilon(1e-10));
      CHECK(direct.coord[1] == doctest::Approx(two_leg.coord[1]).epsilon(1e-10));
    }
  }
}

TEST_CASE("zero coefficients give the identity flow on every manifold") {
  double zero[3] = {0, 0, 0};
  for (auto m : {make_rn(3), make_so3(), make_sphere2(), make_cauchy()}) {
    ManifoldPoint p;
    if (m->name() == "so3")
      p.coord = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    else if (m->name() == "cauchy")
      p.coord = {1.3, 0.4};
    else
      p.coord = {0.3, -0.2, 0.1};
    auto q = m->frozen_flow(p, std::span<const double>(zero, m->frame_dim()));
    for (int i = 0; i < 9; ++i) CHECK(q.coord[i] == p.coord[i]);
  }
}

TEST_CASE("sphere Langevin drift values") {
  ManifoldPoint p;
  p.coord = {0.0, 0.3};
  double f[2];
  sphere_langevin_drift(p, f);
  CHECK(f[0] == doctest::Approx(1.0));  // cos 0 - tan 0
  CHECK(f[1] == 0.0);
  sphere_zero_potential_drift(p, f);
  CHECK(f[0] == doctest::Approx(0.0));
  p.coord[0] = 0.4;
  sphere_zero_potential_drift(p, f);
  CHECK(f[0] == doctest::Approx(-std::tan(0.4)));
}

TEST_CASE("sphere Langevin drift matches the ambient finite-difference oracle") {
  // F = -grad V - nabla_{E1}E1 - nabla_{E2}E2 with V = -x3, all evaluated by
  // central differences of the ambient frame fields and tangential projection
  std::mt19937_64 gen(47);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  const double eps = 1e-5;
  for (int rep = 0; rep < 100; ++rep) {
    ManifoldPoint p;
    p.chart = rep % 2;
    p.coord[0] = u(gen);
    p.coord[1] = 2.0 * u(gen);
    auto x = sphere2_ambient(p);
    auto project = [&](std::array<double, 3> v) {
      double d = v[0] * x[0] + v[1] * x[1] + v[2] * x[2];
      for (int i = 0; i < 3; ++i) v[i] -= d * x[i];
      return v;
    };
    auto covariant_self = [&](bool second) {
      // nabla_E E by central difference along the field itself
      auto field = [&](const ManifoldPoint& q) {
        return second ? sphere_frame_e2(q) : sphere_frame_e1(q);
      };
      auto e = field(p);
      std::array<double, 3> xp, xm;
      for (int i = 0; i < 3; ++i) {
        xp[i] = x[i] + eps * e[i];
        xm[i] = x[i] - eps * e[i];
      }
      double np = std::sqrt(xp[0] * xp[0] + xp[1] * xp[1] + xp[2] * xp[2]);
      double nm = std::sqrt(xm[0] * xm[0] + xm[1] * xm[1] + xm[2] * xm[2]);
      for (int i = 0; i < 3; ++i) {
        xp[i] /= np;
        xm[i] /= nm;
      }
      auto ep = field(sphere2_from_ambient(xp, p.chart));
      auto em = field(sphere2_from_ambient(xm, p.chart));
      std::array<double, 3> d;
      for (int i = 0; i < 3; ++i) d[i] = (ep[i] - em[i]) / (2 * eps);
      return project(d);
    };
    std::array<double, 3> grad_v = project({0.0, 0.0, -1.0});  // ambient grad of V=-x3
    auto c1 = covariant_self(false);
    auto c2 = covariant_self(true);
    std::array<double, 3> expect{};
    for (int i = 0; i < 3; ++i) expect[i] = -grad_v[i] - c1[i] - c2[i];
    auto e1 = sphere_frame_e1(p);
    auto e2 = sphere_frame_e2(p);
    double f1 = expect[0] * e1[0] + expect[1] * e1[1] + expect[2] * e1[2];
    double f2 = expect[0] * e2[0] + expect[1] * e2[1] + expect[2] * e2[2];
    double f[2];
    sphere_langevin_drift(p, f);
    CHECK(f[0] == doctest::Approx(f1).epsilon(1e-6));
    CHECK(f[1] == doctest::Approx(f2).epsilon(1e-6));
  }
}

TEST_CASE("cauchy drift values") {
  ManifoldPoint p;
  p.coord = {1.0, 0.0};
  double f[2];
  cauchy_drift(p, 4.0, f);
  CHECK(f[0] == doctest::Approx(1.0 / std::tanh(1.0) - 7.0 * std::tanh(1.0)));
  CHECK(f[0] == doctest::Approx(-4.0181238).epsilon(1e-6));
  CHECK(f[1] == 0.0);

  p.coord[0] = 400.0;  // tanh -> 1: f1 -> 2 - 2 beta
  cauchy_drift(p, 4.0, f);
  CHECK(f[0] == doctest::Approx(-6.0));

  p.coord[0] = -1.0;
  CHECK_THROWS_AS(cauchy_drift(p, 4.0, f), DomainExitError);
}

TEST_CASE("chart normalization picks the smaller latitude") {
  auto sphere = make_sphere2();
  ManifoldPoint p;
  p.coord = {1.0, 0.1};  // |sin| = 0.84, x-latitude smaller here
  p.chart = 0;
  auto amb = sphere2_ambient(p);
  ManifoldPoint q = p;
  bool switched = sphere->normalize_chart(q);
  CHECK(switched);
  CHECK(q.chart == 1);
  auto amb2 = sphere2_ambient(q);
  for (int i = 0; i < 3; ++i) CHECK(amb[i] == doctest::Approx(amb2[i]).epsilon(1e-12));
  CHECK_FALSE(sphere->normalize_chart(q));
}
