#include "ffint/schemes.hpp"

#include <cmath>
#include <stdexcept>

namespace ffint {

NoiseSource noise_by_name(const std::string& name) {
  if (name == "gaussian") return NoiseSource::Gaussian;
  if (name == "threepoint") return NoiseSource::ThreePoint;
  if (name == "rademacher") return NoiseSource::Rademacher;
  throw std::invalid_argument("unknown noise source '" + name +
                              "' (known: gaussian, threepoint, rademacher)");
}

const char* noise_name(NoiseSource src) {
  switch (src) {
    case NoiseSource::Gaussian: return "gaussian";
    case NoiseSource::ThreePoint: return "threepoint";
    case NoiseSource::Rademacher: return "rademacher";
  }
  return "?";
}

double draw_noise(NoiseSource src, const DrawKey& key) {
  switch (src) {
    case NoiseSource::Gaussian:
      return gaussian_double(key);
    case NoiseSource::ThreePoint: {
      double u = uniform_double(key);
      if (u <= 2.0 / 3.0) return 0.0;
      return u <= 5.0 / 6.0 ? std::sqrt(3.0) : -std::sqrt(3.0);
    }
    case NoiseSource::Rademacher:
      return uniform_double(key) <= 0.5 ? 1.0 : -1.0;
  }
  return 0.0;
}

MomentReport moment_check(NoiseSource src, long long n_samples, std::uint64_t seed) {
  MomentReport rep;
  rep.empirical.assign(6, 0.0);
  std::vector<double> sumsq(6, 0.0);
  for (long long i = 0; i < n_samples; ++i) {
    DrawKey k{seed, std::uint32_t(i & 0xffffffff), std::uint32_t(i >> 32), 0, 0x4d4d4d01u};
    double x = draw_noise(src, k);
    double p = 1.0;
    for (int m = 0; m < 6; ++m) {
      p *= x;
      rep.empirical[m] += p;
      sumsq[m] += p * p;
    }
  }
  rep.stderr_est.assign(6, 0.0);
  for (int m = 0; m < 6; ++m) {
    rep.empirical[m] /= double(n_samples);
    double var = sumsq[m] / double(n_samples) - rep.empirical[m] * rep.empirical[m];
    rep.stderr_est[m] = std::sqrt(std::max(var, 0.0) / double(n_samples));
  }
  switch (src) {
    case NoiseSource::Gaussian: rep.target = {0, 1, 0, 3, 0, 15}; break;
    case NoiseSource::ThreePoint: rep.target = {0, 1, 0, 3, 0, 9}; break;
    case NoiseSource::Rademacher: rep.target = {0, 1, 0, 1, 0, 1}; break;
  }
  return rep;
}

ManifoldPoint tableau_step(const Problem& prob, const Tableau& t, const ManifoldPoint& x,
                           double h, std::span<const double> xi) {
  const int D = prob.frame_dim();
  const double sh = prob.noise_scale * std::sqrt(h);

  // which stages feed a drift evaluation anywhere
  thread_local std::vector<char> referenced;
  thread_local std::vector<double> drifts;
  thread_local std::vector<ManifoldPoint> stage_points;
  referenced.assign(t.s, 0);
  for (int i = 0; i < t.s; ++i)
    for (int k = 0; k < t.K; ++k) {
      if (t.z0_at(i, k) != 0.0) referenced[i] = 1;
      for (int i2 = 0; i2 < t.s; ++i2)
        if (t.Z0_at(i2, i, k) != 0.0) referenced[i] = 1;
    }

  drifts.assign(std::size_t(t.s) * D, 0.0);
  stage_points.assign(t.s, x);
  std::array<double, 9> coeff{};

  auto exponential = [&](ManifoldPoint y, int stage_or_final, int k) {
    // stage_or_final: stage index, or -1 for the final update
    bool any = false;
    for (int d = 0; d < D; ++d) {
      double v = 0.0;
      if (stage_or_final < 0) {
        for (int i = 0; i < t.s; ++i)
          if (double w = t.z0_at(i, k); w != 0.0) v += h * w * drifts[std::size_t(i) * D + d];
        for (int l = 0; l < t.L; ++l)
          if (double w = t.zhat_at(k, l); w != 0.0) v += sh * w * xi[std::size_t(l) * D + d];
      } else {
        int i = stage_or_final;
        for (int j = 0; j < t.s; ++j)
          if (double w = t.Z0_at(i, j, k); w != 0.0) v += h * w * drifts[std::size_t(j) * D + d];
        for (int l = 0; l < t.L; ++l)
          if (double w = t.Zhat_at(i, k, l); w != 0.0) v += sh * w * xi[std::size_t(l) * D + d];
      }
      coeff[d] = v;
      any = any || v != 0.0;
    }
    if (!any) return y;
    return prob.manifold->frozen_flow(y, std::span<const double>(coeff.data(), D));
  };

  for (int i = 0; i < t.s; ++i) {
    ManifoldPoint y = x;
    for (int k = 0; k < t.K; ++k)
      if (t.stage_exp_used(i, k)) y = exponential(y, i, k);
    stage_points[i] = y;
    if (referenced[i])
      prob.drift(stage_points[i], std::span<double>(drifts.data() + std::size_t(i) * D, D));
  }

  ManifoldPoint y = x;
  for (int k = 0; k < t.K; ++k)
    if (t.final_exp_used(k)) y = exponential(y, -1, k);
  return y;
}

ManifoldPoint geodesic_langevin_step(const Problem& prob, const ManifoldPoint& x, double h,
                                     std::span<const double> xi) {
  if (prob.manifold->name() != "sphere2")
    throw std::invalid_argument("geodesic_langevin: sphere2 only");
  // v = -h grad V + sqrt(2h) xi in the orthonormal frame; great-circle exp
  double th = x.coord[0], ph = x.coord[1];
  double vs = prob.sphere_potential;  // V = -vs * x3
  double gv1, gv2;
  if (x.chart == 0) {
    gv1 = -vs * std::cos(th);
    gv2 = 0.0;
  } else {
    gv1 = vs * std::sin(th) * std::sin(ph);
    gv2 = -vs * std::cos(ph);
  }
  double s2h = std::sqrt(2.0 * h);
  double v1 = -h * gv1 + s2h * xi[0];
  double v2 = -h * gv2 + s2h * xi[1];

  auto p = sphere2_ambient(x);
  // frame vectors in ambient coordinates for the active chart
  std::array<double, 3> e1, e2;
  double ct = std::cos(th), st = std::sin(th), cp = std::cos(ph), sp = std::sin(ph);
  if (x.chart == 0) {
    e1 = {-st * cp, -st * sp, ct};
    e2 = {-sp, cp, 0.0};
  } else {
    e1 = {ct, -st * cp, -st * sp};
    e2 = {0.0, -sp, cp};
  }
  std::array<double, 3> v{};
  for (int i = 0; i < 3; ++i) v[i] = v1 * e1[i] + v2 * e2[i];
  double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  std::array<double, 3> q;
  if (norm < 1e-300) {
    q = p;
  } else {
    double cn = std::cos(norm), sn = std::sin(norm);
    for (int i = 0; i < 3; ++i) q[i] = cn * p[i] + sn * v[i] / norm;
  }
  double qn = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]);
  for (auto& c : q) c /= qn;
  return sphere2_from_ambient(q, x.chart);
}

ManifoldPoint projection_euler_step(const Problem& prob, const ManifoldPoint& x, double h,
                                    std::span<const double> xi) {
  if (prob.manifold->name() != "sphere2")
    throw std::invalid_argument("projection_euler: sphere2 only");
  // ambient Euler step of the embedded Ito dynamics (drift -grad V - 2x for
  // this noise scale) with full 3d noise, then radial projection
  auto p = sphere2_ambient(x);
  double s2h = std::sqrt(2.0 * h);
  std::array<double, 3> q;
  q[0] = p[0] - 2.0 * h * p[0] + s2h * xi[0];
  q[1] = p[1] - 2.0 * h * p[1] + s2h * xi[1];
  q[2] = p[2] - 2.0 * h * p[2] + h * prob.sphere_potential + s2h * xi[2];
  double n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]);
  if (n < 1e-12) throw GeometryError("projection_euler: step collapsed to the origin");
  for (auto& c : q) c /= n;
  return sphere2_from_ambient(q, x.chart);
}

int Scheme::draws_per_step(int frame_dim) const {
  switch (kind) {
    case SchemeKind::TableauScheme: return tableau.L * frame_dim;
    case SchemeKind::GeodesicLangevin: return 2;
    case SchemeKind::ProjectionEuler: return 3;
  }
  return 0;
}

Scheme scheme_by_name(const std::string& name) {
  Scheme s;
  s.name = name;
  if (name == "euler_ff") {
    s.tableau = euler_ff_tableau();
    return s;
  }
  if (name == "sff2") {
    s.tableau = sff2_tableau();
    return s;
  }
  if (name == "brownian2") {
    s.tableau = brownian2_lie_tableau();
    s.default_noise = NoiseSource::ThreePoint;
    return s;
  }
  if (name == "geodesic_langevin") {
    s.kind = SchemeKind::GeodesicLangevin;
    return s;
  }
  if (name == "projection_euler") {
    s.kind = SchemeKind::ProjectionEuler;
    return s;
  }
  std::string msg = "unknown scheme '" + name + "' (known:";
  for (const auto& n : scheme_names()) msg += " " + n;
  throw std::invalid_argument(msg + ")");
}

std::vector<std::string> scheme_names() {
  return {"euler_ff", "sff2", "brownian2", "geodesic_langevin", "projection_euler"};
}

ManifoldPoint scheme_step(const Problem& prob, const Scheme& s, const ManifoldPoint& x, double h,
                          std::span<const double> xi) {
  switch (s.kind) {
    case SchemeKind::TableauScheme: return tableau_step(prob, s.tableau, x, h, xi);
    case SchemeKind::GeodesicLangevin: return geodesic_langevin_step(prob, x, h, xi);
    case SchemeKind::ProjectionEuler: return projection_euler_step(prob, x, h, xi);
  }
  throw std::logic_error("scheme_step: bad kind");
}

ManifoldPoint run_step(const Problem& prob, const Scheme& s, NoiseSource noise,
                       const ManifoldPoint& x, double h, std::uint64_t seed,
                       std::uint32_t trajectory, std::uint32_t step, StepStats& stats) {
  const int draws = s.draws_per_step(prob.frame_dim());
  thread_local std::vector<double> xi;
  xi.resize(draws);
  constexpr int kMaxAttempts = 64;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    for (int q = 0; q < draws; ++q)
      xi[q] = draw_noise(
          noise, DrawKey{seed, trajectory, step, std::uint32_t(attempt * draws + q), 0});
    try {
      ManifoldPoint y = scheme_step(prob, s, x, h, xi);
      if (prob.manifold->normalize_chart(y)) ++stats.chart_switches;
      ++stats.steps;
      return y;
    } catch (const GeometryError&) {
      ++stats.resamples;
    }
  }
  throw GeometryError("run_step: resample attempts exhausted");
}

}  // namespace ffint
