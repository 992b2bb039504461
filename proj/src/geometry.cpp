#include "ffint/geometry.hpp"

#include <cmath>

namespace ffint {

namespace {

constexpr double kPoleMargin = 1e-9;

using Mat3 = std::array<double, 9>;

Mat3 matmul(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += a[3 * i + k] * b[3 * k + j];
      r[3 * i + j] = s;
    }
  return r;
}

class RnManifold final : public Manifold {
 public:
  explicit RnManifold(int dim) : dim_(dim), name_("rn") {
    if (dim < 1 || dim > 9) throw std::invalid_argument("rn: dimension must be 1..9");
  }
  const std::string& name() const override { return name_; }
  int frame_dim() const override { return dim_; }
  ManifoldPoint frozen_flow(const ManifoldPoint& p, std::span<const double> c) const override {
    ManifoldPoint q = p;
    for (int d = 0; d < dim_; ++d) q.coord[d] += c[d];
    return q;
  }

 private:
  int dim_;
  std::string name_;
};

class So3Manifold final : public Manifold {
 public:
  So3Manifold() : name_("so3") {}
  const std::string& name() const override { return name_; }
  int frame_dim() const override { return 3; }

  ManifoldPoint frozen_flow(const ManifoldPoint& p, std::span<const double> c) const override {
    // Omega = sum_d c_d A_d has entries (0,1)=c0, (0,2)=c1, (1,2)=c2, all
    // over sqrt(2); Rodrigues with angle theta = |c| / sqrt(2).
    const double s = 1.0 / std::sqrt(2.0);
    double a = c[0] * s, b = c[1] * s, cc = c[2] * s;
    Mat3 omega = {0, a, b, -a, 0, cc, -b, -cc, 0};
    double theta2 = a * a + b * b + cc * cc;
    double theta = std::sqrt(theta2);
    double k1, k2;  // sin(t)/t and (1-cos(t))/t^2
    if (theta < 1e-6) {
      k1 = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
      k2 = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
    } else {
      k1 = std::sin(theta) / theta;
      k2 = (1.0 - std::cos(theta)) / theta2;
    }
    Mat3 omega2 = matmul(omega, omega);
    Mat3 expm;
    for (int i = 0; i < 9; ++i) expm[i] = k1 * omega[i] + k2 * omega2[i];
    expm[0] += 1.0;
    expm[4] += 1.0;
    expm[8] += 1.0;
    ManifoldPoint q;
    q.coord = matmul(expm, p.coord);
    if (so3_orthogonality_defect(q) > 1e-10) reorthonormalize(q);
    return q;
  }

 private:
  static void reorthonormalize(ManifoldPoint& p) {
    // Gram-Schmidt on rows
    double* m = p.coord.data();
    auto row = [&](int i) { return m + 3 * i; };
    auto dot = [](const double* a, const double* b) {
      return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    };
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < i; ++j) {
        double d = dot(row(i), row(j));
        for (int k = 0; k < 3; ++k) row(i)[k] -= d * row(j)[k];
      }
      double n = std::sqrt(dot(row(i), row(i)));
      for (int k = 0; k < 3; ++k) row(i)[k] /= n;
    }
  }

  std::string name_;
};

// Inverse Gudermannian: integral of 1/cos on latitudes.
double gd_inverse(double theta) { return std::asinh(std::tan(theta)); }

class Sphere2Manifold final : public Manifold {
 public:
  Sphere2Manifold() : name_("sphere2") {}
  const std::string& name() const override { return name_; }
  int frame_dim() const override { return 2; }

  ManifoldPoint frozen_flow(const ManifoldPoint& p, std::span<const double> c) const override {
    double th0 = p.coord[0], ph0 = p.coord[1];
    double th1 = th0 + c[0];
    if (std::abs(th0) >= M_PI_2 - kPoleMargin || std::abs(th1) >= M_PI_2 - kPoleMargin)
      throw ChartError("sphere2: frozen flow crosses a chart pole");
    double ph1;
    if (std::abs(c[0]) < 1e-8) {
      ph1 = ph0 + c[1] / std::cos(th0);
    } else {
      ph1 = ph0 + (c[1] / c[0]) * (gd_inverse(th1) - gd_inverse(th0));
    }
    ManifoldPoint q = p;
    q.coord[0] = th1;
    q.coord[1] = ph1;
    return q;
  }

  bool normalize_chart(ManifoldPoint& p) const override {
    auto x = sphere2_ambient(p);
    // |sin theta| is |x3| in chart 0 and |x1| in chart 1
    double cur = p.chart == 0 ? std::abs(x[2]) : std::abs(x[0]);
    double other = p.chart == 0 ? std::abs(x[0]) : std::abs(x[2]);
    if (cur > 0.7 && other < cur) {
      p = sphere2_from_ambient(x, p.chart == 0 ? 1 : 0);
      return true;
    }
    return false;
  }

 private:
  std::string name_;
};

double logsinh(double r) {
  if (r > 20.0) return r + std::log1p(-std::exp(-2.0 * r)) - std::log(2.0);
  return std::log(std::sinh(r));
}

class CauchyManifold final : public Manifold {
 public:
  CauchyManifold() : name_("cauchy") {}
  const std::string& name() const override { return name_; }
  int frame_dim() const override { return 2; }

  ManifoldPoint frozen_flow(const ManifoldPoint& p, std::span<const double> c) const override {
    double r0 = p.coord[0], th0 = p.coord[1];
    if (r0 <= 0) throw DomainExitError("cauchy: r must be positive");
    double r1 = r0 + c[0];
    if (r1 <= 1e-9) throw DomainExitError("cauchy: frozen flow exits r > 0");
    double th1;
    if (std::abs(c[0]) < 1e-8) {
      th1 = th0 + c[1] / std::tanh(r0);
    } else {
      th1 = th0 + (c[1] / c[0]) * (logsinh(r1) - logsinh(r0));
    }
    ManifoldPoint q = p;
    q.coord[0] = r1;
    q.coord[1] = th1;
    return q;
  }

 private:
  std::string name_;
};

}  // namespace

std::shared_ptr<const Manifold> make_rn(int dim) { return std::make_shared<RnManifold>(dim); }
std::shared_ptr<const Manifold> make_so3() { return std::make_shared<So3Manifold>(); }
std::shared_ptr<const Manifold> make_sphere2() { return std::make_shared<Sphere2Manifold>(); }
std::shared_ptr<const Manifold> make_cauchy() { return std::make_shared<CauchyManifold>(); }

std::shared_ptr<const Manifold> manifold_by_name(const std::string& name, int rn_dim) {
  if (name == "rn") return make_rn(rn_dim);
  if (name == "so3") return make_so3();
  if (name == "sphere2") return make_sphere2();
  if (name == "cauchy") return make_cauchy();
  throw std::invalid_argument("unknown manifold '" + name +
                              "' (known: rn, so3, sphere2, cauchy)");
}

std::array<std::array<double, 9>, 3> so3_basis() {
  const double s = 1.0 / std::sqrt(2.0);
  std::array<std::array<double, 9>, 3> basis{};
  auto set = [&](int d, int i, int j) {
    basis[d][3 * i + j] = s;
    basis[d][3 * j + i] = -s;
  };
  set(0, 0, 1);
  set(1, 0, 2);
  set(2, 1, 2);
  return basis;
}

double so3_orthogonality_defect(const ManifoldPoint& p) {
  const auto& m = p.coord;
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += m[3 * k + i] * m[3 * k + j];
      worst += (s - (i == j ? 1.0 : 0.0)) * (s - (i == j ? 1.0 : 0.0));
    }
  return std::sqrt(worst);
}

std::array<double, 3> sphere2_ambient(const ManifoldPoint& p) {
  double th = p.coord[0], ph = p.coord[1];
  double x = std::cos(th) * std::cos(ph);
  double y = std::cos(th) * std::sin(ph);
  double z = std::sin(th);
  if (p.chart == 0) return {x, y, z};
  // chart 1: latitude measured toward +x, longitude in the (y,z) plane
  return {z, x, y};
}

ManifoldPoint sphere2_from_ambient(const std::array<double, 3>& x, int chart) {
  ManifoldPoint p;
  p.chart = static_cast<std::uint8_t>(chart);
  if (chart == 0) {
    p.coord[0] = std::asin(std::clamp(x[2], -1.0, 1.0));
    p.coord[1] = std::atan2(x[1], x[0]);
  } else {
    p.coord[0] = std::asin(std::clamp(x[0], -1.0, 1.0));
    p.coord[1] = std::atan2(x[2], x[1]);
  }
  return p;
}

void sphere_langevin_drift(const ManifoldPoint& p, std::span<double> f) {
  double th = p.coord[0], ph = p.coord[1];
  if (p.chart == 0) {
    // -grad V = cos(theta) E1 for V = -x3; connection correction -tan(theta) E1
    f[0] = std::cos(th) - std::tan(th);
    f[1] = 0.0;
  } else {
    // x3 = cos(theta) sin(phi) in this chart
    f[0] = -std::sin(th) * std::sin(ph) - std::tan(th);
    f[1] = std::cos(ph);
  }
}

void sphere_zero_potential_drift(const ManifoldPoint& p, std::span<double> f) {
  f[0] = -std::tan(p.coord[0]);
  f[1] = 0.0;
}

void cauchy_drift(const ManifoldPoint& p, double beta, std::span<double> f) {
  double r = p.coord[0];
  if (r <= 0) throw DomainExitError("cauchy_drift: r must be positive");
  f[0] = 1.0 / std::tanh(r) - (2.0 * beta - 1.0) * std::tanh(r);
  f[1] = 0.0;
}

Problem so3_brownian_problem() {
  Problem prob;
  prob.manifold = make_so3();
  prob.drift = [](const ManifoldPoint&, std::span<double> f) { f[0] = f[1] = f[2] = 0.0; };
  // unit-noise Brownian dynamics: the tableaux carry sqrt(2)-convention rows
  prob.noise_scale = 1.0 / std::sqrt(2.0);
  prob.name = "so3_brownian";
  return prob;
}

Problem sphere_langevin_problem() {
  Problem prob;
  prob.manifold = make_sphere2();
  prob.drift = [](const ManifoldPoint& p, std::span<double> f) { sphere_langevin_drift(p, f); };
  prob.noise_scale = 1.0;
  prob.name = "sphere_langevin";
  prob.sphere_potential = 1.0;
  return prob;
}

Problem sphere_uniform_problem() {
  Problem prob;
  prob.manifold = make_sphere2();
  prob.drift = [](const ManifoldPoint& p, std::span<double> f) {
    sphere_zero_potential_drift(p, f);
  };
  prob.noise_scale = 1.0;
  prob.name = "sphere_uniform";
  return prob;
}

Problem cauchy_problem(double beta) {
  Problem prob;
  prob.manifold = make_cauchy();
  prob.drift = [beta](const ManifoldPoint& p, std::span<double> f) {
    cauchy_drift(p, beta, f);
  };
  prob.noise_scale = 1.0;
  prob.name = "cauchy";
  return prob;
}

Problem rn_problem(int dim, std::function<void(const ManifoldPoint&, std::span<double>)> drift,
                   double noise_scale) {
  Problem prob;
  prob.manifold = make_rn(dim);
  if (drift) {
    prob.drift = std::move(drift);
  } else {
    prob.drift = [dim](const ManifoldPoint&, std::span<double> f) {
      for (int d = 0; d < dim; ++d) f[d] = 0.0;
    };
  }
  prob.noise_scale = noise_scale;
  prob.name = "rn";
  return prob;
}

}  // namespace ffint
