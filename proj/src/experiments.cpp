#include "ffint/experiments.hpp"

#include "ffint/rng.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace ffint {

namespace {

constexpr long long kBlock = 1024;

void fit_error_slope(ErrorTable& table);

// Neumaier compensated accumulator.
struct Accum {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double total() const { return sum + comp; }
};

long long steps_for(double T, double h) {
  long long n = std::llround(T / h);
  if (n < 1 || std::abs(double(n) * h - T) > 1e-9 * std::max(1.0, std::abs(T)))
    throw std::invalid_argument("step size must divide the final time");
  return n;
}

struct AtomicStats {
  std::atomic<long long> chart_switches{0};
  std::atomic<long long> resamples{0};
  std::atomic<long long> steps{0};

  void absorb(const StepStats& s) {
    chart_switches.fetch_add(s.chart_switches, std::memory_order_relaxed);
    resamples.fetch_add(s.resamples, std::memory_order_relaxed);
    steps.fetch_add(s.steps, std::memory_order_relaxed);
  }
  StepStats snapshot() const {
    return {chart_switches.load(), resamples.load(), steps.load()};
  }
};

ManifoldPoint initial_point(const Problem& prob, const ExperimentConfig& cfg) {
  ManifoldPoint x;
  const std::string& m = prob.manifold->name();
  if (m == "so3") {
    x.coord = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  } else if (m == "sphere2") {
    x.coord = {0.0, 0.0};
  } else if (m == "cauchy") {
    x.coord = {cfg.x0_r, cfg.x0_theta};
  }
  prob.manifold->normalize_chart(x);
  return x;
}

Problem problem_for(const ExperimentConfig& cfg) {
  if (cfg.experiment == "so3_weak") return so3_brownian_problem();
  if (cfg.experiment == "sphere_ergodic") return sphere_langevin_problem();
  if (cfg.experiment == "cauchy_decay") return cauchy_problem(cfg.beta);
  throw std::invalid_argument("unknown experiment '" + cfg.experiment +
                              "' (known: so3_weak, sphere_ergodic, cauchy_decay)");
}

std::string default_test_function(const ExperimentConfig& cfg) {
  if (cfg.experiment == "so3_weak") return "so3_gauss_trace";
  if (cfg.experiment == "sphere_ergodic") return "sphere_x3sq";
  return "cauchy_phi1";
}

struct SingleRun {
  double estimate = 0;
  double mc_stderr = 0;
};

// E[phi(X_N)] for one (scheme, h) pair; with time_average the test function
// is averaged over the second half of the trajectory.
SingleRun mc_final_value(const Problem& prob, const Scheme& scheme, NoiseSource noise,
                         const ManifoldPoint& x0, double T, double h,
                         const std::function<double(const ManifoldPoint&)>& phi,
                         const ExperimentConfig& cfg, AtomicStats& stats,
                         bool time_average = false) {
  long long n_steps = steps_for(T, h);
  if (n_steps > 0x7fffffffLL) throw std::invalid_argument("too many steps");
  long long first_sample = time_average ? (n_steps + 1) / 2 : n_steps;
  auto body = [&](std::uint32_t traj, std::span<double> out) {
    StepStats local;
    ManifoldPoint x = x0;
    double acc = 0.0;
    long long count = 0;
    for (long long n = 0; n < n_steps; ++n) {
      x = run_step(prob, scheme, noise, x, h, cfg.seed, traj, std::uint32_t(n), local);
      if (n + 1 >= first_sample) {
        acc += phi(x);
        ++count;
      }
    }
    out[0] = acc / double(count);
    stats.absorb(local);
  };
  double mean = 0, se = 0;
  mc_reduce(cfg.trajectories, 1, cfg.threads, body, std::span(&mean, 1), std::span(&se, 1));
  return {mean, se};
}

// Per-channel first-order noise weight of one step (row sums of zhat); the
// step's Brownian increment is noise_scale * sqrt(h) * sum_l u_l xi^l.
std::vector<double> brownian_weights(const Tableau& t) {
  std::vector<double> u(t.L, 0.0);
  for (int l = 0; l < t.L; ++l)
    for (int k = 0; k < t.K; ++k) u[l] += t.zhat_at(k, l);
  return u;
}

double norm2(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return s;
}

bool coupling_applies(const ExperimentConfig& cfg, const Scheme& scheme, const Scheme& ref,
                      NoiseSource noise, NoiseSource ref_noise) {
  if (!cfg.coupled) return false;
  if (scheme.kind != SchemeKind::TableauScheme || ref.kind != SchemeKind::TableauScheme)
    return false;
  if (noise != NoiseSource::Gaussian || ref_noise != NoiseSource::Gaussian) return false;
  auto u_ref = brownian_weights(ref.tableau);
  auto u = brownian_weights(scheme.tableau);
  if (std::abs(norm2(u_ref) - norm2(u)) > 1e-9) return false;
  for (double h : cfg.h_list) {
    double k = h / cfg.ref_h;
    if (std::abs(k - std::llround(k)) > 1e-9 || std::llround(k) < 1) return false;
  }
  return true;
}

// Coupled weak-error estimator: one reference sweep per trajectory; each
// coarse path consumes the reference path's aggregated Brownian increment,
// completed to the scheme's iid channel variables by exact Gaussian
// conditioning, so E[phi(coarse) - phi(fine)] is estimated with strongly
// correlated paths.
ErrorTable run_weak_error_coupled(const ExperimentConfig& cfg, const Problem& prob,
                                  const Scheme& scheme, const Scheme& ref,
                                  const std::function<double(const ManifoldPoint&)>& phi,
                                  const ManifoldPoint& x0, AtomicStats& stats) {
  const int D = prob.frame_dim();
  const int n_h = int(cfg.h_list.size());
  const long long n_ref_steps = steps_for(cfg.T, cfg.ref_h);
  const int L_ref = ref.tableau.L;
  const auto u_ref = brownian_weights(ref.tableau);
  const auto u = brownian_weights(scheme.tableau);
  const double unorm2 = norm2(u);
  const int L = scheme.tableau.L;
  std::vector<long long> ratio(n_h);
  for (int j = 0; j < n_h; ++j) ratio[j] = std::llround(cfg.h_list[j] / cfg.ref_h);

  auto body = [&](std::uint32_t traj, std::span<double> out) {
    StepStats local;
    ManifoldPoint fine = x0;
    std::vector<ManifoldPoint> coarse(n_h, x0);
    std::vector<double> window(std::size_t(n_h) * D, 0.0);
    std::vector<long long> coarse_idx(n_h, 0);
    std::vector<double> xi(std::size_t(L_ref) * D), eta(std::size_t(L) * D);
    for (long long n = 0; n < n_ref_steps; ++n) {
      for (int q = 0; q < L_ref * D; ++q)
        xi[q] = gaussian_double(DrawKey{cfg.seed, traj, std::uint32_t(n), std::uint32_t(q), 0});
      for (int j = 0; j < n_h; ++j)
        for (int d = 0; d < D; ++d) {
          double s = 0;
          for (int l = 0; l < L_ref; ++l) s += u_ref[l] * xi[std::size_t(l) * D + d];
          window[std::size_t(j) * D + d] += s;
        }
      fine = tableau_step(prob, ref.tableau, fine, cfg.ref_h, xi);
      ++local.steps;
      for (int j = 0; j < n_h; ++j) {
        if ((n + 1) % ratio[j] != 0) continue;
        double inv_sqrt_k = 1.0 / std::sqrt(double(ratio[j]));
        for (int q = 0; q < L * D; ++q)
          eta[q] = gaussian_double(DrawKey{cfg.seed, traj, std::uint32_t(coarse_idx[j]),
                                           std::uint32_t(q), std::uint32_t(16 + j)});
        for (int d = 0; d < D; ++d) {
          double t_d = window[std::size_t(j) * D + d] * inv_sqrt_k;
          double ug = 0;
          for (int l = 0; l < L; ++l) ug += u[l] * eta[std::size_t(l) * D + d];
          double shift = (t_d - ug) / unorm2;
          for (int l = 0; l < L; ++l) eta[std::size_t(l) * D + d] += u[l] * shift;
        }
        coarse[j] = tableau_step(prob, scheme.tableau, coarse[j], cfg.h_list[j], eta);
        std::fill(window.begin() + std::size_t(j) * D,
                  window.begin() + std::size_t(j) * D + D, 0.0);
        ++coarse_idx[j];
        ++local.steps;
      }
    }
    double phi_fine = phi(fine);
    for (int j = 0; j < n_h; ++j) out[j] = phi(coarse[j]) - phi_fine;
    out[n_h] = phi_fine;
    stats.absorb(local);
  };

  std::vector<double> means(n_h + 1), ses(n_h + 1);
  mc_reduce(cfg.trajectories, n_h + 1, cfg.threads, body, means, ses);

  ErrorTable table;
  for (int j = 0; j < n_h; ++j) {
    ErrorRow row;
    row.h = cfg.h_list[j];
    row.reference = means[n_h];
    row.estimate = means[n_h] + means[j];
    row.abs_error = std::abs(means[j]);
    row.mc_stderr = ses[j];
    table.rows.push_back(row);
  }
  if (n_h > 1) fit_error_slope(table);
  table.stats = stats.snapshot();
  return table;
}

void fit_error_slope(ErrorTable& table) {
  std::vector<double> xs, ys;
  for (auto& row : table.rows) {
    row.at_mc_floor = row.abs_error <= 3.0 * row.mc_stderr;
    if (!row.at_mc_floor && row.abs_error > 0) {
      xs.push_back(std::log(row.h));
      ys.push_back(std::log(row.abs_error));
    }
  }
  table.slope_points = static_cast<int>(xs.size());
  if (xs.size() >= 2) table.slope = estimate_slope(xs, ys);
}

}  // namespace

void mc_reduce(long long trajectories, int n_obs, int threads,
               const std::function<void(std::uint32_t, std::span<double>)>& body,
               std::span<double> means, std::span<double> stderrs) {
  if (trajectories < 1) throw std::invalid_argument("mc_reduce: need at least one trajectory");
  long long n_blocks = (trajectories + kBlock - 1) / kBlock;
  // per block: compensated sums and sums of squares per observable
  std::vector<std::vector<double>> block_sums(n_blocks);
  std::atomic<long long> next{0};

  int n_workers = threads > 0 ? threads : int(std::thread::hardware_concurrency());
  if (n_workers < 1) n_workers = 1;
  n_workers = int(std::min<long long>(n_workers, n_blocks));

  auto work = [&]() {
    std::vector<double> values(n_obs);
    std::vector<Accum> sums(n_obs), squares(n_obs);
    for (;;) {
      long long b = next.fetch_add(1, std::memory_order_relaxed);
      if (b >= n_blocks) break;
      for (auto& a : sums) a = Accum{};
      for (auto& a : squares) a = Accum{};
      long long lo = b * kBlock, hi = std::min(trajectories, lo + kBlock);
      for (long long traj = lo; traj < hi; ++traj) {
        body(std::uint32_t(traj), values);
        for (int i = 0; i < n_obs; ++i) {
          sums[i].add(values[i]);
          squares[i].add(values[i] * values[i]);
        }
      }
      auto& out = block_sums[b];
      out.resize(2 * std::size_t(n_obs));
      for (int i = 0; i < n_obs; ++i) {
        out[2 * i] = sums[i].total();
        out[2 * i + 1] = squares[i].total();
      }
    }
  };

  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  for (int i = 0; i < n_obs; ++i) {
    Accum s, s2;
    for (long long b = 0; b < n_blocks; ++b) {
      s.add(block_sums[b][2 * i]);
      s2.add(block_sums[b][2 * i + 1]);
    }
    double m = s.total() / double(trajectories);
    means[i] = m;
    double var = 0.0;
    if (trajectories > 1) {
      var = (s2.total() - double(trajectories) * m * m) / double(trajectories - 1);
      var = std::max(var, 0.0);
    }
    stderrs[i] = std::sqrt(var / double(trajectories));
  }
}

double estimate_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("estimate_slope: need at least two points");
  double n = double(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0) throw std::invalid_argument("estimate_slope: degenerate window");
  return (n * sxy - sx * sy) / denom;
}

double sphere_stationary_x3sq() { return 3.0 - 2.0 / std::tanh(1.0); }

std::function<double(const ManifoldPoint&)> test_function_by_name(const std::string& name,
                                                                  double beta) {
  if (name == "so3_gauss_trace") {
    return [](const ManifoldPoint& p) {
      double fro2 = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double v = p.coord[3 * i + j] - (i == j ? 1.0 : 0.0);
          fro2 += v * v;
        }
      return std::exp(-fro2 / 6.0);
    };
  }
  if (name == "sphere_x3sq") {
    return [](const ManifoldPoint& p) {
      auto x = sphere2_ambient(p);
      return x[2] * x[2];
    };
  }
  if (name == "cauchy_phi1") {
    if (beta <= 2.0) throw std::invalid_argument("cauchy_phi1 needs beta > 2");
    double c = 1.0 / (beta - 2.0);
    return [c](const ManifoldPoint& p) {
      double s = std::sinh(p.coord[0]);
      return s * s - c;
    };
  }
  if (name == "cauchy_phi2") {
    return [](const ManifoldPoint& p) { return std::sinh(p.coord[0]) * std::cos(p.coord[1]); };
  }
  if (name == "rn_x1sq") {
    return [](const ManifoldPoint& p) { return p.coord[0] * p.coord[0]; };
  }
  throw std::invalid_argument("unknown test function '" + name +
                              "' (known: so3_gauss_trace, sphere_x3sq, cauchy_phi1, "
                              "cauchy_phi2, rn_x1sq)");
}

ErrorTable run_weak_error(const ExperimentConfig& cfg) {
  if (cfg.h_list.empty()) throw std::invalid_argument("run_weak_error: empty h list");
  Problem prob = problem_for(cfg);
  Scheme scheme = scheme_by_name(cfg.scheme);
  NoiseSource noise = cfg.noise.empty() ? scheme.default_noise : noise_by_name(cfg.noise);
  auto phi = test_function_by_name(
      cfg.test_function.empty() ? default_test_function(cfg) : cfg.test_function, cfg.beta);
  ManifoldPoint x0 = initial_point(prob, cfg);
  AtomicStats stats;

  double reference = cfg.closed_form;
  double ref_se = 0.0;
  if (!cfg.ref_scheme.empty()) {
    if (cfg.ref_h <= 0) throw std::invalid_argument("run_weak_error: ref_h must be positive");
    Scheme ref = scheme_by_name(cfg.ref_scheme);
    NoiseSource ref_noise = cfg.noise.empty() ? ref.default_noise : noise_by_name(cfg.noise);
    if (coupling_applies(cfg, scheme, ref, noise, ref_noise))
      return run_weak_error_coupled(cfg, prob, scheme, ref, phi, x0, stats);
    SingleRun r = mc_final_value(prob, ref, ref_noise, x0, cfg.T, cfg.ref_h, phi, cfg, stats);
    reference = r.estimate;
    ref_se = r.mc_stderr;
  } else if (std::isnan(reference)) {
    throw std::invalid_argument("run_weak_error: need ref_scheme or closed_form");
  }

  ErrorTable table;
  for (double h : cfg.h_list) {
    SingleRun r = mc_final_value(prob, scheme, noise, x0, cfg.T, h, phi, cfg, stats);
    ErrorRow row;
    row.h = h;
    row.estimate = r.estimate;
    row.reference = reference;
    row.abs_error = std::abs(r.estimate - reference);
    row.mc_stderr = std::sqrt(r.mc_stderr * r.mc_stderr + ref_se * ref_se);
    table.rows.push_back(row);
  }
  if (cfg.h_list.size() > 1) fit_error_slope(table);
  table.stats = stats.snapshot();
  return table;
}

ErrorTable run_sphere_ergodic(const ExperimentConfig& cfg) {
  if (cfg.h_list.empty()) throw std::invalid_argument("run_sphere_ergodic: empty h list");
  Problem prob = problem_for(cfg);
  Scheme scheme = scheme_by_name(cfg.scheme);
  NoiseSource noise = cfg.noise.empty() ? scheme.default_noise : noise_by_name(cfg.noise);
  auto phi = test_function_by_name(
      cfg.test_function.empty() ? "sphere_x3sq" : cfg.test_function, cfg.beta);
  ManifoldPoint x0 = initial_point(prob, cfg);
  AtomicStats stats;

  double reference = std::isnan(cfg.closed_form) ? sphere_stationary_x3sq() : cfg.closed_form;
  ErrorTable table;
  for (double h : cfg.h_list) {
    SingleRun r = mc_final_value(prob, scheme, noise, x0, cfg.T, h, phi, cfg, stats,
                                 /*time_average=*/true);
    ErrorRow row;
    row.h = h;
    row.estimate = r.estimate;
    row.reference = reference;
    row.abs_error = std::abs(r.estimate - reference);
    row.mc_stderr = r.mc_stderr;
    table.rows.push_back(row);
  }
  if (cfg.h_list.size() > 1) fit_error_slope(table);
  table.stats = stats.snapshot();
  return table;
}

DecaySeries run_cauchy_ergodic(const ExperimentConfig& cfg) {
  if (cfg.h_list.size() != 1)
    throw std::invalid_argument("run_cauchy_ergodic: exactly one step size");
  if (cfg.beta <= 2.0) throw std::invalid_argument("run_cauchy_ergodic: beta > 2 required");
  double h = cfg.h_list[0];
  Problem prob = problem_for(cfg);
  Scheme scheme = scheme_by_name(cfg.scheme);
  NoiseSource noise = cfg.noise.empty() ? NoiseSource::Rademacher : noise_by_name(cfg.noise);
  auto phi = test_function_by_name(
      cfg.test_function.empty() ? "cauchy_phi1" : cfg.test_function, cfg.beta);
  ManifoldPoint x0 = initial_point(prob, cfg);
  long long n_steps = steps_for(cfg.T, h);
  int n_obs = int(n_steps) + 1;
  AtomicStats stats;

  auto body = [&](std::uint32_t traj, std::span<double> out) {
    StepStats local;
    ManifoldPoint x = x0;
    out[0] = phi(x);
    for (long long n = 0; n < n_steps; ++n) {
      x = run_step(prob, scheme, noise, x, h, cfg.seed, traj, std::uint32_t(n), local);
      out[n + 1] = phi(x);
    }
    stats.absorb(local);
  };
  std::vector<double> means(n_obs), ses(n_obs);
  mc_reduce(cfg.trajectories, n_obs, cfg.threads, body, means, ses);

  DecaySeries series;
  for (int i = 0; i < n_obs; ++i)
    series.rows.push_back({double(i) * h, means[i], std::abs(means[i]), ses[i]});
  series.stats = stats.snapshot();
  series.resample_rate =
      series.stats.steps > 0 ? double(series.stats.resamples) / double(series.stats.steps) : 0.0;
  series.flagged = series.resample_rate > 0.01;

  // fit the exponential rate on the consecutive prefix above the noise and
  // bias floors
  double tail = 0.0;
  int tail_n = std::max(1, n_obs / 7);
  for (int i = n_obs - tail_n; i < n_obs; ++i) tail += std::abs(means[i]);
  tail /= tail_n;
  std::vector<double> xs, ys;
  for (int i = 0; i < n_obs; ++i) {
    double floor_i = std::max(4.0 * ses[i], 2.5 * tail);
    if (std::abs(means[i]) <= floor_i) break;
    xs.push_back(double(i) * h);
    ys.push_back(std::log(std::abs(means[i])));
  }
  series.fit_points = int(xs.size());
  if (xs.size() >= 4) series.fitted_rate = estimate_slope(xs, ys);
  return series;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_error_csv(std::ostream& os, const ExperimentConfig& cfg, const ErrorTable& table) {
  os << "experiment,scheme,h,M,seed,estimate,reference,abs_error,mc_stderr\n";
  for (const auto& row : table.rows) {
    os << cfg.experiment << ',' << cfg.scheme << ',' << fmt(row.h) << ',' << cfg.trajectories
       << ',' << cfg.seed << ',' << fmt(row.estimate) << ',' << fmt(row.reference) << ','
       << fmt(row.abs_error) << ',' << fmt(row.mc_stderr) << '\n';
  }
}

void write_decay_csv(std::ostream& os, const DecaySeries& series) {
  os << "t,estimate,abs_value,mc_stderr\n";
  for (const auto& row : series.rows)
    os << fmt(row.t) << ',' << fmt(row.estimate) << ',' << fmt(row.abs_value) << ','
       << fmt(row.mc_stderr) << '\n';
}

ExperimentConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  ExperimentConfig cfg;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    apply_config_entry(cfg, key, value);
  }
  return cfg;
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  auto parse_h_list = [](const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
  };
  if (key == "experiment") cfg.experiment = value;
  else if (key == "scheme") cfg.scheme = value;
  else if (key == "manifold") cfg.manifold = value;
  else if (key == "test_function") cfg.test_function = value;
  else if (key == "noise") cfg.noise = value;
  else if (key == "T") cfg.T = std::stod(value);
  else if (key == "h") cfg.h_list = {std::stod(value)};
  else if (key == "h_list") cfg.h_list = parse_h_list(value);
  else if (key == "M" || key == "traj") cfg.trajectories = std::stoll(value);
  else if (key == "seed") cfg.seed = std::stoull(value);
  else if (key == "ref_scheme") cfg.ref_scheme = value;
  else if (key == "ref_h") cfg.ref_h = std::stod(value);
  else if (key == "closed_form") cfg.closed_form = std::stod(value);
  else if (key == "beta") cfg.beta = std::stod(value);
  else if (key == "x0_r") cfg.x0_r = std::stod(value);
  else if (key == "x0_theta") cfg.x0_theta = std::stod(value);
  else if (key == "threads") cfg.threads = std::stoi(value);
  else if (key == "coupled") cfg.coupled = std::stoi(value) != 0;
  else if (key == "out") cfg.out = value;
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

}  // namespace ffint
