#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "ffint/algebra.hpp"
#include "ffint/experiments.hpp"
#include "ffint/order.hpp"
#include "ffint/schemes.hpp"

namespace {

using namespace ffint;

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open output file " + path);
  return file;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int cmd_forests(int max_order2x, bool trees_only, const std::string& out_path) {
  std::ofstream file;
  std::ostream& os = open_out(out_path, file);
  os << "order,encoding\n";
  for (int twice = 1; twice <= max_order2x; ++twice) {
    ForestOrder p{twice};
    auto list = trees_only ? enumerate_trees(p) : enumerate_forests(p);
    for (const auto& f : list) os << p.str() << ",\"" << f.encoding() << "\"\n";
  }
  return 0;
}

int cmd_check_order(const std::string& scheme, const std::string& tableau_file, int p,
                    bool assert_pass, double tol, const std::string& out_path) {
  Tableau t;
  if (!tableau_file.empty()) {
    t = read_tableau_file(tableau_file);
    if (!t.is_explicit()) throw std::runtime_error("tableau file describes an implicit method");
  } else {
    Scheme s = scheme_by_name(scheme);
    if (s.kind != SchemeKind::TableauScheme)
      throw std::runtime_error("scheme '" + scheme + "' has no tableau to check");
    t = s.tableau;
  }
  auto rows = order_conditions(p, t);
  std::ofstream file;
  std::ostream& os = open_out(out_path, file);
  os << "forest_encoding,order,a_value,e_value,residual\n";
  for (const auto& row : rows) {
    os << '"' << row.forest.encoding() << "\"," << row.forest.order().str() << ','
       << fmt(row.a) << ',' << fmt(row.e) << ',' << fmt(row.residual) << '\n';
  }
  if (assert_pass) {
    for (const auto& row : rows) {
      if (std::abs(row.residual) > tol) {
        std::cerr << "order condition failed at forest " << row.forest.encoding()
                  << ": a=" << fmt(row.a) << " e=" << fmt(row.e)
                  << " residual=" << fmt(row.residual) << " (tol " << tol << ")\n";
        return 2;
      }
    }
    std::cerr << "all " << rows.size() << " order conditions up to order " << p
              << " hold within " << tol << "\n";
  }
  return 0;
}

int cmd_moments(const std::string& source, long long n, std::uint64_t seed,
                const std::string& out_path) {
  auto rep = moment_check(noise_by_name(source), n, seed);
  std::ofstream file;
  std::ostream& os = open_out(out_path, file);
  os << "moment,empirical,target,mc_stderr\n";
  for (int m = 0; m < 6; ++m)
    os << (m + 1) << ',' << fmt(rep.empirical[m]) << ',' << fmt(rep.target[m]) << ','
       << fmt(rep.stderr_est[m]) << '\n';
  return 0;
}

void report_error_table(const ExperimentConfig& cfg, const ErrorTable& table) {
  std::ofstream file;
  std::ostream& os = open_out(cfg.out, file);
  write_error_csv(os, cfg, table);
  std::cerr << cfg.experiment << " scheme=" << cfg.scheme << " M=" << cfg.trajectories;
  if (!std::isnan(table.slope))
    std::cerr << " fitted_slope=" << table.slope << " (" << table.slope_points << " points)";
  if (table.stats.resamples > 0 || table.stats.chart_switches > 0)
    std::cerr << " resamples=" << table.stats.resamples
              << " chart_switches=" << table.stats.chart_switches;
  std::cerr << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frozen flow integrators: exotic forests, order conditions, experiments"};
  app.require_subcommand(1);
  // keep -h free for the step-size flag on subcommands
  app.set_help_flag("--help", "print help");

  int max_order = 3;
  std::string out_path;
  auto* forests = app.add_subcommand("forests", "enumerate exotic forests by order");
  forests->add_option("--max-order", max_order, "largest order (integer)")->capture_default_str();
  forests->add_option("--out", out_path, "output path (default stdout)");
  auto* trees = app.add_subcommand("trees", "enumerate exotic trees by order");
  trees->add_option("--max-order", max_order, "largest order (integer)")->capture_default_str();
  trees->add_option("--out", out_path, "output path (default stdout)");

  std::string scheme = "sff2", tableau_file;
  int cond_order = 2;
  bool assert_pass = false;
  double tol = 1e-12;
  auto* check = app.add_subcommand("check-order", "evaluate weak order conditions");
  check->add_option("--scheme", scheme, "registered scheme name")->capture_default_str();
  check->add_option("--tableau", tableau_file, "tableau file (overrides --scheme)");
  check->add_option("-p,--order", cond_order, "check conditions up to this order")
      ->capture_default_str();
  check->add_flag("--assert", assert_pass, "exit 2 when a residual exceeds the tolerance");
  check->add_option("--tol", tol, "residual tolerance")->capture_default_str();
  check->add_option("--out", out_path, "output path (default stdout)");

  std::string noise_src = "threepoint";
  long long n_samples = 100000;
  std::uint64_t mseed = 0;
  auto* moments = app.add_subcommand("moments", "empirical moments of a noise source");
  moments->add_option("--source", noise_src, "gaussian | threepoint | rademacher")
      ->capture_default_str();
  moments->add_option("--n", n_samples, "sample count")->capture_default_str();
  moments->add_option("--seed", mseed, "rng seed");
  moments->add_option("--out", out_path, "output path (default stdout)");

  // experiment flags; applied on top of --config when explicitly given
  std::string config_file;
  std::string opt_experiment, opt_scheme, opt_noise, opt_testfn, opt_ref_scheme, opt_out,
      opt_manifold, opt_h, opt_h_list;
  double opt_T = 0, opt_ref_h = 0, opt_beta = 0, opt_x0r = 0, opt_x0th = 0;
  long long opt_traj = 0;
  std::uint64_t opt_seed = 0;
  int opt_threads = 0, opt_coupled = 1;
  auto add_run_options = [&](CLI::App* sub) {
    sub->set_help_flag("--help", "print help");
    sub->add_option("--config", config_file, "key=value config file (flags win)");
    sub->add_option("--experiment", opt_experiment,
                    "so3_weak | sphere_ergodic | cauchy_decay");
    sub->add_option("--scheme", opt_scheme, "scheme name");
    sub->add_option("--noise", opt_noise, "gaussian | threepoint | rademacher");
    sub->add_option("--test-function", opt_testfn, "test function name");
    sub->add_option("--T", opt_T, "final time");
    sub->add_option("--h", opt_h, "single step size");
    sub->add_option("--h-list", opt_h_list, "comma-separated step sizes");
    sub->add_option("--traj,--M", opt_traj, "trajectory count");
    sub->add_option("--seed", opt_seed, "rng seed");
    sub->add_option("--ref-scheme", opt_ref_scheme, "reference scheme (weak error)");
    sub->add_option("--ref-h", opt_ref_h, "reference step size");
    sub->add_option("--beta", opt_beta, "Cauchy beta parameter");
    sub->add_option("--x0-r", opt_x0r, "Cauchy initial r");
    sub->add_option("--x0-theta", opt_x0th, "Cauchy initial theta");
    sub->add_option("--threads", opt_threads, "worker threads (0 = hardware)");
    sub->add_option("--coupled", opt_coupled,
                    "couple weak-error runs to the reference path (0/1)");
    sub->add_option("--out", opt_out, "csv path (default stdout)");
    sub->add_option("--manifold", opt_manifold, "manifold name (informational)");
  };
  auto* conv = app.add_subcommand("convergence", "weak-error convergence experiment");
  add_run_options(conv);
  auto* ergodic = app.add_subcommand("ergodic", "invariant-measure / decay experiment");
  add_run_options(ergodic);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*forests) return cmd_forests(2 * max_order, false, out_path);
    if (*trees) return cmd_forests(2 * max_order, true, out_path);
    if (*check)
      return cmd_check_order(scheme, tableau_file, cond_order, assert_pass, tol, out_path);
    if (*moments) return cmd_moments(noise_src, n_samples, mseed, out_path);

    CLI::App* sub = conv->parsed() ? static_cast<CLI::App*>(conv) : ergodic;
    ExperimentConfig cfg;
    if (!config_file.empty()) cfg = read_config_file(config_file);
    if (sub->count("--experiment")) cfg.experiment = opt_experiment;
    if (sub->count("--scheme")) cfg.scheme = opt_scheme;
    if (sub->count("--noise")) cfg.noise = opt_noise;
    if (sub->count("--test-function")) cfg.test_function = opt_testfn;
    if (sub->count("--T")) cfg.T = opt_T;
    if (sub->count("--h")) apply_config_entry(cfg, "h", opt_h);
    if (sub->count("--h-list")) apply_config_entry(cfg, "h_list", opt_h_list);
    if (sub->count("--traj")) cfg.trajectories = opt_traj;
    if (sub->count("--seed")) cfg.seed = opt_seed;
    if (sub->count("--ref-scheme")) cfg.ref_scheme = opt_ref_scheme;
    if (sub->count("--ref-h")) cfg.ref_h = opt_ref_h;
    if (sub->count("--beta")) cfg.beta = opt_beta;
    if (sub->count("--x0-r")) cfg.x0_r = opt_x0r;
    if (sub->count("--x0-theta")) cfg.x0_theta = opt_x0th;
    if (sub->count("--threads")) cfg.threads = opt_threads;
    if (sub->count("--coupled")) cfg.coupled = opt_coupled != 0;
    if (sub->count("--out")) cfg.out = opt_out;
    if (sub->count("--manifold")) cfg.manifold = opt_manifold;

    if (*conv) {
      if (cfg.experiment.empty()) cfg.experiment = "so3_weak";
      ErrorTable table = cfg.experiment == "sphere_ergodic" ? run_sphere_ergodic(cfg)
                                                            : run_weak_error(cfg);
      report_error_table(cfg, table);
      return 0;
    }
    if (cfg.experiment.empty()) cfg.experiment = "sphere_ergodic";
    if (cfg.experiment == "cauchy_decay") {
      DecaySeries series = run_cauchy_ergodic(cfg);
      std::ofstream file;
      std::ostream& os = open_out(cfg.out, file);
      write_decay_csv(os, series);
      std::cerr << "cauchy_decay scheme=" << cfg.scheme << " M=" << cfg.trajectories
                << " fitted_rate=" << series.fitted_rate << " (" << series.fit_points
                << " points) resample_rate=" << series.resample_rate
                << (series.flagged ? " FLAGGED: domain-exit resamples exceed 1%" : "") << "\n";
    } else {
      ErrorTable table = run_sphere_ergodic(cfg);
      report_error_table(cfg, table);
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
