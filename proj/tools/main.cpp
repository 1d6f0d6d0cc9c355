// Command-line front end: simulation runs, phase sweeps, connectivity
// Monte Carlo, threshold solvers, spectral diagnostics, and condition
// checks. Exit codes: 0 success, 2 config error, 3 numeric failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "flock/conditions.hpp"
#include "flock/config.hpp"
#include "flock/dynamics.hpp"
#include "flock/geometry.hpp"
#include "flock/ldp.hpp"
#include "flock/rng.hpp"
#include "flock/roots.hpp"
#include "flock/spectral.hpp"
#include "flock/sweep.hpp"

namespace {

using nlohmann::json;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct Global {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_dir = ".";
  std::string format = "csv";
};

std::ofstream open_out(const Global& g, const std::string& name) {
  std::filesystem::create_directories(g.out_dir);
  std::ofstream out(std::filesystem::path(g.out_dir) / name);
  if (!out)
    throw std::invalid_argument("cannot write " + g.out_dir + "/" + name);
  return out;
}

flock::Kernel kernel_from_flags(const std::string& family, double amplitude,
                                double radius, double gamma, double delta,
                                const std::vector<double>& samples) {
  flock::Kernel k = [&] {
    if (family == "indicator") return flock::Kernel::indicator(amplitude, radius);
    if (family == "triangular")
      return flock::Kernel::triangular(amplitude, radius);
    if (family == "power_cap")
      return flock::Kernel::power_cap(amplitude, radius, gamma);
    if (family == "tabulated") return flock::Kernel::tabulated(samples, radius);
    throw std::invalid_argument("unknown kernel family: " + family);
  }();
  return delta > 0.0 ? k.shifted(delta) : k;
}

json rate_to_json(const flock::RateSolution& sol) {
  json j;
  j["kbar"] = sol.kbar;
  if (sol.thetabar) j["thetabar"] = *sol.thetabar;
  j["mean_xi"] = sol.mean_xi;
  j["degenerate"] = sol.degenerate;
  j["residual_stationarity"] = sol.residual_stationarity;
  j["residual_level"] = sol.residual_level;
  return j;
}

int cmd_simulate(const Global& g, const std::string& config_path,
                 bool dump_traj) {
  flock::SimConfig cfg = flock::load_config(config_path);
  auto sample = flock::sample_positions(
      cfg.n, cfg.d, g.seed ? flock::split_seed(g.seed, 0) : cfg.seed);
  flock::RunConfig run =
      cfg.build_run(sample.X, flock::split_seed(cfg.seed, 1));
  run.record_series = true;

  flock::RunReport rep = flock::simulate(run);

  auto series = open_out(g, "series.jsonl");
  for (std::size_t t = 0; t < rep.spread_series.size(); ++t) {
    json row;
    row["t"] = t;
    row["a_t"] = rep.spread_series[t];
    row["delta_n"] = rep.delta_series[t];
    series << row.dump() << "\n";
  }

  json out;
  out["flocked"] = rep.flocked;
  if (rep.t_flock) out["t_flock"] = *rep.t_flock;
  out["steps"] = rep.steps;
  out["initial_spread"] = rep.initial_spread;
  out["final_spread"] = rep.final_spread;
  out["flock_tol_abs"] = rep.flock_tol_abs;
  out["max_drift"] = rep.max_drift;
  out["stochastic_throughout"] = rep.stochastic_throughout;
  out["certified_separated"] = rep.certified_separated;
  open_out(g, "report.json") << out.dump(2) << "\n";
  std::cout << out.dump(2) << "\n";

  if (dump_traj) {
    auto traj = flock::record_trajectory(
        flock::SwarmState{0, run.X0, run.V0}, run.kernel,
        std::min<long>(rep.steps, 2000));
    auto csv = open_out(g, "trajectory.csv");
    csv << "t,agent,coord,x,v\n";
    for (const auto& st : traj)
      for (int i = 0; i < st.n(); ++i)
        for (int j = 0; j < st.d(); ++j)
          csv << st.t << ',' << i << ',' << j << ',' << fmt(st.X(i, j)) << ','
              << fmt(st.V(i, j)) << '\n';
  }
  return 0;
}

int cmd_sweep(const Global& g, flock::SweepSpec spec, bool svg) {
  spec.seed = g.seed;
  spec.threads = g.threads;
  flock::SweepResult result = flock::run_sweep(spec);
  std::filesystem::create_directories(g.out_dir);
  auto dir = std::filesystem::path(g.out_dir);
  flock::persist_result(result, (dir / "sweep.csv").string(),
                        (dir / "sweep_meta.json").string());
  if (svg) flock::emit_plot(result, (dir / "sweep.svg").string());
  int failures = 0;
  for (const auto& c : result.cells)
    if (!c.error.empty()) ++failures;
  if (failures) {
    std::cerr << failures << " cell(s) failed; see sweep.csv\n";
    return 3;
  }
  return 0;
}

int cmd_rgg(const Global& g, int n, int d, double alpha, double radius,
            int trials) {
  if (radius > 0.0)
    alpha = std::pow(radius, d) * n / std::log(static_cast<double>(n));
  auto est = flock::connectivity_probability(n, d, alpha, trials, g.seed);
  auto csv = open_out(g, "connectivity.csv");
  std::string row = std::to_string(est.n) + "," + std::to_string(est.d) + "," +
                    fmt(est.alpha) + "," + fmt(est.radius) + "," +
                    std::to_string(est.trials) + "," +
                    std::to_string(est.connected_count) + "," +
                    fmt(est.frequency);
  csv << "n,d,alpha,radius,trials,connected_count,frequency\n" << row << "\n";
  std::cout << row << "\n";
  return 0;
}

int cmd_kbar(const Global& g, const flock::Kernel& kernel, int n, int d) {
  flock::RateSolution sol = flock::solve_kbar(kernel, n, d);
  json j = rate_to_json(sol);
  open_out(g, "kbar.json") << j.dump(2) << "\n";
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_conditions(const Global& g, const std::string& config_path,
                   double delta, double eps, double c_override) {
  flock::SimConfig cfg = flock::load_config(config_path);
  if (!cfg.alpha)
    throw std::invalid_argument("conditions needs the alpha radius law");
  auto sample = flock::sample_positions(cfg.n, cfg.d, cfg.seed);
  Eigen::MatrixXd V0 = cfg.build_velocities(sample.X);
  flock::Kernel kernel = cfg.build_kernel();

  auto t1 = flock::check_theorem1(kernel, cfg.n, cfg.d, *cfg.alpha, delta, eps,
                                  V0, c_override);
  auto c1 = flock::check_corollary1(kernel, cfg.n, cfg.d, *cfg.alpha, eps, V0,
                                    c_override);
  auto t2 = flock::check_theorem2(kernel, cfg.n, cfg.d, *cfg.alpha);

  auto regime_name = [](flock::Regime r) {
    switch (r) {
      case flock::Regime::SubCritical: return "sub_critical";
      case flock::Regime::SuperCritical: return "super_critical";
      default: return "at_threshold";
    }
  };
  auto cond_json = [&](const flock::ConditionReport& rep) {
    json j;
    j["regime"] = regime_name(rep.regime);
    j["branch"] = rep.branch == flock::Branch::I ? "I" : "II";
    j["kbar"] = rep.kbar;
    j["epsilon_feasible"] = rep.epsilon_feasible;
    j["lhs"] = rep.lhs;
    j["rhs_over_c"] = rep.rhs_over_c;
    j["c_used"] = rep.c_used;
    j["satisfied"] = rep.satisfied;
    j["applicable"] = rep.applicable;
    return j;
  };
  json out;
  out["sufficient_condition"] = cond_json(t1);
  out["radius_law_condition"] = cond_json(c1);
  json j2;
  j2["regime"] = regime_name(t2.regime);
  if (t2.kbar) j2["kbar"] = *t2.kbar;
  j2["kbar_below_2d"] = t2.kbar_below_2d;
  if (t2.v_scale_theta1) j2["v_scale_theta1"] = *t2.v_scale_theta1;
  if (t2.v_scale_small) j2["v_scale_small"] = *t2.v_scale_small;
  out["necessary_direction"] = j2;
  open_out(g, "conditions.json") << out.dump(2) << "\n";
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_spectral(const Global& g, const std::string& config_path, long steps) {
  flock::SimConfig cfg = flock::load_config(config_path);
  auto sample = flock::sample_positions(cfg.n, cfg.d, cfg.seed);
  flock::SwarmState state{0, sample.X, cfg.build_velocities(sample.X)};
  flock::Kernel kernel = cfg.build_kernel();
  auto traj = flock::record_trajectory(state, kernel, steps);
  auto csv = open_out(g, "spectral.csv");
  csv << "t,lambda2,lambdan,lambda_bar,phi_sweep,phi_exact\n";
  for (const auto& st : traj) {
    Eigen::MatrixXd P = flock::weight_matrix(st, kernel);
    auto rep = flock::spectral_report(P);
    int n = static_cast<int>(rep.eigenvalues.size());
    csv << st.t << ',' << fmt(rep.eigenvalues[1]) << ','
        << fmt(rep.eigenvalues[n - 1]) << ',' << fmt(rep.lambda_bar) << ','
        << fmt(rep.phi_sweep) << ','
        << (rep.phi_exact ? fmt(*rep.phi_exact) : "") << '\n';
  }
  return 0;
}

int cmd_vthreshold(const Global& g, flock::VThresholdParams params,
                   double v_lo, double v_hi) {
  params.seed = g.seed;
  auto res = flock::estimate_v_threshold(params, v_lo, v_hi);
  auto csv = open_out(g, "vthreshold_curve.csv");
  csv << "v,frequency\n";
  for (auto& [v, f] : res.curve) csv << fmt(v) << ',' << fmt(f) << '\n';
  json j;
  if (res.v_flock) j["v_flock"] = *res.v_flock;
  if (res.v_no_flock) j["v_no_flock"] = *res.v_no_flock;
  j["monotone"] = res.monotone;
  if (!res.warning.empty()) j["warning"] = res.warning;
  open_out(g, "vthreshold.json") << j.dump(2) << "\n";
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flocking-model simulator and analysis toolkit"};
  app.require_subcommand(1);

  Global g;
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--threads", g.threads, "worker pool size")
      ->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "output directory");
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));

  // simulate
  std::string config_path;
  bool dump_traj = false;
  auto* sim = app.add_subcommand("simulate", "run one simulation from a config");
  sim->add_option("--config", config_path, "JSON config file")->required();
  sim->add_flag("--dump-trajectory", dump_traj, "write trajectory.csv");

  // sweep
  flock::SweepSpec spec;
  bool svg = true;
  std::vector<double> alpha_grid;
  double v_min = 0.05, v_max = 50.0;
  int v_points = 20;
  auto* sw = app.add_subcommand("sweep", "phase sweep over (alpha, v')");
  sw->add_option("--n", spec.n);
  sw->add_option("--d", spec.d);
  sw->add_option("--alpha", alpha_grid, "alpha grid values");
  sw->add_option("--v-min", v_min);
  sw->add_option("--v-max", v_max);
  sw->add_option("--v-points", v_points);
  sw->add_option("--trials", spec.trials);
  sw->add_option("--t-max", spec.t_max);
  sw->add_option("--flock-tol", spec.flock_tol,
                 "relative velocity-spread tolerance for flocking");
  sw->add_option("--kernel", spec.kernel_family);
  sw->add_flag("!--no-svg", svg, "skip the SVG heat map");

  // rgg-connectivity
  int rn = 2000, rd = 2, rtrials = 200;
  double ralpha = 0.0, rradius = 0.0;
  auto* rgg = app.add_subcommand("rgg-connectivity",
                                 "Monte Carlo connectivity frequency");
  rgg->add_option("--n", rn);
  rgg->add_option("--d", rd);
  rgg->add_option("--alpha", ralpha);
  rgg->add_option("--r", rradius);
  rgg->add_option("--trials", rtrials);

  // kbar / kbar-sweep
  std::string family = "triangular";
  double amplitude = 1.0, radius = 0.1, gamma = 1.0, delta = 0.0;
  std::vector<double> samples;
  int kn = 1000, kd = 2;
  std::vector<int> n_grid;
  auto add_kernel_flags = [&](CLI::App* cmd) {
    cmd->add_option("--family", family);
    cmd->add_option("--amplitude", amplitude);
    cmd->add_option("--radius", radius);
    cmd->add_option("--gamma", gamma);
    cmd->add_option("--delta", delta);
    cmd->add_option("--samples", samples);
    cmd->add_option("--d", kd);
  };
  auto* kb = app.add_subcommand("kbar", "solve the log n level crossing");
  add_kernel_flags(kb);
  kb->add_option("--n", kn);
  auto* kbs = app.add_subcommand("kbar-sweep", "tabulate kbar over an n-grid");
  add_kernel_flags(kbs);
  kbs->add_option("--n-grid", n_grid)->required();

  // spectral
  std::string spec_config;
  long spec_steps = 20;
  auto* sp = app.add_subcommand("spectral", "per-step spectral diagnostics");
  sp->add_option("--config", spec_config)->required();
  sp->add_option("--steps", spec_steps);

  // conditions
  std::string cond_config;
  double cond_delta = 0.1, cond_eps = 0.1, cond_c = 1.0;
  auto* cond = app.add_subcommand("conditions", "flocking condition checks");
  cond->add_option("--config", cond_config)->required();
  cond->add_option("--delta", cond_delta);
  cond->add_option("--eps", cond_eps);
  cond->add_option("--c", cond_c);

  // vthreshold
  flock::VThresholdParams vp;
  double v_lo = 1e-4, v_hi = 1.0;
  std::string vmode = "halfsplit";
  auto* vt = app.add_subcommand("vthreshold", "bisect the flocking threshold");
  vt->add_option("--n", vp.n);
  vt->add_option("--d", vp.d);
  vt->add_option("--alpha", vp.alpha);
  vt->add_option("--trials", vp.trials);
  vt->add_option("--t-max", vp.t_max);
  vt->add_option("--mode", vmode)
      ->check(CLI::IsMember({"halfsplit", "nearest_origin"}));
  vt->add_option("--v-lo", v_lo);
  vt->add_option("--v-hi", v_hi);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return cmd_simulate(g, config_path, dump_traj);
    if (*sw) {
      spec.alpha_grid = alpha_grid;
      if (spec.alpha_grid.empty())
        for (double a = 0.5; a <= 3.001; a += 0.25) spec.alpha_grid.push_back(a);
      spec.vprime_grid = flock::log_spaced(v_min, v_max, v_points);
      return cmd_sweep(g, spec, svg);
    }
    if (*rgg) {
      if ((ralpha > 0.0) == (rradius > 0.0))
        throw std::invalid_argument("give exactly one of --alpha / --r");
      return cmd_rgg(g, rn, rd, ralpha, rradius, rtrials);
    }
    if (*kb)
      return cmd_kbar(
          g, kernel_from_flags(family, amplitude, radius, gamma, delta, samples),
          kn, kd);
    if (*kbs) {
      auto csv = open_out(g, "kbar_sweep.csv");
      csv << "n,kbar,thetabar,mean_xi,degenerate\n";
      for (int n : n_grid) {
        auto k = kernel_from_flags(family, amplitude, radius, gamma, delta,
                                   samples);
        auto sol = flock::solve_kbar(k, n, kd);
        csv << n << ',' << fmt(sol.kbar) << ','
            << (sol.thetabar ? fmt(*sol.thetabar) : "") << ','
            << fmt(sol.mean_xi) << ',' << (sol.degenerate ? 1 : 0) << '\n';
      }
      return 0;
    }
    if (*sp) return cmd_spectral(g, spec_config, spec_steps);
    if (*cond) return cmd_conditions(g, cond_config, cond_delta, cond_eps,
                                     cond_c);
    if (*vt) {
      vp.mode = vmode == "halfsplit" ? flock::VelocityMode::HalfSplit
                                     : flock::VelocityMode::NearestOrigin;
      double r = flock::radius_from_alpha(vp.alpha, vp.n, vp.d);
      double b = 1.0 / (vp.alpha * M_PI * std::log(static_cast<double>(vp.n)));
      vp.kernel = flock::Kernel::triangular(b, r);
      return cmd_vthreshold(g, vp, v_lo, v_hi);
    }
  } catch (const flock::ConvergenceError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
