#include "flock/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "flock/dynamics.hpp"
#include "flock/geometry.hpp"
#include "flock/rng.hpp"

namespace flock {

namespace {

double pow_int(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

Branch classify_branch(double alpha, double eps, int d) {
  return alpha * pow_int(eps, d) <= std::pow(d + 3.0, d / 2.0) ? Branch::I
                                                               : Branch::II;
}

}  // namespace

double regime_threshold(int d) {
  return std::pow(2.0, d - 1) / (d * unit_ball_volume(d));
}

Regime classify_regime(double alpha, int d) {
  double thr = regime_threshold(d);
  if (alpha < thr) return Regime::SubCritical;
  if (alpha > thr) return Regime::SuperCritical;
  return Regime::AtThreshold;
}

ConditionReport check_theorem1(const Kernel& kernel, int n, int d,
                               double alpha, double delta, double eps,
                               const Eigen::MatrixXd& V0, double c_override) {
  if (!(delta > 0.0) || !(eps > 0.0))
    throw std::invalid_argument("check_theorem1 requires delta > 0, eps > 0");
  ConditionReport rep;
  rep.regime = classify_regime(alpha, d);
  rep.branch = classify_branch(alpha, eps, d);
  rep.c_used = c_override;

  RateSolution sol = solve_kbar(kernel.shifted(delta), n, d);
  rep.kbar = sol.kbar;
  rep.epsilon_feasible = sol.kbar <= 1.0 - eps;

  double r = kernel.radius();
  double logn = std::log(static_cast<double>(n));
  double f_near = kernel.eval((delta + eps) * r);
  double n2r = static_cast<double>(n) * n * r;
  if (rep.branch == Branch::I) {
    double rc = critical_radius(n, d);
    double f_far = kernel.eval(rc + (delta + eps) * r);
    double term1 = pow_int(r, 2 * d + 2) * f_near * f_near;
    double term2 =
        f_far * f_far / std::pow(logn, 2.0 * d / (d - 1.0));
    rep.rhs_over_c = delta * n2r * std::min(term1, term2);
  } else {
    rep.rhs_over_c =
        delta * f_near * f_near * n2r * std::min(pow_int(r, 2 * d + 2), 1.0);
  }
  rep.lhs = L_functional(V0);
  rep.satisfied = rep.regime == Regime::SuperCritical && rep.epsilon_feasible &&
                  rep.lhs <= c_override * rep.rhs_over_c;
  return rep;
}

ConditionReport check_corollary1(const Kernel& kernel, int n, int d,
                                 double alpha, double eps,
                                 const Eigen::MatrixXd& V0, double c_override,
                                 double c1_override) {
  if (!(eps > 0.0))
    throw std::invalid_argument("check_corollary1 requires eps > 0");
  ConditionReport rep;
  rep.regime = classify_regime(alpha, d);
  rep.branch = classify_branch(alpha, eps, d);
  rep.c_used = c_override;

  double c0 = kernel.c0_integral(d);
  if (!(c0 > 0.0)) {
    rep.applicable = false;
    return rep;
  }
  RateSolution sol = solve_kbar(kernel, n, d);
  rep.kbar = sol.kbar;
  rep.epsilon_feasible = sol.kbar <= 1.0 - eps;
  if (!rep.epsilon_feasible) {
    rep.applicable = false;
  }

  double r = kernel.radius();
  double logn = std::log(static_cast<double>(n));
  double f_near = kernel.eval(c1_override * eps * r);
  double n2r = static_cast<double>(n) * n * r;
  if (rep.branch == Branch::I) {
    double rc = critical_radius(n, d);
    double f_far = kernel.eval(rc + c1_override * eps * r);
    double term1 = pow_int(r, 2 * d + 2) * f_near * f_near;
    double term2 = f_far * f_far / std::pow(logn, 2.0 * d / (d - 1.0));
    rep.rhs_over_c = n2r * std::min(term1, term2);
  } else {
    rep.rhs_over_c = static_cast<double>(n) * n * pow_int(r, 2 * d + 3) *
                     f_near * f_near;
  }
  rep.lhs = L_functional(V0);
  rep.satisfied = rep.applicable && rep.regime == Regime::SuperCritical &&
                  rep.lhs <= c_override * rep.rhs_over_c;
  return rep;
}

Theorem2Report check_theorem2(const Kernel& kernel, int n, int d,
                              double alpha) {
  Theorem2Report rep;
  rep.regime = classify_regime(alpha, d);
  if (rep.regime == Regime::SubCritical) return rep;
  RateSolution sol = solve_kbar(kernel, n, d);
  rep.kbar = sol.kbar;
  rep.kbar_below_2d = sol.kbar < std::pow(2.0, d);
  double r = kernel.radius();
  if (rep.kbar_below_2d)
    rep.v_scale_theta1 = std::pow(2.0, -d - 1) * sol.kbar * r;
  rep.v_scale_small = 0.5 * sol.kbar * r;
  return rep;
}

Eigen::MatrixXd adversarial_velocities(const Eigen::MatrixXd& positions,
                                       VelocityMode mode, double v0) {
  if (!(v0 > 0.0)) throw std::invalid_argument("v0 must be positive");
  int n = static_cast<int>(positions.rows());
  int d = static_cast<int>(positions.cols());
  Eigen::MatrixXd V(n, d);
  if (mode == VelocityMode::NearestOrigin) {
    int chosen = 0;
    double best = positions.row(0).squaredNorm();
    for (int i = 1; i < n; ++i) {
      double norm2 = positions.row(i).squaredNorm();
      if (norm2 < best) {
        best = norm2;
        chosen = i;
      }
    }
    double comp = v0 / std::sqrt(static_cast<double>(d));
    V.setConstant(comp);
    V.row(chosen).setConstant(-comp);
  } else {
    V.setZero();
    for (int i = 0; i < n; ++i)
      V(i, 0) = positions(i, 0) <= 0.5 ? -v0 : v0;
  }
  return V;
}

VThresholdResult estimate_v_threshold(const VThresholdParams& params,
                                      double v_lo, double v_hi,
                                      int max_levels) {
  if (!(v_lo > 0.0) || !(v_lo < v_hi))
    throw std::invalid_argument("require 0 < v_lo < v_hi");

  auto frequency = [&](double v) {
    int flocked = 0;
    for (int t = 0; t < params.trials; ++t) {
      auto sample =
          sample_positions(params.n, params.d, split_seed(params.seed, t));
      RunConfig cfg;
      cfg.kernel = params.kernel;
      cfg.X0 = sample.X;
      cfg.V0 = adversarial_velocities(sample.X, params.mode, v);
      cfg.t_max = params.t_max;
      cfg.flock_tol = params.flock_tol;
      cfg.record_series = false;
      cfg.drift_mode = DriftMode::Off;
      cfg.seed = split_seed(params.seed, t, 1);
      if (simulate(cfg).flocked) ++flocked;
    }
    return static_cast<double>(flocked) / params.trials;
  };

  std::map<double, double> curve;
  curve[v_lo] = frequency(v_lo);
  curve[v_hi] = frequency(v_hi);
  double lo = v_lo, hi = v_hi;
  for (int level = 0; level < max_levels && hi / lo > 1.25; ++level) {
    double mid = std::sqrt(lo * hi);
    double f = frequency(mid);
    curve[mid] = f;
    if (f >= 0.5)
      lo = mid;
    else
      hi = mid;
  }

  VThresholdResult res;
  for (auto& [v, f] : curve) res.curve.emplace_back(v, f);
  double prev = 2.0;
  for (auto& [v, f] : res.curve) {
    if (f > prev + 0.15) res.monotone = false;  // Monte Carlo noise allowance
    prev = f;
  }
  if (!res.monotone) {
    res.warning = "non-monotone frequency curve; no interval reported";
    return res;
  }
  for (auto& [v, f] : res.curve) {
    if (f >= 0.9) res.v_flock = v;
    if (f <= 0.1 && !res.v_no_flock) res.v_no_flock = v;
  }
  if (!res.v_flock)
    res.warning = "no probed v reached flocking frequency >= 0.9";
  else if (!res.v_no_flock)
    res.warning = "no probed v reached no-flock frequency <= 0.1";
  return res;
}

}  // namespace flock
