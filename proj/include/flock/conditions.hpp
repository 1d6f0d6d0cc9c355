#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flock/kernel.hpp"
#include "flock/ldp.hpp"

namespace flock {

enum class Regime { SubCritical, SuperCritical, AtThreshold };
enum class Branch { I, II };  // alpha eps^d vs (d+3)^{d/2}

// alpha vs the connectivity threshold 2^{d-1}/(d pi_d).
Regime classify_regime(double alpha, int d);
double regime_threshold(int d);

struct ConditionReport {
  Regime regime = Regime::AtThreshold;
  Branch branch = Branch::I;
  double kbar = 0.0;           // kbar_{n,delta} (theorem) or kbar_n (corollary)
  bool epsilon_feasible = false;
  double lhs = 0.0;            // L(V(0))
  double rhs_over_c = 0.0;     // right-hand side with the constant factored out
  double c_used = 1.0;
  bool satisfied = false;      // verdict at c_used (a convention, not a proof)
  bool applicable = true;
};

ConditionReport check_theorem1(const Kernel& kernel, int n, int d,
                               double alpha, double delta, double eps,
                               const Eigen::MatrixXd& V0,
                               double c_override = 1.0);

ConditionReport check_corollary1(const Kernel& kernel, int n, int d,
                                 double alpha, double eps,
                                 const Eigen::MatrixXd& V0,
                                 double c_override = 1.0,
                                 double c1_override = 1.0);

struct Theorem2Report {
  Regime regime = Regime::AtThreshold;
  std::optional<double> kbar;
  bool kbar_below_2d = false;   // checkable hypothesis kbar < 2^d
  std::optional<double> v_scale_theta1;  // 2^{-d-1} kbar r (Theta(1) branch)
  std::optional<double> v_scale_small;   // (1/2) kbar r (o(1) branch)
};

Theorem2Report check_theorem2(const Kernel& kernel, int n, int d,
                              double alpha);

enum class VelocityMode { NearestOrigin, HalfSplit };

// NearestOrigin: the agent closest to the origin (ties by lowest index)
// gets the all-negative vector of norm v0, everyone else its negation.
// HalfSplit: velocity +-(v0, 0, ..., 0) split on the first coordinate at 1/2.
Eigen::MatrixXd adversarial_velocities(const Eigen::MatrixXd& positions,
                                       VelocityMode mode, double v0);

struct VThresholdParams {
  int n = 600;
  int d = 2;
  double alpha = 2.0;
  Kernel kernel = Kernel::indicator(1.0, 1.0);
  VelocityMode mode = VelocityMode::HalfSplit;
  long t_max = 10000;
  double flock_tol = 1e-9;
  int trials = 20;
  std::uint64_t seed = 0;
};

struct VThresholdResult {
  std::vector<std::pair<double, double>> curve;  // (v, flocking frequency)
  std::optional<double> v_flock;     // largest probed v with frequency >= 0.9
  std::optional<double> v_no_flock;  // smallest probed v with frequency <= 0.1
  bool monotone = true;
  std::string warning;
};

// Frequency-threshold bisection over the tested adversarial velocity
// family; the bracket is an upper bound on the true v_c restricted to
// that family.
VThresholdResult estimate_v_threshold(const VThresholdParams& params,
                                      double v_lo, double v_hi,
                                      int max_levels = 12);

}  // namespace flock
