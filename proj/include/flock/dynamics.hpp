#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "flock/kernel.hpp"

namespace flock {

struct SwarmState {
  long t = 0;
  Eigen::MatrixXd X;  // n x d positions
  Eigen::MatrixXd V;  // n x d velocities

  int n() const { return static_cast<int>(X.rows()); }
  int d() const { return static_cast<int>(X.cols()); }
};

// Symmetric matrix with off-diagonals f(||x_i - x_j||) and unit row sums;
// stochastic exactly when the maximum weighted degree is <= 1.
Eigen::MatrixXd weight_matrix(const SwarmState& state, const Kernel& kernel);

// One step of the update: X <- X + V with the pre-update V, then
// V <- P(t) V with P built from the pre-update X.
SwarmState step(const SwarmState& state, const Kernel& kernel);

// Max over agents of the off-diagonal weight row sum (Delta_n(t)).
double max_weighted_degree(const SwarmState& state, const Kernel& kernel);

// ||V0 - Vbar||_max [log(||V0 - Vbar||_F / ||V0 - Vbar||_max) + 1],
// 0 when V0 equals its row mean.
double L_functional(const Eigen::MatrixXd& V0);

struct VelocitySpread {
  double a = 0.0;         // coordinatewise bound a(t)
  double max_pair = 0.0;  // exact max_{i,j} ||V_i - V_j||
};

VelocitySpread velocity_spread(const SwarmState& state);

// Coordinatewise bound only (O(n d)); max_pair <= a always.
double spread_bound(const Eigen::MatrixXd& V);

// ||X_i(t) - X_j(t) - X_i(0) + X_j(0)||.
double drift(const Eigen::MatrixXd& X0, const Eigen::MatrixXd& Xt, int i,
             int j);

enum class DriftMode { Off, Sampled, Exact };

struct RunConfig {
  Kernel kernel = Kernel::indicator(1.0, 1.0);
  Eigen::MatrixXd X0;
  Eigen::MatrixXd V0;
  long t_max = 10000;
  double flock_tol = 1e-9;  // relative to the initial spread when nonzero
  bool exact_pairs = false;  // exact max_pair every step (O(n^2))
  bool record_series = true;
  DriftMode drift_mode = DriftMode::Sampled;
  std::uint64_t seed = 0;  // used only to pick sampled drift pairs
};

struct RunReport {
  bool flocked = false;
  std::optional<long> t_flock;
  long steps = 0;
  double initial_spread = 0.0;  // exact max_pair at t = 0
  double final_spread = 0.0;    // exact max_pair at the last step
  double flock_tol_abs = 0.0;
  double max_drift = 0.0;
  bool drift_exact = false;
  bool stochastic_throughout = true;
  bool certified_separated = false;  // no pair can ever re-enter the radius
  std::vector<double> spread_series;  // a(t) per recorded step
  std::vector<double> delta_series;   // Delta_n(t) per recorded step
};

RunReport simulate(const RunConfig& config);

// Recorded trajectory (states at t = 0..T) for offline diagnostics.
std::vector<SwarmState> record_trajectory(const SwarmState& initial,
                                          const Kernel& kernel, long steps);

// Max over recorded steps and all pairs of the relative displacement.
double max_drift(const std::vector<SwarmState>& traj);

}  // namespace flock
