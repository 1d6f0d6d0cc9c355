#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flock/dynamics.hpp"
#include "flock/kernel.hpp"

namespace flock {

// Experiment configuration (JSON on disk, versioned schema, unknown keys
// rejected). Exactly one radius spec (alpha law or explicit r) and one
// velocity spec must be present.
struct SimConfig {
  int n = 600;
  int d = 2;

  std::optional<double> alpha;            // r = (alpha log n / n)^{1/d}
  std::optional<double> explicit_radius;  // explicit r

  std::string kernel_family = "triangular";
  std::optional<double> amplitude;  // absent: b = 1/(alpha pi log n), d = 2
  double gamma = 1.0;
  double delta = 0.0;
  std::vector<double> samples;  // tabulated family only

  // halfsplit (scale v' n^{-3/2} log^{1/2} n), halfsplit_abs,
  // nearest_origin, zero, explicit
  std::string velocity_mode = "halfsplit";
  std::optional<double> vprime;
  std::optional<double> v0;
  std::vector<std::vector<double>> v_explicit;

  long t_max = 10000;
  double flock_tol = 1e-9;
  std::uint64_t seed = 0;
  int trials = 1;
  bool exact_pairs = false;
  bool spectral = false;
  std::string drift = "sampled";  // off | sampled | exact

  double resolved_radius() const;
  Kernel build_kernel() const;
  Eigen::MatrixXd build_velocities(const Eigen::MatrixXd& X) const;
  RunConfig build_run(const Eigen::MatrixXd& X,
                      std::uint64_t run_seed) const;

  std::string to_json_string() const;
  static SimConfig from_json_string(const std::string& text);
};

SimConfig load_config(const std::string& path);
void persist_config(const SimConfig& config, const std::string& path);

}  // namespace flock
