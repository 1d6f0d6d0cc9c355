#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flock/config.hpp"

namespace flock {

struct SweepSpec {
  std::vector<double> alpha_grid;
  std::vector<double> vprime_grid;
  int trials = 50;
  int n = 600;
  int d = 2;
  std::string kernel_family = "triangular";
  std::optional<double> amplitude;  // absent: 1/(alpha pi log n) per column
  double gamma = 1.0;
  long t_max = 10000;
  double flock_tol = 1e-9;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct SweepCell {
  int alpha_index = 0;
  int vprime_index = 0;
  int trials = 0;
  int flock_count = 0;
  double frequency = 0.0;
  double mean_t_flock = 0.0;  // over flocked trials; 0 when none flocked
  std::string error;          // nonempty if the cell failed
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepCell> cells;  // row-major: alpha outer, vprime inner

  const SweepCell& cell(int ai, int vi) const;

  // Per-alpha interpolated frequency-0.5 crossing with its bracketing
  // v' pair; absent when the column never crosses.
  struct Crossing {
    double v_lo = 0.0;
    double v_hi = 0.0;
    double v_interp = 0.0;
  };
  std::optional<Crossing> demarcation(int ai) const;
};

// Every (cell, trial) uses the seed split from (master, alpha-index,
// vprime-index, trial-index); deterministic for any thread count.
SweepResult run_sweep(const SweepSpec& spec);

void persist_result(const SweepResult& result, const std::string& csv_path,
                    const std::string& json_path);
std::vector<SweepCell> load_sweep_csv(const std::string& csv_path);
void emit_plot(const SweepResult& result, const std::string& svg_path);

// Log-spaced grid helper, inclusive endpoints.
std::vector<double> log_spaced(double lo, double hi, int points);

}  // namespace flock
