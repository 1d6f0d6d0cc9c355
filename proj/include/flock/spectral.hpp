#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "flock/dynamics.hpp"

namespace flock {

// All eigenvalues of a symmetric matrix, sorted descending. Rejects inputs
// with asymmetry above 1e-12.
Eigen::VectorXd eigen_symmetric(const Eigen::MatrixXd& P);

// max(|lambda_2|, |lambda_n|).
double essential_spectral_radius(const Eigen::MatrixXd& P);

struct ContractionResult {
  bool holds = true;
  bool all_stochastic = true;
  double worst_margin = 0.0;  // max over steps of lhs - rhs (relative)
  std::vector<double> lambda_bar;  // per step
};

// Checks ||V(k) - Vbar||_F <= ||V(0) - Vbar||_F prod_{i<k} lambda_bar(i)
// at every recorded step, within 1e-9 relative slack.
ContractionResult contraction_check(const std::vector<SwarmState>& traj,
                                    const Kernel& kernel);

// Exact Cheeger constant: min over nonempty F with |F| <= n/2 of
// cut-weight(F, F^c) / |F|. Exponential enumeration; n <= 22.
double cheeger_exact(const Eigen::MatrixXd& P);

// Upper bound from the n-1 sweep cuts ordered by the lambda_2 eigenvector.
double cheeger_sweep(const Eigen::MatrixXd& P);

// lambda_2 <= 1 - Phi^2 + 1e-9 with the exact Phi (n <= 22).
bool cheeger_inequality_check(const Eigen::MatrixXd& P);

struct SpectralReport {
  Eigen::VectorXd eigenvalues;  // descending
  double lambda_bar = 0.0;
  std::optional<double> phi_exact;
  double phi_sweep = 0.0;
  std::optional<bool> cheeger_holds;
  bool stochastic = true;
};

SpectralReport spectral_report(const Eigen::MatrixXd& P);

}  // namespace flock
