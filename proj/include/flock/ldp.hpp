#pragma once

#include <optional>
#include <vector>

#include "flock/kernel.hpp"

namespace flock {

// m0 = E[e^{theta xi}], m1 = E[xi e^{theta xi}], mean = E[xi] for
// xi = f(||X - x0||), X uniform in the cube, x0 the center.
struct MomentTriple {
  double m0 = 1.0;
  double m1 = 0.0;
  double mean = 0.0;
  bool cubature_fallback = false;  // radial formula invalid, tensor grid used
};

struct RateSolution {
  double kbar = 0.0;
  std::optional<double> thetabar;  // unset in the degenerate case
  double mean_xi = 0.0;
  bool degenerate = false;
  double residual_stationarity = 0.0;  // relative residual of (n-1)m1/m0 = kbar
  double residual_level = 0.0;         // relative residual of the log n level
};

// Radial moment formula, valid while the support ball around the cube
// center stays inside the cube ((1+delta)r <= 1/2). Beyond that a
// deterministic tensor-grid cubature over [0,1]^d is used and flagged.
MomentTriple moments(const Kernel& kernel, int d, double theta);

// True when xi is a.s. constant equal to f(0) (support covers the cube).
bool is_degenerate(const Kernel& kernel, int d);

// I_{n,delta}(x) = sup_{theta>0} {theta x - (n-1) log m0(theta)};
// 0 for x <= (n-1)E[xi]. The kernel carries delta via its shift.
double rate_function(const Kernel& kernel, int n, int d, double x);

// Solves the coupled identities for (kbar, thetabar); degenerate kernels
// return kbar = (n-1) f(0).
RateSolution solve_kbar(const Kernel& kernel, int n, int d);

// H(a) = 1 - a + a log a with H(0) = 1, and its two inverse branches.
double H(double a);
double H_minus_inv(double y);  // [0,1] -> [0,1]
double H_plus_inv(double y);   // [0,inf) -> [1,inf)

struct AsymptoticPair {
  double kbar = 0.0;
  double theta = 0.0;
};

// Leading-order kbar/theta for the indicator kernel with
// r = c n^{-1/d} (log n)^{1/d}.
AsymptoticPair example2_asymptotic(double c, double b_n, int d, int n);

// Leading-order kbar/theta for the triangular kernel with the same radius
// law; solves the x* equation by bracketed root-finding.
AsymptoticPair example3_asymptotic(double c, double b_n, int d, int n);

struct Proposition1Report {
  std::vector<int> n_grid;
  std::vector<double> kbar;               // per n
  std::vector<double> theta_ratio;        // kbar / (n r^d f(0))
  std::vector<double> mean_ratio;         // kbar / (n E[xi])
  std::vector<double> delta_grid;         // shifts probed at the largest n
  std::vector<double> delta_slope;        // (kbar_delta/kbar - 1) / delta
};

// Ratio diagnostics across an n-grid for a kernel family n -> Kernel.
template <class KernelGen>
Proposition1Report proposition1_checks(const KernelGen& gen, int d,
                                       const std::vector<int>& n_grid,
                                       const std::vector<double>& deltas = {
                                           0.05, 0.1, 0.2}) {
  Proposition1Report rep;
  rep.n_grid = n_grid;
  for (int n : n_grid) {
    Kernel k = gen(n);
    RateSolution sol = solve_kbar(k, n, d);
    rep.kbar.push_back(sol.kbar);
    double rd = 1.0;
    for (int j = 0; j < d; ++j) rd *= k.radius();
    rep.theta_ratio.push_back(sol.kbar / (n * rd * k.peak()));
    rep.mean_ratio.push_back(sol.kbar / (n * sol.mean_xi));
  }
  int n_last = n_grid.back();
  Kernel k = gen(n_last);
  double kbar0 = rep.kbar.back();
  rep.delta_grid = deltas;
  for (double delta : deltas) {
    RateSolution sol = solve_kbar(k.shifted(delta), n_last, d);
    rep.delta_slope.push_back((sol.kbar / kbar0 - 1.0) / delta);
  }
  return rep;
}

}  // namespace flock
