#include "flock/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace flock {

namespace {

constexpr int kCheegerExactMaxN = 22;

bool is_stochastic(const Eigen::MatrixXd& P) {
  return P.minCoeff() >= -1e-12;
}

// Cut-weight(F, F^c) / |F| for the smaller side of a bipartition.
double conductance_value(const Eigen::MatrixXd& P,
                         const std::vector<bool>& in_f) {
  int n = static_cast<int>(P.rows());
  double cut = 0.0;
  int size = 0;
  for (int i = 0; i < n; ++i) {
    if (!in_f[i]) continue;
    ++size;
    for (int j = 0; j < n; ++j)
      if (!in_f[j] && j != i) cut += P(i, j);
  }
  return cut / size;
}

}  // namespace

Eigen::VectorXd eigen_symmetric(const Eigen::MatrixXd& P) {
  if (P.rows() != P.cols())
    throw std::invalid_argument("eigen_symmetric: matrix must be square");
  double asym = (P - P.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12)
    throw std::invalid_argument("eigen_symmetric: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      0.5 * (P + P.transpose()), Eigen::EigenvaluesOnly);
  Eigen::VectorXd ev = solver.eigenvalues();  // ascending
  return ev.reverse();
}

double essential_spectral_radius(const Eigen::MatrixXd& P) {
  Eigen::VectorXd ev = eigen_symmetric(P);
  int n = static_cast<int>(ev.size());
  if (n < 2) return 0.0;
  return std::max(std::fabs(ev[1]), std::fabs(ev[n - 1]));
}

ContractionResult contraction_check(const std::vector<SwarmState>& traj,
                                    const Kernel& kernel) {
  ContractionResult res;
  if (traj.empty()) return res;
  const Eigen::MatrixXd& V0 = traj.front().V;
  Eigen::RowVectorXd mean = V0.colwise().mean();
  double base = (V0.rowwise() - mean).norm();
  double product = 1.0;
  for (size_t k = 0; k + 1 < traj.size(); ++k) {
    Eigen::MatrixXd P = weight_matrix(traj[k], kernel);
    if (!is_stochastic(P)) res.all_stochastic = false;
    double lb = essential_spectral_radius(P);
    res.lambda_bar.push_back(lb);
    product *= lb;
    double lhs = (traj[k + 1].V.rowwise() - mean).norm();
    double rhs = base * product;
    double margin = (lhs - rhs) / std::max(base, 1e-300);
    res.worst_margin = std::max(res.worst_margin, margin);
    if (margin > 1e-9) res.holds = false;
  }
  return res;
}

double cheeger_exact(const Eigen::MatrixXd& P) {
  int n = static_cast<int>(P.rows());
  if (n > kCheegerExactMaxN)
    throw std::invalid_argument(
        "cheeger_exact: n too large, use cheeger_sweep");
  if (n < 2) return 0.0;
  // Incremental cut weights over all subset masks: adding vertex v to F
  // moves its cross-weight from cut-in to cut-out.
  std::vector<double> row_off(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i) row_off[i] += P(i, j);
  const std::uint32_t total = 1u << n;
  std::vector<double> cut(total, 0.0);
  std::vector<std::uint8_t> size(total, 0);
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 1; mask < total; ++mask) {
    int v = std::countr_zero(mask);
    std::uint32_t rest = mask & (mask - 1);
    double inner = 0.0;
    for (std::uint32_t m = rest; m != 0; m &= m - 1)
      inner += P(v, std::countr_zero(m));
    cut[mask] = cut[rest] + row_off[v] - 2.0 * inner;
    size[mask] = static_cast<std::uint8_t>(size[rest] + 1);
    if (2 * size[mask] <= n) best = std::min(best, cut[mask] / size[mask]);
  }
  return std::max(best, 0.0);
}

double cheeger_sweep(const Eigen::MatrixXd& P) {
  int n = static_cast<int>(P.rows());
  if (n < 2) return 0.0;
  double asym = (P - P.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12)
    throw std::invalid_argument("cheeger_sweep: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      0.5 * (P + P.transpose()));
  // Eigenvalues ascending; lambda_2 is the second largest.
  Eigen::VectorXd fiedler = solver.eigenvectors().col(n - 2);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return fiedler[a] < fiedler[b];
  });
  std::vector<bool> in_f(n, false);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n - 1; ++k) {
    in_f[order[k]] = true;
    int prefix = k + 1;
    // Use the smaller side as F so |F| <= n/2.
    std::vector<bool> side = in_f;
    if (2 * prefix > n)
      for (int i = 0; i < n; ++i) side[i] = !side[i];
    best = std::min(best, conductance_value(P, side));
  }
  return std::max(best, 0.0);
}

bool cheeger_inequality_check(const Eigen::MatrixXd& P) {
  Eigen::VectorXd ev = eigen_symmetric(P);
  double phi = cheeger_exact(P);
  return ev[1] <= 1.0 - phi * phi + 1e-9;
}

SpectralReport spectral_report(const Eigen::MatrixXd& P) {
  SpectralReport rep;
  rep.eigenvalues = eigen_symmetric(P);
  int n = static_cast<int>(rep.eigenvalues.size());
  rep.lambda_bar = n >= 2 ? std::max(std::fabs(rep.eigenvalues[1]),
                                     std::fabs(rep.eigenvalues[n - 1]))
                          : 0.0;
  rep.stochastic = is_stochastic(P);
  rep.phi_sweep = cheeger_sweep(P);
  if (n <= kCheegerExactMaxN) {
    rep.phi_exact = cheeger_exact(P);
    rep.cheeger_holds =
        rep.eigenvalues[1] <= 1.0 - *rep.phi_exact * *rep.phi_exact + 1e-9;
  }
  return rep;
}

}  // namespace flock
