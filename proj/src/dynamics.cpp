#include "flock/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "flock/rng.hpp"
#include "flock/spatial.hpp"

namespace flock {

namespace {

// Accumulates the symmetric velocity coupling and the weighted degrees.
// Pairwise antisymmetric increments keep the velocity mean conserved to
// rounding.
template <class WeightFn>
void accumulate_coupling(const SwarmState& state, const SpatialGrid& grid,
                         WeightFn weight, Eigen::MatrixXd& dV,
                         Eigen::VectorXd& degree, long& pair_count) {
  const int d = state.d();
  grid.for_each_pair([&](int i, int j, double dist) {
    double w = weight(dist);
    if (w == 0.0) return;
    ++pair_count;
    degree[i] += w;
    degree[j] += w;
    for (int k = 0; k < d; ++k) {
      double diff = w * (state.V(j, k) - state.V(i, k));
      dV(i, k) += diff;
      dV(j, k) -= diff;
    }
  });
}

void couple_velocities(const SwarmState& state, const Kernel& kernel,
                       SpatialGrid& grid, Eigen::MatrixXd& dV,
                       Eigen::VectorXd& degree, long& pair_count) {
  dV.setZero(state.n(), state.d());
  degree.setZero(state.n());
  pair_count = 0;
  grid.build(state.X, kernel.support_end());
  // Hoist the kernel dispatch out of the pair loop for the common families.
  if (kernel.shift() == 0.0 && kernel.family() == KernelFamily::Triangular) {
    double amp = kernel.amplitude(), r = kernel.radius();
    accumulate_coupling(
        state, grid,
        [amp, r](double dist) {
          return dist < r ? amp * (1.0 - dist / r) : 0.0;
        },
        dV, degree, pair_count);
  } else if (kernel.shift() == 0.0 &&
             kernel.family() == KernelFamily::Indicator) {
    double amp = kernel.amplitude(), r = kernel.radius();
    accumulate_coupling(
        state, grid, [amp, r](double dist) { return dist < r ? amp : 0.0; },
        dV, degree, pair_count);
  } else {
    accumulate_coupling(
        state, grid, [&kernel](double dist) { return kernel.eval(dist); }, dV,
        degree, pair_count);
  }
}

// True when, with velocities frozen, no pair can ever come within the
// interaction radius again. Distances are convex along straight lines, so
// it is enough that each pair is past (or at) its closest approach or that
// the closest approach still clears the radius.
bool certified_separated(const SwarmState& state, double radius) {
  int n = state.n();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Eigen::RowVectorXd p = state.X.row(i) - state.X.row(j);
      Eigen::RowVectorXd v = state.V.row(i) - state.V.row(j);
      double dist2 = p.squaredNorm();
      if (dist2 < radius * radius) return false;
      double vv = v.squaredNorm();
      if (vv == 0.0) continue;
      double pv = p.dot(v);
      if (pv >= 0.0) continue;  // already receding
      double min2 = dist2 - pv * pv / vv;
      if (min2 < radius * radius) return false;
    }
  }
  return true;
}

}  // namespace

Eigen::MatrixXd weight_matrix(const SwarmState& state, const Kernel& kernel) {
  if (kernel.shift() != 0.0)
    throw std::invalid_argument("weight_matrix requires an unshifted kernel");
  int n = state.n();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  SpatialGrid grid(state.X, kernel.support_end());
  grid.for_each_pair([&](int i, int j, double dist) {
    double w = kernel.eval(dist);
    P(i, j) = w;
    P(j, i) = w;
  });
  for (int i = 0; i < n; ++i) P(i, i) = 1.0 - (P.row(i).sum() - P(i, i));
  return P;
}

SwarmState step(const SwarmState& state, const Kernel& kernel) {
  SwarmState next;
  next.t = state.t + 1;
  next.X = state.X + state.V;
  Eigen::MatrixXd dV;
  Eigen::VectorXd degree;
  SpatialGrid grid;
  long pairs = 0;
  couple_velocities(state, kernel, grid, dV, degree, pairs);
  next.V = state.V + dV;
  return next;
}

double max_weighted_degree(const SwarmState& state, const Kernel& kernel) {
  Eigen::MatrixXd dV;
  Eigen::VectorXd degree;
  SpatialGrid grid;
  long pairs = 0;
  couple_velocities(state, kernel, grid, dV, degree, pairs);
  return state.n() > 0 ? degree.maxCoeff() : 0.0;
}

double L_functional(const Eigen::MatrixXd& V0) {
  Eigen::RowVectorXd mean = V0.colwise().mean();
  Eigen::MatrixXd dev = V0.rowwise() - mean;
  double max_norm = dev.cwiseAbs().maxCoeff();
  if (max_norm == 0.0) return 0.0;
  double fro = dev.norm();
  return max_norm * (std::log(fro / max_norm) + 1.0);
}

double spread_bound(const Eigen::MatrixXd& V) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    double range = V.col(j).maxCoeff() - V.col(j).minCoeff();
    sum += range * range;
  }
  return std::sqrt(sum);
}

VelocitySpread velocity_spread(const SwarmState& state) {
  VelocitySpread s;
  s.a = spread_bound(state.V);
  int n = state.n();
  double max2 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      max2 = std::max(max2, (state.V.row(i) - state.V.row(j)).squaredNorm());
  s.max_pair = std::sqrt(max2);
  return s;
}

double drift(const Eigen::MatrixXd& X0, const Eigen::MatrixXd& Xt, int i,
             int j) {
  return (Xt.row(i) - Xt.row(j) - X0.row(i) + X0.row(j)).norm();
}

RunReport simulate(const RunConfig& config) {
  if (config.X0.rows() != config.V0.rows() ||
      config.X0.cols() != config.V0.cols())
    throw std::invalid_argument("X0 and V0 dimensions must agree");
  SwarmState state{0, config.X0, config.V0};
  const int n = state.n();
  const int d = state.d();
  const double sqrt_d = std::sqrt(static_cast<double>(d));

  RunReport rep;
  rep.initial_spread = velocity_spread(state).max_pair;
  rep.flock_tol_abs = rep.initial_spread > 0.0
                          ? config.flock_tol * rep.initial_spread
                          : config.flock_tol;

  // Sampled drift pairs (exact mode scans all pairs every step).
  std::vector<std::pair<int, int>> drift_pairs;
  if (config.drift_mode == DriftMode::Sampled && n >= 2) {
    Rng rng(split_seed(config.seed, 0x647269667444ULL));
    for (int k = 0; k < 64; ++k) {
      int i = static_cast<int>(rng.next_u64() % n);
      int j = static_cast<int>(rng.next_u64() % n);
      if (i != j) drift_pairs.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  rep.drift_exact = config.drift_mode == DriftMode::Exact;

  Eigen::MatrixXd dV;
  Eigen::VectorXd degree;
  SpatialGrid grid;
  long next_separation_check = 0;

  for (long t = 0; t <= config.t_max; ++t) {
    long pairs = 0;
    couple_velocities(state, config.kernel, grid, dV, degree, pairs);
    double delta = n > 0 ? degree.maxCoeff() : 0.0;
    double a = spread_bound(state.V);
    if (config.record_series) {
      rep.spread_series.push_back(a);
      rep.delta_series.push_back(delta);
    }
    if (delta > 1.0 + 1e-12) rep.stochastic_throughout = false;

    switch (config.drift_mode) {
      case DriftMode::Exact:
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j)
            rep.max_drift =
                std::max(rep.max_drift, drift(config.X0, state.X, i, j));
        break;
      case DriftMode::Sampled:
        for (auto [i, j] : drift_pairs)
          rep.max_drift =
              std::max(rep.max_drift, drift(config.X0, state.X, i, j));
        break;
      case DriftMode::Off:
        break;
    }

    // a(t) bounds max_pair from above; the exact scan runs only when the
    // bound says the flocking test could pass.
    bool check_exact = config.exact_pairs || a <= sqrt_d * rep.flock_tol_abs;
    if (check_exact) {
      double mp = velocity_spread(state).max_pair;
      if (mp < rep.flock_tol_abs) {
        rep.flocked = true;
        rep.t_flock = t;
        rep.final_spread = mp;
        rep.steps = t;
        return rep;
      }
    }

    if (pairs == 0 && t >= next_separation_check) {
      next_separation_check = t + std::max<long>(16, t / 2);
      if (certified_separated(state, config.kernel.support_end())) {
        rep.certified_separated = true;
        rep.final_spread = velocity_spread(state).max_pair;
        rep.steps = t;
        return rep;
      }
    }

    // Apply the already-computed coupling in place: X(t+1) = X(t) + V(t),
    // V(t+1) = V(t) + dV with dV built from the pre-update state.
    if (t < config.t_max) {
      state.X += state.V;
      state.V += dV;
      ++state.t;
    }
  }
  rep.steps = config.t_max;
  rep.final_spread = velocity_spread(state).max_pair;
  return rep;
}

std::vector<SwarmState> record_trajectory(const SwarmState& initial,
                                          const Kernel& kernel, long steps) {
  std::vector<SwarmState> traj;
  traj.reserve(static_cast<size_t>(steps) + 1);
  traj.push_back(initial);
  for (long t = 0; t < steps; ++t) traj.push_back(step(traj.back(), kernel));
  return traj;
}

double max_drift(const std::vector<SwarmState>& traj) {
  if (traj.empty()) return 0.0;
  const Eigen::MatrixXd& X0 = traj.front().X;
  int n = static_cast<int>(X0.rows());
  double worst = 0.0;
  for (const auto& st : traj)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        worst = std::max(worst, drift(X0, st.X, i, j));
  return worst;
}

}  // namespace flock
