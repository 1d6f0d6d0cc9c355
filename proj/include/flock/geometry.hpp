#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace flock {

// n i.i.d. uniform points in [0,1]^d; bit-for-bit reproducible from the seed.
struct PositionSample {
  int n = 0;
  int d = 0;
  std::uint64_t seed = 0;
  Eigen::MatrixXd X;  // n x d
};

// Undirected graph with an edge iff ||X_i - X_j|| <= radius.
struct NeighborGraph {
  int n = 0;
  double radius = 0.0;
  std::vector<std::vector<int>> adjacency;  // sorted neighbor lists

  std::size_t edge_count() const;
};

// Volume of the unit ball in R^d.
double unit_ball_volume(int d);

// R_c(n) = (2^{d-1} log n / (d pi_d n))^{1/d}, natural log.
double critical_radius(int n, int d);

// Radius from the scaling law r = (alpha log n / n)^{1/d}.
double radius_from_alpha(double alpha, int n, int d);

PositionSample sample_positions(int n, int d, std::uint64_t seed);

NeighborGraph build_graph(const PositionSample& positions, double radius);
NeighborGraph build_graph(const Eigen::MatrixXd& X, double radius);

bool is_connected(const NeighborGraph& graph);

// Connected component label per vertex (labels are smallest member index).
std::vector<int> components(const NeighborGraph& graph);

struct ConnectivityEstimate {
  int n = 0;
  int d = 0;
  double alpha = 0.0;
  double radius = 0.0;
  int trials = 0;
  int connected_count = 0;
  double frequency = 0.0;
};

// Monte Carlo frequency of initial-graph connectivity at the alpha radius
// law. Trial t uses the stream seed split from (seed, t).
ConnectivityEstimate connectivity_probability(int n, int d, double alpha,
                                              int trials, std::uint64_t seed);

}  // namespace flock
