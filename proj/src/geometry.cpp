#include "flock/geometry.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "flock/rng.hpp"
#include "flock/spatial.hpp"

namespace flock {

namespace {

// Union-find with path compression.
class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

std::size_t NeighborGraph::edge_count() const {
  std::size_t deg = 0;
  for (const auto& a : adjacency) deg += a.size();
  return deg / 2;
}

double unit_ball_volume(int d) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  return std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

double critical_radius(int n, int d) {
  if (n < 2) throw std::invalid_argument("critical_radius requires n >= 2");
  double pid = unit_ball_volume(d);
  return std::pow(std::pow(2.0, d - 1) * std::log(static_cast<double>(n)) /
                      (d * pid * n),
                  1.0 / d);
}

double radius_from_alpha(double alpha, int n, int d) {
  return std::pow(alpha * std::log(static_cast<double>(n)) / n, 1.0 / d);
}

PositionSample sample_positions(int n, int d, std::uint64_t seed) {
  if (n < 1 || d < 2)
    throw std::invalid_argument("sample_positions requires n >= 1, d >= 2");
  PositionSample s;
  s.n = n;
  s.d = d;
  s.seed = seed;
  s.X.resize(n, d);
  Rng rng(seed);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) s.X(i, j) = rng.next_double();
  return s;
}

NeighborGraph build_graph(const Eigen::MatrixXd& X, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  NeighborGraph g;
  g.n = static_cast<int>(X.rows());
  g.radius = radius;
  g.adjacency.assign(g.n, {});
  SpatialGrid grid(X, radius);
  grid.for_each_pair([&](int i, int j, double) {
    g.adjacency[i].push_back(j);
    g.adjacency[j].push_back(i);
  });
  for (auto& a : g.adjacency) std::sort(a.begin(), a.end());
  return g;
}

NeighborGraph build_graph(const PositionSample& positions, double radius) {
  return build_graph(positions.X, radius);
}

std::vector<int> components(const NeighborGraph& graph) {
  DisjointSets ds(graph.n);
  for (int i = 0; i < graph.n; ++i)
    for (int j : graph.adjacency[i])
      if (j > i) ds.unite(i, j);
  std::vector<int> label(graph.n);
  for (int i = 0; i < graph.n; ++i) label[i] = ds.find(i);
  return label;
}

bool is_connected(const NeighborGraph& graph) {
  if (graph.n <= 1) return true;
  auto label = components(graph);
  for (int l : label)
    if (l != label[0]) return false;
  return true;
}

ConnectivityEstimate connectivity_probability(int n, int d, double alpha,
                                              int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  ConnectivityEstimate est;
  est.n = n;
  est.d = d;
  est.alpha = alpha;
  est.radius = radius_from_alpha(alpha, n, d);
  est.trials = trials;
  for (int t = 0; t < trials; ++t) {
    auto sample = sample_positions(n, d, split_seed(seed, t));
    if (is_connected(build_graph(sample, est.radius))) ++est.connected_count;
  }
  est.frequency = static_cast<double>(est.connected_count) / trials;
  return est;
}

}  // namespace flock
