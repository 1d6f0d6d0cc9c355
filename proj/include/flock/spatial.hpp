#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace flock {

// Uniform-grid index over an n x d point set. Cells have side `radius`,
// so all pairs at distance <= radius lie in adjacent cells and the
// expected scan cost is O(n * E[degree]).
//
// Cell coordinates are packed into a single integer key when the grid
// extent allows. Small packed grids use a dense counting-sort layout;
// huge packed grids use sorted key groups; unpackable extents (absurd
// aspect ratios at high d) fall back to hashed keys with candidate
// deduplication, so collisions cost time but never correctness.
class SpatialGrid {
 public:
  SpatialGrid() = default;

  SpatialGrid(const Eigen::MatrixXd& points, double radius) {
    build(points, radius);
  }

  // Re-indexes a new point set, reusing the internal buffers. Cheap to
  // call every simulation step.
  void build(const Eigen::MatrixXd& points, double radius) {
    points_ = &points;
    radius_ = radius;
    if (d_ != static_cast<int>(points.cols())) {
      d_ = static_cast<int>(points.cols());
      // Forward half of the 3^d neighbor offsets (first nonzero entry +1):
      // each cross-cell pair is visited from exactly one side.
      forward_.clear();
      std::vector<std::int64_t> off(d_, -1);
      for (;;) {
        bool fwd = false;
        for (int j = 0; j < d_; ++j) {
          if (off[j] == 0) continue;
          fwd = off[j] > 0;
          break;
        }
        if (fwd) forward_.insert(forward_.end(), off.begin(), off.end());
        int axis = 0;
        while (axis < d_ && off[axis] == 1) off[axis++] = -1;
        if (axis == d_) break;
        ++off[axis];
      }
    }
    group_keys_.clear();
    group_start_.clear();
    const int n = static_cast<int>(points.rows());
    coords_.resize(static_cast<std::size_t>(n) * d_);
    pts_.resize(static_cast<std::size_t>(n) * d_);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d_; ++j)
        pts_[static_cast<std::size_t>(i) * d_ + j] = points(i, j);
    std::vector<std::int64_t> lo(d_, 0), hi(d_, 0);
    for (int j = 0; j < d_; ++j) {
      double base = n > 0 ? points.col(j).minCoeff() : 0.0;
      for (int i = 0; i < n; ++i) {
        auto c = static_cast<std::int64_t>(
            std::floor((points(i, j) - base) / radius));
        coords_[static_cast<std::size_t>(i) * d_ + j] = c;
        lo[j] = std::min(lo[j], c);
        hi[j] = std::max(hi[j], c);
      }
    }
    // Shift so every coordinate (and its +-1 neighbors) is >= 0, and pick
    // the per-dimension stride for packing.
    span_ = 3;
    for (int j = 0; j < d_; ++j) span_ = std::max(span_, hi[j] - lo[j] + 4);
    double total = 1.0;
    for (int j = 0; j < d_; ++j) total *= static_cast<double>(span_);
    mode_ = total <= (1 << 22) ? Mode::Dense
            : total < 4.6e18   ? Mode::Sorted
                               : Mode::Hashed;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d_; ++j)
        coords_[static_cast<std::size_t>(i) * d_ + j] += 1 - lo[j];

    point_key_.resize(n);
    for (int i = 0; i < n; ++i)
      point_key_[i] = key_of(&coords_[static_cast<std::size_t>(i) * d_]);
    order_.resize(n);

    if (mode_ == Mode::Dense) {
      auto cells = static_cast<std::size_t>(total);
      dense_start_.assign(cells + 1, 0);
      for (int i = 0; i < n; ++i) ++dense_start_[point_key_[i] + 1];
      for (std::size_t c = 1; c <= cells; ++c)
        dense_start_[c] += dense_start_[c - 1];
      cursor_.assign(dense_start_.begin(), dense_start_.end() - 1);
      for (int i = 0; i < n; ++i) order_[cursor_[point_key_[i]]++] = i;
    } else {
      std::iota(order_.begin(), order_.end(), 0);
      std::sort(order_.begin(), order_.end(), [&](int a, int b) {
        return point_key_[a] != point_key_[b] ? point_key_[a] < point_key_[b]
                                              : a < b;
      });
      for (int k = 0; k < n; ++k) {
        std::uint64_t key = point_key_[order_[k]];
        if (group_keys_.empty() || group_keys_.back() != key) {
          group_keys_.push_back(key);
          group_start_.push_back(k);
        }
      }
      group_start_.push_back(n);
    }
  }

  // Calls cb(i, j, dist) for every pair i < j with dist <= radius.
  template <class Callback>
  void for_each_pair(Callback&& cb) const {
    const int n = static_cast<int>(points_->rows());
    const double r2 = radius_ * radius_;
    std::vector<std::int64_t> nb(d_);
    if (mode_ != Mode::Hashed) {
      for (int i = 0; i < n; ++i) {
        const std::int64_t* ci = &coords_[static_cast<std::size_t>(i) * d_];
        // Own cell: order_ groups share a cell, take the later entries.
        auto [begin, end] = range_of(key_of(ci));
        for (int k = begin; k < end; ++k) {
          int j = order_[k];
          if (j > i) emit(i, j, r2, cb);
        }
        // Forward neighbor cells: all entries, pair seen from one side only.
        for (std::size_t o = 0; o < forward_.size(); o += d_) {
          for (int j = 0; j < d_; ++j) nb[j] = ci[j] + forward_[o + j];
          auto [b2, e2] = range_of(key_of(nb.data()));
          for (int k = b2; k < e2; ++k) {
            int j = order_[k];
            emit(std::min(i, j), std::max(i, j), r2, cb);
          }
        }
      }
      return;
    }
    // Hashed fallback: full 3^d shell with deduplicated candidates, so key
    // collisions never double-count a pair.
    std::vector<int> dedup;
    for (int i = 0; i < n; ++i) {
      const std::int64_t* ci = &coords_[static_cast<std::size_t>(i) * d_];
      dedup.clear();
      for (int j = 0; j < d_; ++j) nb[j] = ci[j] - 1;
      for (;;) {
        auto [begin, end] = range_of(key_of(nb.data()));
        for (int k = begin; k < end; ++k)
          if (order_[k] > i) dedup.push_back(order_[k]);
        int axis = 0;
        while (axis < d_ && nb[axis] == ci[axis] + 1) {
          nb[axis] = ci[axis] - 1;
          ++axis;
        }
        if (axis == d_) break;
        ++nb[axis];
      }
      std::sort(dedup.begin(), dedup.end());
      dedup.erase(std::unique(dedup.begin(), dedup.end()), dedup.end());
      for (int j : dedup) emit(i, j, r2, cb);
    }
  }

 private:
  enum class Mode { Dense, Sorted, Hashed };

  std::pair<int, int> range_of(std::uint64_t key) const {
    if (mode_ == Mode::Dense) return {dense_start_[key], dense_start_[key + 1]};
    auto it = std::lower_bound(group_keys_.begin(), group_keys_.end(), key);
    if (it == group_keys_.end() || *it != key) return {0, 0};
    auto g = static_cast<int>(it - group_keys_.begin());
    return {group_start_[g], group_start_[g + 1]};
  }

  template <class Callback>
  void emit(int i, int j, double r2, Callback&& cb) const {
    const double* pi = &pts_[static_cast<std::size_t>(i) * d_];
    const double* pj = &pts_[static_cast<std::size_t>(j) * d_];
    double dist2 = 0.0;
    for (int k = 0; k < d_; ++k) {
      double diff = pi[k] - pj[k];
      dist2 += diff * diff;
    }
    if (dist2 <= r2) cb(i, j, std::sqrt(dist2));
  }

  std::uint64_t key_of(const std::int64_t* c) const {
    if (mode_ != Mode::Hashed) {
      std::uint64_t key = 0;
      for (int j = 0; j < d_; ++j)
        key = key * static_cast<std::uint64_t>(span_) +
              static_cast<std::uint64_t>(c[j]);
      return key;
    }
    std::uint64_t h = 0x2545f4914f6cdd1dULL;
    for (int j = 0; j < d_; ++j) {
      h ^= static_cast<std::uint64_t>(c[j]) + 0x9e3779b97f4a7c15ULL +
           (h << 6) + (h >> 2);
      h *= 0xff51afd7ed558ccdULL;
    }
    return h;
  }

  const Eigen::MatrixXd* points_ = nullptr;
  double radius_ = 1.0;
  int d_ = 0;
  Mode mode_ = Mode::Dense;
  std::int64_t span_ = 3;
  std::vector<double> pts_;                // row-major copy of the points
  std::vector<std::int64_t> forward_;      // forward offsets, d_ at a time
  std::vector<std::int64_t> coords_;       // n x d cell coordinates, shifted
  std::vector<std::uint64_t> point_key_;   // scratch, reused across builds
  std::vector<int> cursor_;                // scratch, reused across builds
  std::vector<int> order_;                 // point indices grouped by cell
  std::vector<int> dense_start_;           // per-cell offsets (dense mode)
  std::vector<std::uint64_t> group_keys_;  // sorted unique cell keys
  std::vector<int> group_start_;           // offsets into order_, size + 1
};

}  // namespace flock
