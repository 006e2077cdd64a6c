#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rlex {

/// Flat storage for N points in R^m.
struct PointSet {
  std::size_t count = 0;
  std::size_t dim = 0;
  std::vector<double> data;  // count * dim, row-major

  PointSet() = default;
  PointSet(std::size_t n, std::size_t m) : count(n), dim(m), data(n * m, 0.0) {}

  static PointSet from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw std::invalid_argument("point set: no points");
    PointSet ps(rows.size(), rows.front().size());
    if (ps.dim == 0) throw std::invalid_argument("point set: zero-dimensional points");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != ps.dim) throw std::invalid_argument("point set: ragged dimensions");
      std::copy(rows[i].begin(), rows[i].end(), ps.data.begin() + i * ps.dim);
    }
    return ps;
  }

  const double* point(std::size_t i) const { return data.data() + i * dim; }
  double* point(std::size_t i) { return data.data() + i * dim; }
};

enum class KnnBackend { kBruteForce, kKdTree, kAuto };

// Brute force below this size, kd-tree above.
inline constexpr std::size_t kKnnBackendCrossover = 2000;

namespace detail {

inline double squared_distance(const double* a, const double* b, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

// (squared distance, index) with index as the tie-breaker.
using Neighbor = std::pair<double, std::size_t>;

// Fixed-capacity worst-at-front heap of the k best neighbors seen so far.
class NeighborHeap {
 public:
  explicit NeighborHeap(std::size_t k) : capacity_(k) { items_.reserve(k); }

  bool full() const { return items_.size() == capacity_; }
  const Neighbor& worst() const { return items_.front(); }

  bool would_accept(const Neighbor& n) const { return !full() || n < items_.front(); }

  void offer(const Neighbor& n) {
    if (!full()) {
      items_.push_back(n);
      std::push_heap(items_.begin(), items_.end());
    } else if (n < items_.front()) {
      std::pop_heap(items_.begin(), items_.end());
      items_.back() = n;
      std::push_heap(items_.begin(), items_.end());
    }
  }

  std::vector<Neighbor> sorted() && {
    std::sort_heap(items_.begin(), items_.end());
    return std::move(items_);
  }

 private:
  std::size_t capacity_;
  std::vector<Neighbor> items_;
};

class KdTree {
 public:
  KdTree(const PointSet& points) : points_(points), nodes_() {
    std::vector<std::size_t> order(points.count);
    std::iota(order.begin(), order.end(), 0);
    nodes_.reserve(points.count);
    root_ = build(order.begin(), order.end(), 0);
  }

  void query(const double* q, std::size_t skip_index, NeighborHeap& heap) const {
    search(root_, q, skip_index, heap);
  }

 private:
  struct Node {
    std::size_t point_index;
    std::size_t axis;
    int left = -1;
    int right = -1;
  };

  using Iter = std::vector<std::size_t>::iterator;

  int build(Iter first, Iter last, std::size_t depth) {
    if (first == last) return -1;
    const std::size_t axis = depth % points_.dim;
    Iter mid = first + (last - first) / 2;
    std::nth_element(first, mid, last, [&](std::size_t a, std::size_t b) {
      const double va = points_.point(a)[axis];
      const double vb = points_.point(b)[axis];
      return va < vb || (va == vb && a < b);
    });
    Node node;
    node.point_index = *mid;
    node.axis = axis;
    const int self = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    const int left = build(first, mid, depth + 1);
    const int right = build(mid + 1, last, depth + 1);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
  }

  void search(int node_id, const double* q, std::size_t skip_index, NeighborHeap& heap) const {
    if (node_id < 0) return;
    const Node& node = nodes_[node_id];
    const double* p = points_.point(node.point_index);
    if (node.point_index != skip_index)
      heap.offer({squared_distance(q, p, points_.dim), node.point_index});
    const double delta = q[node.axis] - p[node.axis];
    const int near = delta < 0.0 ? node.left : node.right;
    const int far = delta < 0.0 ? node.right : node.left;
    search(near, q, skip_index, heap);
    // The far side can only contain a better neighbor if the splitting plane
    // is at least as close as the current worst (ties included, so backends
    // agree exactly).
    if (!heap.full() || delta * delta <= heap.worst().first) search(far, q, skip_index, heap);
  }

  const PointSet& points_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace detail

/// For every point, the sorted distances to its k nearest neighbors among the
/// set (self excluded). Distance ties rank by point index; the metric is
/// Euclidean.
inline std::vector<std::vector<double>> neighbor_distance_table(const PointSet& points, int k,
                                                                KnnBackend backend = KnnBackend::kAuto) {
  if (points.count < static_cast<std::size_t>(k) + 1)
    throw std::invalid_argument("knn: need at least k+1 points");
  if (k < 1) throw std::invalid_argument("knn: k must be >= 1");
  const bool use_tree = backend == KnnBackend::kKdTree ||
                        (backend == KnnBackend::kAuto && points.count >= kKnnBackendCrossover);
  std::vector<std::vector<double>> table(points.count);
  if (use_tree) {
    detail::KdTree tree(points);
    for (std::size_t i = 0; i < points.count; ++i) {
      detail::NeighborHeap heap(static_cast<std::size_t>(k));
      tree.query(points.point(i), i, heap);
      auto found = std::move(heap).sorted();
      table[i].reserve(found.size());
      for (const auto& n : found) table[i].push_back(std::sqrt(n.first));
    }
  } else {
    for (std::size_t i = 0; i < points.count; ++i) {
      detail::NeighborHeap heap(static_cast<std::size_t>(k));
      const double* q = points.point(i);
      for (std::size_t j = 0; j < points.count; ++j) {
        if (j == i) continue;
        heap.offer({detail::squared_distance(q, points.point(j), points.dim), j});
      }
      auto found = std::move(heap).sorted();
      table[i].reserve(found.size());
      for (const auto& n : found) table[i].push_back(std::sqrt(n.first));
    }
  }
  return table;
}

/// Distance from each point to its k-th nearest neighbor.
inline std::vector<double> kth_neighbor_distances(const PointSet& points, int k,
                                                  KnnBackend backend = KnnBackend::kAuto) {
  auto table = neighbor_distance_table(points, k, backend);
  std::vector<double> out(points.count);
  for (std::size_t i = 0; i < points.count; ++i) out[i] = table[i].back();
  return out;
}

/// k-th nearest neighbor distance of an external query against a point set.
inline double kth_neighbor_distance_of(const PointSet& points, const std::vector<double>& query, int k,
                                       KnnBackend backend = KnnBackend::kAuto) {
  if (query.size() != points.dim) throw std::invalid_argument("knn: query dimension mismatch");
  if (points.count < static_cast<std::size_t>(k)) throw std::invalid_argument("knn: need at least k points");
  const bool use_tree = backend == KnnBackend::kKdTree ||
                        (backend == KnnBackend::kAuto && points.count >= kKnnBackendCrossover);
  detail::NeighborHeap heap(static_cast<std::size_t>(k));
  if (use_tree) {
    detail::KdTree tree(points);
    tree.query(query.data(), points.count, heap);  // skip index out of range: nothing skipped
  } else {
    for (std::size_t j = 0; j < points.count; ++j) {
      heap.offer({detail::squared_distance(query.data(), points.point(j), points.dim), j});
    }
  }
  auto found = std::move(heap).sorted();
  return std::sqrt(found.back().first);
}

}  // namespace rlex
