#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "marinetrack/geodesy.hpp"

namespace marinetrack {

/// Static 2-D k-d tree over East-North points. Nearest-neighbour ties resolve
/// to the lowest point index.
class KdTree2D {
 public:
  KdTree2D() = default;
  explicit KdTree2D(std::span<const EnuPoint> points) : points_(points.begin(), points.end()) {
    std::vector<std::size_t> idx(points_.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    nodes_.reserve(points_.size());
    root_ = build(idx, 0, idx.size(), 0);
  }

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const EnuPoint& point(std::size_t i) const { return points_[i]; }

  std::size_t nearest(const EnuPoint& q) const {
    if (points_.empty()) throw std::invalid_argument("KdTree2D::nearest on an empty point set");
    Best best;
    search_nearest(root_, q, best);
    return best.index;
  }

  /// Indices of all points within `radius` of q (inclusive), ascending.
  std::vector<std::size_t> within(const EnuPoint& q, double radius) const {
    std::vector<std::size_t> out;
    if (!points_.empty()) search_radius(root_, q, radius * radius, out);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  static constexpr long kNone = -1;

  struct Node {
    std::size_t index;
    int axis;
    long left;
    long right;
  };

  struct Best {
    std::size_t index{0};
    double dist2{std::numeric_limits<double>::infinity()};
  };

  static double coord(const EnuPoint& p, int axis) { return axis == 0 ? p.east : p.north; }
  static double dist2(const EnuPoint& a, const EnuPoint& b) {
    const double de = a.east - b.east;
    const double dn = a.north - b.north;
    return de * de + dn * dn;
  }

  long build(std::vector<std::size_t>& idx, std::size_t lo, std::size_t hi, int depth) {
    if (lo >= hi) return kNone;
    const int axis = depth % 2;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(idx.begin() + static_cast<long>(lo), idx.begin() + static_cast<long>(mid),
                     idx.begin() + static_cast<long>(hi), [&](std::size_t a, std::size_t b) {
                       const double ca = coord(points_[a], axis);
                       const double cb = coord(points_[b], axis);
                       return ca < cb || (ca == cb && a < b);
                     });
    const long node = static_cast<long>(nodes_.size());
    nodes_.push_back({idx[mid], axis, kNone, kNone});
    const long left = build(idx, lo, mid, depth + 1);
    const long right = build(idx, mid + 1, hi, depth + 1);
    nodes_[static_cast<std::size_t>(node)].left = left;
    nodes_[static_cast<std::size_t>(node)].right = right;
    return node;
  }

  void search_nearest(long node_id, const EnuPoint& q, Best& best) const {
    if (node_id == kNone) return;
    const Node& node = nodes_[static_cast<std::size_t>(node_id)];
    const EnuPoint& p = points_[node.index];
    const double d2 = dist2(p, q);
    if (d2 < best.dist2 || (d2 == best.dist2 && node.index < best.index)) {
      best = {node.index, d2};
    }
    const double diff = coord(q, node.axis) - coord(p, node.axis);
    const long near = diff < 0.0 ? node.left : node.right;
    const long far = diff < 0.0 ? node.right : node.left;
    search_nearest(near, q, best);
    // Equality still descends: a tied point with a lower index may lie there.
    if (diff * diff <= best.dist2) search_nearest(far, q, best);
  }

  void search_radius(long node_id, const EnuPoint& q, double r2, std::vector<std::size_t>& out) const {
    if (node_id == kNone) return;
    const Node& node = nodes_[static_cast<std::size_t>(node_id)];
    const EnuPoint& p = points_[node.index];
    if (dist2(p, q) <= r2) out.push_back(node.index);
    const double diff = coord(q, node.axis) - coord(p, node.axis);
    if (diff <= 0.0 || diff * diff <= r2) search_radius(node.left, q, r2, out);
    if (diff >= 0.0 || diff * diff <= r2) search_radius(node.right, q, r2, out);
  }

  std::vector<EnuPoint> points_;
  std::vector<Node> nodes_;
  long root_{kNone};
};

}  // namespace marinetrack
