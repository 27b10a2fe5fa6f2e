#include "gwf/kd_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gwf/errors.hpp"
#include "gwf/point_cloud.hpp"

namespace gwf {

namespace {
constexpr std::uint32_t kLeafSize = 8;
}

KdTree::KdTree(int dim, std::span<const double> coords)
    : dim_(dim), coords_(coords), count_(coords.size() / static_cast<std::size_t>(dim)) {
  if (count_ == 0) throw Error(ErrorKind::InvalidArgument, "k-d tree needs at least one point");
  if (count_ > std::numeric_limits<std::uint32_t>::max()) throw Error(ErrorKind::Resource, "too many points for k-d tree");
  index_.resize(count_);
  std::iota(index_.begin(), index_.end(), 0U);
  nodes_.reserve(2 * count_ / kLeafSize + 2);
  build(0, static_cast<std::uint32_t>(count_));
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize) return id;

  int axis = 0;
  double widest = -1.0;
  for (int k = 0; k < dim_; ++k) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::uint32_t n = begin; n < end; ++n) {
      double v = coords_[index_[n] * static_cast<std::size_t>(dim_) + k];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > widest) {
      widest = hi - lo;
      axis = k;
    }
  }
  if (widest <= 0.0) return id;  // all points coincide

  std::uint32_t mid = begin + (end - begin) / 2;
  auto coord = [&](std::uint32_t i) { return coords_[i * static_cast<std::size_t>(dim_) + axis]; };
  std::nth_element(index_.begin() + begin, index_.begin() + mid, index_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) { return coord(a) < coord(b); });
  double split = coord(index_[mid]);

  nodes_[id].axis = axis;
  nodes_[id].split = split;
  std::int32_t left = build(begin, mid);
  std::int32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

KdTree::Neighbor KdTree::nearest(std::span<const double> query) const {
  Neighbor best{count_, std::numeric_limits<double>::infinity()};
  nearest_rec(0, query, best);
  return best;
}

void KdTree::nearest_rec(std::int32_t id, std::span<const double> q, Neighbor& best) const {
  const Node& node = nodes_[id];
  if (node.axis < 0) {
    for (std::uint32_t n = node.begin; n < node.end; ++n) {
      std::size_t i = index_[n];
      double d = squared_distance(q, point(i));
      if (d < best.squared_distance || (d == best.squared_distance && i < best.index)) best = {i, d};
    }
    return;
  }
  // Left holds coordinates <= split, right holds coordinates >= split.
  double diff = q[node.axis] - node.split;
  std::int32_t first = diff <= 0.0 ? node.left : node.right;
  std::int32_t second = diff <= 0.0 ? node.right : node.left;
  nearest_rec(first, q, best);
  if (diff * diff <= best.squared_distance) nearest_rec(second, q, best);
}

std::vector<std::size_t> KdTree::within(std::span<const double> query, double radius) const {
  std::vector<std::size_t> out;
  double bound = radius * radius * (1.0 + 1e-9) + 1e-300;
  within_rec(0, query, radius, bound, out);
  std::sort(out.begin(), out.end());
  return out;
}

void KdTree::within_rec(std::int32_t id, std::span<const double> q, double radius, double bound,
                        std::vector<std::size_t>& out) const {
  const Node& node = nodes_[id];
  if (node.axis < 0) {
    for (std::uint32_t n = node.begin; n < node.end; ++n) {
      std::size_t i = index_[n];
      if (distance(q, point(i)) <= radius) out.push_back(i);
    }
    return;
  }
  double diff = q[node.axis] - node.split;
  if (diff <= 0.0 || diff * diff <= bound) within_rec(node.left, q, radius, bound, out);
  if (diff >= 0.0 || diff * diff <= bound) within_rec(node.right, q, radius, bound, out);
}

}  // namespace gwf
