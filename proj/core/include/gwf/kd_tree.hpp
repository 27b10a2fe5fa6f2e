#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gwf {

// Static k-d tree over a flat row-major coordinate buffer. The buffer is
// borrowed and must outlive the tree.
class KdTree {
 public:
  KdTree(int dim, std::span<const double> coords);

  struct Neighbor {
    std::size_t index;
    double squared_distance;
  };

  // Exact nearest neighbour (ties broken by smallest index). Empty trees are
  // not allowed.
  Neighbor nearest(std::span<const double> query) const;

  // Indices of all points with distance(query, p) <= radius, ascending.
  std::vector<std::size_t> within(std::span<const double> query, double radius) const;

  std::size_t size() const noexcept { return count_; }

 private:
  struct Node {
    std::uint32_t begin;
    std::uint32_t end;
    std::int32_t left = -1;
    std::int32_t right = -1;
    int axis = -1;
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void nearest_rec(std::int32_t node, std::span<const double> q, Neighbor& best) const;
  void within_rec(std::int32_t node, std::span<const double> q, double radius, double bound,
                  std::vector<std::size_t>& out) const;
  std::span<const double> point(std::size_t i) const noexcept {
    return coords_.subspan(i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_));
  }

  int dim_;
  std::span<const double> coords_;
  std::size_t count_;
  std::vector<std::uint32_t> index_;
  std::vector<Node> nodes_;
};

}  // namespace gwf
