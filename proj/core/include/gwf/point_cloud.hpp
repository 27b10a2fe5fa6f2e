#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace gwf {

// Axis-aligned box [lo, hi] (or its interior, depending on the caller).
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  int dim() const { return static_cast<int>(lo.size()); }
};

// Q = [0,1]^d.
Box unit_cube(int dim);

// Finite point set standing in for a non-empty compact set K with
// d_H(points, K) <= epsilon. Points are stored row-major in one flat buffer.
class PointCloud {
 public:
  PointCloud(int dim, std::vector<double> coords, double epsilon);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return coords_.size() / static_cast<std::size_t>(dim_); }
  double epsilon() const noexcept { return epsilon_; }

  std::span<const double> point(std::size_t i) const noexcept {
    return {coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  const std::vector<double>& coords() const noexcept { return coords_; }

  // Axis-aligned bounding box of the points.
  Box bounds() const;

  // Same points in lexicographic coordinate order, duplicates removed.
  PointCloud canonical() const;

  bool operator==(const PointCloud& other) const = default;

 private:
  int dim_;
  std::vector<double> coords_;
  double epsilon_;
};

// Marker for the empty intersection; never represented as a cloud.
struct EmptySet {
  bool operator==(const EmptySet&) const = default;
};

using CloudOrEmpty = std::variant<PointCloud, EmptySet>;

inline bool is_empty(const CloudOrEmpty& c) { return std::holds_alternative<EmptySet>(c); }

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;
double distance(std::span<const double> a, std::span<const double> b) noexcept;

}  // namespace gwf
