#include "gwf/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gwf/errors.hpp"

namespace gwf {

Box unit_cube(int dim) {
  return Box{Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
}

PointCloud::PointCloud(int dim, std::vector<double> coords, double epsilon)
    : dim_(dim), coords_(std::move(coords)), epsilon_(epsilon) {
  if (dim_ <= 0) throw Error(ErrorKind::InvalidArgument, "point cloud dimension must be positive");
  if (coords_.empty()) throw Error(ErrorKind::EmptySet, "point cloud must be non-empty");
  if (coords_.size() % static_cast<std::size_t>(dim_) != 0) {
    throw Error(ErrorKind::InvalidArgument, "coordinate buffer is not a multiple of the dimension");
  }
  if (!(epsilon_ >= 0.0) || !std::isfinite(epsilon_)) {
    throw Error(ErrorKind::InvalidArgument, "point cloud epsilon must be finite and >= 0");
  }
  for (double c : coords_) {
    if (!std::isfinite(c)) throw Error(ErrorKind::InvalidArgument, "point cloud coordinates must be finite");
  }
}

Box PointCloud::bounds() const {
  Box box{Eigen::VectorXd::Constant(dim_, INFINITY), Eigen::VectorXd::Constant(dim_, -INFINITY)};
  for (std::size_t i = 0; i < size(); ++i) {
    auto p = point(i);
    for (int k = 0; k < dim_; ++k) {
      box.lo[k] = std::min(box.lo[k], p[k]);
      box.hi[k] = std::max(box.hi[k], p[k]);
    }
  }
  return box;
}

PointCloud PointCloud::canonical() const {
  std::vector<std::size_t> order(size());
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    auto pa = point(a);
    auto pb = point(b);
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  };
  std::sort(order.begin(), order.end(), less);
  std::vector<double> out;
  out.reserve(coords_.size());
  for (std::size_t n = 0; n < order.size(); ++n) {
    if (n > 0) {
      auto prev = point(order[n - 1]);
      auto cur = point(order[n]);
      if (std::equal(prev.begin(), prev.end(), cur.begin())) continue;
    }
    auto p = point(order[n]);
    out.insert(out.end(), p.begin(), p.end());
  }
  return PointCloud(dim_, std::move(out), epsilon_);
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) noexcept {
  return std::sqrt(squared_distance(a, b));
}

}  // namespace gwf
