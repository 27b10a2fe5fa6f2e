#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gwf/similarity.hpp"

namespace gwf::detail {

// Depth-first helper holding phi_{w_1} o ... o phi_{w_k} for the current
// path w without reallocating on push/pop.
class CylinderWalker {
 public:
  explicit CylinderWalker(const Ifs& ifs);

  void push(Symbol s);
  void pop() { --depth_; }

  std::size_t depth() const noexcept { return depth_; }
  double ratio() const noexcept { return ratio_[depth_]; }

  // Composite applied to x, written to out (dim entries).
  void image(const Eigen::VectorXd& x, double* out) const;

  SimilarityMap current() const;

 private:
  const Ifs& ifs_;
  bool homothety_;
  std::size_t depth_ = 0;
  std::vector<double> ratio_;
  std::vector<Eigen::MatrixXd> orthogonal_;
  std::vector<Eigen::VectorXd> translation_;
};

}  // namespace gwf::detail

#include <functional>

namespace gwf::detail {

// phi_w(x0) for `count` words supplied in lexicographic order by word_at,
// flat row-major.
std::vector<double> word_images(const Ifs& ifs, std::size_t count,
                                const std::function<const Word&(std::size_t)>& word_at);

}  // namespace gwf::detail
