#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gwf/point_cloud.hpp"
#include "gwf/types.hpp"

namespace gwf {

// Tolerance on (ratio, orthogonal entries, translation) when deciding that two
// maps are the same map.
inline constexpr double kMapTolerance = 1e-9;

// x -> ratio * O x + translation, with O orthogonal and ratio > 0.
class SimilarityMap {
 public:
  SimilarityMap(double ratio, Eigen::MatrixXd orthogonal, Eigen::VectorXd translation);

  static SimilarityMap identity(int dim);
  static SimilarityMap homothety(double ratio, Eigen::VectorXd translation);

  int dim() const noexcept { return static_cast<int>(translation_.size()); }
  double ratio() const noexcept { return ratio_; }
  const Eigen::MatrixXd& orthogonal() const noexcept { return orthogonal_; }
  const Eigen::VectorXd& translation() const noexcept { return translation_; }
  bool is_homothety() const noexcept { return homothety_; }

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
  void apply(std::span<const double> in, std::span<double> out) const;

  SimilarityMap inverse() const;

  // Unique fixed point; requires ratio != 1.
  Eigen::VectorXd fixed_point() const;

  bool approx_equal(const SimilarityMap& other, double tol = kMapTolerance) const;

 private:
  SimilarityMap(double ratio, Eigen::MatrixXd orthogonal, Eigen::VectorXd translation, bool homothety);

  double ratio_;
  Eigen::MatrixXd orthogonal_;
  Eigen::VectorXd translation_;
  bool homothety_;

  friend SimilarityMap compose(const SimilarityMap& outer, const SimilarityMap& inner);
};

// outer o inner.
SimilarityMap compose(const SimilarityMap& outer, const SimilarityMap& inner);

// Finite system of contracting similarities {phi_i}, i in 0..size()-1.
class Ifs {
 public:
  explicit Ifs(std::vector<SimilarityMap> maps, std::optional<Box> osc_box = std::nullopt);

  int dim() const noexcept { return maps_.front().dim(); }
  std::size_t size() const noexcept { return maps_.size(); }
  const SimilarityMap& map(Symbol i) const { return maps_.at(i); }
  const std::vector<SimilarityMap>& maps() const noexcept { return maps_; }
  const std::optional<Box>& osc_box() const noexcept { return osc_box_; }

  std::vector<double> ratios() const;
  double r_min() const noexcept { return r_min_; }
  double r_max() const noexcept { return r_max_; }
  bool all_homotheties() const noexcept;

  // R_K = max_i |alpha_i| / (1 - r_max); the attractor lies in the closed
  // ball of this radius about the origin.
  double bounding_radius() const noexcept { return bounding_radius_; }

  // Coding base point: the fixed point of phi_0 (a point of K).
  const Eigen::VectorXd& base_point() const noexcept { return base_point_; }

  // Sub-system {phi_i : i in subset}, reindexed in increasing symbol order.
  Ifs restricted(Subset subset) const;

 private:
  std::vector<SimilarityMap> maps_;
  std::optional<Box> osc_box_;
  double r_min_;
  double r_max_;
  double bounding_radius_;
  Eigen::VectorXd base_point_;
};

// phi_{w_1} o ... o phi_{w_k}; the empty word gives the identity.
SimilarityMap compose_word(const Ifs& ifs, const Word& word);

// Default cap on the number of words in one section.
inline constexpr std::size_t kDefaultSectionCap = 10'000'000;

// One point phi_i(x0) per i in Pi_rho, epsilon = rho * 2 R_K.
PointCloud attractor_cloud(const Ifs& ifs, double rho, std::size_t cap = kDefaultSectionCap);

// Cloud of the attractor K_A of {phi_i}_{i in A}.
PointCloud restricted_attractor_cloud(const Ifs& ifs, Subset subset, double rho,
                                      std::size_t cap = kDefaultSectionCap);

// Image of a cloud under a similarity; epsilon scales with the ratio.
PointCloud transform(const PointCloud& cloud, const SimilarityMap& map);

}  // namespace gwf
