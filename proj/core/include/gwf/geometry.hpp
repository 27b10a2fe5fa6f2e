#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gwf/point_cloud.hpp"
#include "gwf/separation.hpp"
#include "gwf/similarity.hpp"
#include "gwf/trees.hpp"

namespace gwf {

// max( max_a min_b |a-b|, max_b min_a |a-b| ), exact. Nearest neighbours come
// from a k-d tree; the square root is taken once at the end, so the value is
// bit-identical to the O(|A||B|) double loop over distance().
double hausdorff_distance(const PointCloud& a, const PointCloud& b);

// Euclidean distance from x to Q = [0,1]^d.
double distance_to_unit_cube(std::span<const double> x) noexcept;

// Q cap psi(F) at cloud scale: points of psi(F) within `band` of Q. The band
// defaults to psi.ratio * F.epsilon; the result has epsilon
// psi.ratio * F.epsilon + band. psi must not contract.
CloudOrEmpty miniset(const PointCloud& f, const SimilarityMap& psi, std::optional<double> band = std::nullopt);

// Gamma_Phi(T'^v) at resolution rho, T' the tree reduced at its horizon.
// Throws NotFound when v is not in T'.
PointCloud descendant_cloud(const Tree& tree, const Ifs& ifs, const Word& v, double rho);

struct ZoomStep {
  Word node;
  SimilarityMap map;  // phi_node^{-1}
  CloudOrEmpty miniset;
  std::optional<double> d_h_to_prev;  // absent on the first step or next to an empty miniset
  bool meets_open_cube;
};

struct ZoomSequence {
  std::vector<ZoomStep> steps;
  double tail_factor;
  // Last `tail_length` steps moved by at most tail_factor * their epsilon:
  // an empirical microset approximant, never a certified limit.
  bool microset_approximant;
};

// One step per prefix of `path` (the empty prefix included), zooming into
// F = project_tree(T) with the inverse cylinder maps.
ZoomSequence zoom_sequence(const Tree& tree, const Ifs& ifs, const Word& path, double rho, double tail_factor = 4.0,
                           std::size_t tail_length = 2);

enum class ZoomStatus { Pass, Fail, PreconditionViolated };

std::string_view to_string(ZoomStatus status);

struct ZoomIdentityResult {
  ZoomStatus status;
  double d_h;        // NaN unless both sides were compared
  double tolerance;  // 2 * max(epsilon_zoom, epsilon_desc) + band
  double band;
  std::string detail;
};

// Under the SSC the miniset Q cap phi_v^{-1}(Gamma(T)) is the miniset of the
// single descendant set Gamma(T^v). The zoom side is miniset(project_tree(T)
// at rho, phi_v^{-1}); the descendant side is Gamma(T^u) at rho / r_v passed
// through miniset with the normalizing map phi_v^{-1} o phi_v, where u = v
// unless `descendant_of` substitutes another node (a deliberately wrong
// comparison). Preconditions: verdict certifies the SSC, v is in the reduced
// tree, r_v > rho, and no point of another cylinder lands within the band of Q.
ZoomIdentityResult check_zoom_identity_ssc(const Tree& tree, const Ifs& ifs, const Word& v, double rho,
                                           const SeparationVerdict& verdict,
                                           const std::optional<Word>& descendant_of = std::nullopt);

}  // namespace gwf
