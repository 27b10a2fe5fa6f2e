#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gwf/point_cloud.hpp"
#include "gwf/similarity.hpp"

namespace gwf {

enum class SeparationKind { CertifiedSeparated, CertifiedOverlap, Undecided };

std::string_view to_string(SeparationKind kind);

// Outcome of the strong separation check. At level n every first-level
// cylinder phi_i(K) is approximated by the points phi_w(x0), |w| = n, w_1 = i,
// each within approximation_error = r_max^n * 2 R_K of the true cylinder.
// CertifiedSeparated requires cloud_gap > 2 * approximation_error, so the true
// gap is at least gap_lower_bound = cloud_gap - 2 * approximation_error > 0.
struct SeparationVerdict {
  SeparationKind kind = SeparationKind::Undecided;
  double cloud_gap = 0.0;
  double approximation_error = 0.0;
  double gap_lower_bound = 0.0;
  int depth = 0;        // level supplying the evidence
  int depth_limit = 0;  // deepest level examined
  std::string detail;   // which symbols overlap, when they do
};

// Examines levels 1..depth and keeps the strongest certificate, so a verdict
// of CertifiedSeparated at some depth persists at all larger depths.
SeparationVerdict check_ssc(const Ifs& ifs, int depth, std::size_t cap = kDefaultSectionCap);

// tau = sqrt(d) / (gap * r_min): cylinders on Pi_{tau * rho} meet a box of
// side rho in at most one cylinder. Uses the certified lower bound as the gap.
double ssc_tau(const Ifs& ifs, const SeparationVerdict& verdict);

struct OscPairReport {
  Symbol i;
  Symbol j;
  bool disjoint;
};

struct OscReport {
  bool pass = false;
  bool heuristic = false;           // orthogonal parts present: sampled check
  std::vector<bool> contained;      // phi_i(box) inside box, per map
  std::vector<OscPairReport> pairs; // i < j
};

// Open set condition for a declared open box: phi_i(U) in U and the images
// pairwise disjoint.
OscReport check_declared_osc(const Ifs& ifs, const Box& box);

struct WscProfileEntry {
  double rho;
  std::size_t section_size;
  std::size_t distinct_maps;  // distinct cylinder maps on the section
  std::size_t max_count;      // max distinct cylinders meeting a sampled ball
};

// Empirical weak-separation profile: for each rho, balls of radius rho centred
// on attractor points, counting cylinder sets phi_i K, i in Pi_rho, that meet
// the ball, identical maps counted once. Evidence only; it decides nothing.
std::vector<WscProfileEntry> wsc_profile(const Ifs& ifs, std::span<const double> rhos, std::size_t ball_samples,
                                         std::uint64_t seed, std::size_t cap = kDefaultSectionCap);

}  // namespace gwf
