#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gwf/galton_watson.hpp"
#include "gwf/similarity.hpp"
#include "gwf/trees.hpp"

namespace gwf {

// Unique s with sum_i r_i^s = 1 (similarity dimension). Bisection on
// [0, upper], upper doubled until the sum drops below 1.
double moran_dimension(std::span<const double> ratios);

// Unique delta >= 0 with E( sum_{i in W} r_i^delta ) = 1. Requires E|W| >= 1;
// at E|W| = 1 the root is 0. Without the OSC this is only an upper bound for
// the Hausdorff dimension of the fractal.
double gwf_dimension(const Ifs& ifs, const OffspringDistribution& w);

// |E( sum_{i in W} r_i^s ) - 1|.
double gwf_residual(const Ifs& ifs, const OffspringDistribution& w, double s);

// Min / max of dim_H K_A over a collection of subsets, with dim K_{} = 0. All
// tied subsets are listed (ascending bitmask).
struct DimensionExtremes {
  double min;
  double max;
  std::vector<Subset> argmin;
  std::vector<Subset> argmax;
};

// Over supp(W): (m_W, M_W).
DimensionExtremes offspring_extremes(const Ifs& ifs, const OffspringDistribution& w);

// Over a family A: (m_A, M_A). A family containing {} is replaced by its
// down-closure of non-empty subsets, which forces m = 0.
DimensionExtremes family_interval(const Ifs& ifs, const Family& family);

struct TargetOffspring {
  double t;
  Subset a_min;
  Subset a_max;
  OffspringDistribution law;  // t * delta_{a_min} + (1 - t) * delta_{a_max}
  double achieved;            // gwf_dimension(law)
};

// W_t with gwf_dimension(W_t) = target, t found by bisection (t -> s_t is
// decreasing from M_A at t = 0 to m_A at t = 1). a_min / a_max are the
// smallest bitmasks among the tied extremes.
TargetOffspring offspring_for_target(const Ifs& ifs, const Family& family, double target);

struct DimensionReport {
  double delta;
  double m_w;
  double M_w;
  std::vector<Subset> argmin;
  std::vector<Subset> argmax;
  double delta_residual;
  double q;
  double p;
};

DimensionReport dimension_report(const Ifs& ifs, const OffspringDistribution& w);

struct SectionCountViolation {
  double rho;
  std::size_t count;  // |T cap Pi_rho|
  double lower;       // rho^{-m_A}
  double upper;       // rho^{-M_A} r_min^{-M_A}
};

enum class FamilyValidation { Require, Skip };

// rho^{-m_A} <= |T cap Pi_rho| <= rho^{-M_A} r_min^{-M_A} for every rho; an
// empty result means every bound holds. The family must not contain {}
// (reduce the tree and pass the down-closure instead). Bounds are compared
// with a relative slack of 1e-9 to absorb rounding in the powers.
std::vector<SectionCountViolation> section_count_check(const Tree& tree, const Ifs& ifs, const Family& family,
                                                       std::span<const double> rhos,
                                                       FamilyValidation validation = FamilyValidation::Require);

}  // namespace gwf
