#include "gwf/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gwf/errors.hpp"

namespace gwf {

namespace {

constexpr double kTieTolerance = 1e-12;

// Root of a strictly decreasing g on [0, inf) with g(0) >= 0 and g -> -1.
template <class F>
double bisect_decreasing(F g) {
  if (g(0.0) <= 0.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (g(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e18) throw Error(ErrorKind::Domain, "no root below 1e18");
  }
  for (int it = 0; it < 400; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi;
}

// c_i = P[i in W]; E sum_{i in W} r_i^s = sum_i c_i r_i^s.
std::vector<double> inclusion_weights(const OffspringDistribution& w) {
  std::vector<double> c(w.alphabet_size(), 0.0);
  for (const auto& a : w.atoms()) {
    for (Symbol i : subset_members(a.subset)) c[i] += a.probability;
  }
  return c;
}

double subset_dimension(const std::vector<double>& ratios, Subset b) {
  if (b == 0) return 0.0;
  std::vector<double> r;
  for (Symbol i : subset_members(b)) r.push_back(ratios.at(i));
  return moran_dimension(r);
}

DimensionExtremes extremes_over(const std::vector<double>& ratios, const std::vector<Subset>& sets) {
  DimensionExtremes out{INFINITY, -INFINITY, {}, {}};
  std::vector<double> dims;
  dims.reserve(sets.size());
  for (Subset b : sets) {
    double s = subset_dimension(ratios, b);
    dims.push_back(s);
    out.min = std::min(out.min, s);
    out.max = std::max(out.max, s);
  }
  for (std::size_t n = 0; n < sets.size(); ++n) {
    if (dims[n] <= out.min + kTieTolerance) out.argmin.push_back(sets[n]);
    if (dims[n] >= out.max - kTieTolerance) out.argmax.push_back(sets[n]);
  }
  return out;
}

}  // namespace

double moran_dimension(std::span<const double> ratios) {
  if (ratios.empty()) throw Error(ErrorKind::Domain, "Moran equation over an empty ratio list");
  for (double r : ratios) {
    if (!(r > 0.0 && r < 1.0)) throw Error(ErrorKind::Domain, "Moran ratios must lie in (0, 1)");
  }
  return bisect_decreasing([&](double s) {
    double sum = 0.0;
    for (double r : ratios) sum += std::pow(r, s);
    return sum - 1.0;
  });
}

double gwf_residual(const Ifs& ifs, const OffspringDistribution& w, double s) {
  const auto c = inclusion_weights(w);
  double sum = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) sum += c[i] * std::pow(ifs.map(static_cast<Symbol>(i)).ratio(), s);
  return std::abs(sum - 1.0);
}

double gwf_dimension(const Ifs& ifs, const OffspringDistribution& w) {
  if (w.alphabet_size() != ifs.size()) throw Error(ErrorKind::InvalidArgument, "offspring alphabet and IFS size differ");
  if (w.mean_offspring() < 1.0 - 1e-12) {
    throw Error(ErrorKind::Domain, "E|W| = " + std::to_string(w.mean_offspring()) + " < 1: the fractal is a.s. empty");
  }
  const auto c = inclusion_weights(w);
  const auto r = ifs.ratios();
  return bisect_decreasing([&](double s) {
    double sum = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) sum += c[i] * std::pow(r[i], s);
    return sum - 1.0;
  });
}

DimensionExtremes offspring_extremes(const Ifs& ifs, const OffspringDistribution& w) {
  if (w.alphabet_size() != ifs.size()) throw Error(ErrorKind::InvalidArgument, "offspring alphabet and IFS size differ");
  return extremes_over(ifs.ratios(), w.support());
}

DimensionExtremes family_interval(const Ifs& ifs, const Family& family) {
  if (family.empty()) throw Error(ErrorKind::InvalidArgument, "family must be non-empty");
  if (family.members().size() == 1 && family.contains_empty()) {
    throw Error(ErrorKind::Domain, "degenerate family {{}}: no infinite trees");
  }
  for (Subset b : family.members()) {
    if ((b & ~full_subset(ifs.size())) != 0) throw Error(ErrorKind::InvalidArgument, "family member leaves the alphabet");
  }
  if (family.contains_empty()) return extremes_over(ifs.ratios(), family.down_closure().members());
  return extremes_over(ifs.ratios(), family.members());
}

TargetOffspring offspring_for_target(const Ifs& ifs, const Family& family, double target) {
  const DimensionExtremes ext = family_interval(ifs, family);
  if (!(target >= ext.min - kTieTolerance && target <= ext.max + kTieTolerance)) {
    throw Error(ErrorKind::Domain, "target " + std::to_string(target) + " outside [" + std::to_string(ext.min) + ", " +
                                       std::to_string(ext.max) + "]");
  }
  const Subset a_min = ext.argmin.front();
  const Subset a_max = ext.argmax.front();
  const std::size_t k = ifs.size();

  auto law_for = [&](double t) {
    if (a_min == a_max) return OffspringDistribution::dirac(k, a_min);
    return OffspringDistribution(k, {{a_min, t}, {a_max, 1.0 - t}});
  };
  auto finish = [&](double t) {
    auto law = law_for(t);
    double achieved = gwf_dimension(ifs, law);
    return TargetOffspring{t, a_min, a_max, std::move(law), achieved};
  };

  if (a_min == a_max || target >= ext.max) return finish(0.0);
  if (target <= ext.min) return finish(1.0);

  double lo = 0.0;  // s_lo > target
  double hi = 1.0;  // s_hi < target
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double s = gwf_dimension(ifs, law_for(mid));
    if (s == target) return finish(mid);
    if (s > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double s_lo = gwf_dimension(ifs, law_for(lo));
  double s_hi = gwf_dimension(ifs, law_for(hi));
  return finish(std::abs(s_lo - target) <= std::abs(s_hi - target) ? lo : hi);
}

DimensionReport dimension_report(const Ifs& ifs, const OffspringDistribution& w) {
  if (!w.supercritical()) {
    throw Error(ErrorKind::Domain, "offspring law is not supercritical (E|W| = " + std::to_string(w.mean_offspring()) + ")");
  }
  const double delta = gwf_dimension(ifs, w);
  const auto ext = offspring_extremes(ifs, w);
  const auto extinction = extinction_probability(w);
  return {delta, ext.min, ext.max, ext.argmin, ext.argmax, gwf_residual(ifs, w, delta), extinction.q, extinction.p};
}

std::vector<SectionCountViolation> section_count_check(const Tree& tree, const Ifs& ifs, const Family& family,
                                                       std::span<const double> rhos, FamilyValidation validation) {
  if (family.contains_empty()) {
    throw Error(ErrorKind::Precondition, "family contains {}: reduce the tree and use the down-closure");
  }
  if (validation == FamilyValidation::Require && !is_family_tree(tree, family)) {
    throw Error(ErrorKind::Precondition, "tree is not a tree of the given family");
  }
  const DimensionExtremes ext = family_interval(ifs, family);
  std::vector<SectionCountViolation> out;
  for (double rho : rhos) {
    if (!(rho > 0.0 && rho <= ifs.r_min())) throw Error(ErrorKind::Domain, "rho must lie in (0, r_min]");
    const std::size_t count = tree_section_at(tree, ifs, rho).size();
    const double lower = std::pow(rho, -ext.min);
    const double upper = std::pow(rho, -ext.max) * std::pow(ifs.r_min(), -ext.max);
    const auto c = static_cast<double>(count);
    if (c < lower * (1.0 - 1e-9) || c > upper * (1.0 + 1e-9)) out.push_back({rho, count, lower, upper});
  }
  return out;
}

}  // namespace gwf
