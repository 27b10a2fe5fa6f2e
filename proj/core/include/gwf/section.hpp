#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gwf/similarity.hpp"
#include "gwf/types.hpp"

namespace gwf {

// Relative slack in "r_word <= scale" so that products such as (1/3)^3 land on
// the intended side of 1/27.
inline constexpr double kSectionRelTol = 1e-12;

inline bool at_or_below(double ratio, double scale) noexcept {
  return ratio <= scale * (1.0 + kSectionRelTol);
}

struct SectionEntry {
  Word word;
  double ratio;
};

// Pi_scale = { i : r_i <= scale < r_{i_1}...r_{i_{|i|-1}} }, words in
// lexicographic order.
struct Section {
  double scale;
  std::vector<SectionEntry> entries;
};

// Requires 0 < rho <= r_min.
Section build_section(const Ifs& ifs, double rho, std::size_t cap = kDefaultSectionCap);

// Same construction for an arbitrary scale > 0 over a bare ratio list. For
// scale >= 1 the section is the empty word alone.
std::vector<SectionEntry> section_entries(std::span<const double> ratios, double scale,
                                          std::size_t cap = kDefaultSectionCap);

}  // namespace gwf
