#include "gwf/section.hpp"

#include <cmath>
#include <string>

#include "gwf/errors.hpp"

namespace gwf {

std::vector<SectionEntry> section_entries(std::span<const double> ratios, double scale, std::size_t cap) {
  if (ratios.empty()) throw Error(ErrorKind::InvalidArgument, "section over an empty alphabet");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw Error(ErrorKind::Domain, "section scale must be positive");
  std::vector<SectionEntry> out;
  if (at_or_below(1.0, scale)) {
    out.push_back({Word{}, 1.0});
    return out;
  }

  // Depth-first, children in increasing symbol order: lexicographic output.
  struct Frame {
    double ratio;
    Symbol next;
  };
  std::vector<Frame> stack{{1.0, 0}};
  Word word;
  const auto k = static_cast<Symbol>(ratios.size());
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next == k) {
      stack.pop_back();
      if (!word.empty()) word.pop_back();
      continue;
    }
    Symbol s = top.next++;
    double r = top.ratio * ratios[s];
    word.push_back(s);
    if (at_or_below(r, scale)) {
      if (out.size() >= cap) {
        throw Error(ErrorKind::Resource, "section at scale " + std::to_string(scale) + " exceeds cap of " +
                                             std::to_string(cap) + " words");
      }
      out.push_back({word, r});
      word.pop_back();
    } else {
      stack.push_back({r, 0});
    }
  }
  return out;
}

Section build_section(const Ifs& ifs, double rho, std::size_t cap) {
  if (!(rho > 0.0) || !(rho <= ifs.r_min())) {
    throw Error(ErrorKind::Domain, "section scale must lie in (0, r_min] = (0, " + std::to_string(ifs.r_min()) + "]");
  }
  auto ratios = ifs.ratios();
  return Section{rho, section_entries(ratios, rho, cap)};
}

}  // namespace gwf
