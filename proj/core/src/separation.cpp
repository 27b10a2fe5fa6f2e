#include "gwf/separation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "gwf/detail/cylinder_walker.hpp"
#include "gwf/errors.hpp"
#include "gwf/kd_tree.hpp"
#include "gwf/rng.hpp"
#include "gwf/section.hpp"

namespace gwf {

std::string_view to_string(SeparationKind kind) {
  switch (kind) {
    case SeparationKind::CertifiedSeparated: return "certified-separated";
    case SeparationKind::CertifiedOverlap: return "certified-overlap";
    case SeparationKind::Undecided: return "undecided";
  }
  return "unknown";
}

namespace {

Word word_of_index(std::size_t index, std::size_t k, int length) {
  Word w(static_cast<std::size_t>(length));
  for (int p = length - 1; p >= 0; --p) {
    w[static_cast<std::size_t>(p)] = static_cast<Symbol>(index % k);
    index /= k;
  }
  return w;
}

// All points phi_w(x0), |w| = level, in lexicographic order of w.
std::vector<double> level_points(const Ifs& ifs, int level) {
  const std::size_t k = ifs.size();
  const int d = ifs.dim();
  std::size_t count = 1;
  for (int n = 0; n < level; ++n) count *= k;
  std::vector<double> coords(count * static_cast<std::size_t>(d));
  detail::CylinderWalker walker(ifs);
  std::vector<Symbol> next{0};
  std::size_t written = 0;
  while (!next.empty()) {
    if (static_cast<int>(walker.depth()) == level) {
      walker.image(ifs.base_point(), coords.data() + written * static_cast<std::size_t>(d));
      ++written;
      walker.pop();
      next.pop_back();
      continue;
    }
    Symbol& s = next.back();
    if (s == k) {
      next.pop_back();
      if (walker.depth() > 0) walker.pop();
      continue;
    }
    walker.push(s++);
    next.push_back(0);
  }
  return coords;
}

}  // namespace

SeparationVerdict check_ssc(const Ifs& ifs, int depth, std::size_t cap) {
  if (depth < 1) throw Error(ErrorKind::InvalidArgument, "SSC depth must be >= 1");
  const std::size_t k = ifs.size();
  SeparationVerdict verdict;
  verdict.depth_limit = depth;

  if (k == 1) {
    verdict.kind = SeparationKind::CertifiedSeparated;
    verdict.cloud_gap = std::numeric_limits<double>::infinity();
    verdict.gap_lower_bound = std::numeric_limits<double>::infinity();
    verdict.depth = 1;
    verdict.detail = "single map";
    return verdict;
  }

  for (Symbol i = 0; i < k; ++i) {
    for (Symbol j = i + 1; j < k; ++j) {
      if (ifs.map(i).approx_equal(ifs.map(j))) {
        verdict.kind = SeparationKind::CertifiedOverlap;
        verdict.depth = 1;
        verdict.detail = "maps " + std::to_string(i) + " and " + std::to_string(j) + " coincide";
        return verdict;
      }
    }
  }

  double total = 1.0;
  for (int n = 0; n < depth; ++n) total *= static_cast<double>(k);
  if (total > static_cast<double>(cap)) {
    throw Error(ErrorKind::Resource, "SSC check at depth " + std::to_string(depth) + " exceeds the point cap");
  }

  const int d = ifs.dim();
  bool certified = false;
  SeparationVerdict best;
  SeparationVerdict last;
  for (int level = 1; level <= depth; ++level) {
    std::vector<double> coords = level_points(ifs, level);
    const std::size_t per_group = coords.size() / static_cast<std::size_t>(d) / k;
    const std::size_t stride = per_group * static_cast<std::size_t>(d);
    auto group = [&](Symbol g) { return std::span<const double>(coords.data() + g * stride, stride); };

    double gap = std::numeric_limits<double>::infinity();
    for (Symbol j = 1; j < k; ++j) {
      KdTree tree(d, group(j));
      for (Symbol i = 0; i < j; ++i) {
        auto gi = group(i);
        for (std::size_t p = 0; p < per_group; ++p) {
          auto q = gi.subspan(p * static_cast<std::size_t>(d), static_cast<std::size_t>(d));
          auto nn = tree.nearest(q);
          gap = std::min(gap, std::sqrt(nn.squared_distance));
          if (nn.squared_distance > kMapTolerance * kMapTolerance) continue;
          // Coincident points: the cylinder maps themselves may coincide.
          Word wi = word_of_index(i * per_group + p, k, level);
          auto mi = compose_word(ifs, wi);
          for (std::size_t other : tree.within(q, kMapTolerance)) {
            Word wj = word_of_index(j * per_group + other, k, level);
            if (mi.approx_equal(compose_word(ifs, wj))) {
              verdict.kind = SeparationKind::CertifiedOverlap;
              verdict.depth = level;
              verdict.cloud_gap = 0.0;
              verdict.detail = "cylinders " + format_word(wi, k) + " and " + format_word(wj, k) + " coincide";
              return verdict;
            }
          }
        }
      }
    }

    SeparationVerdict current;
    current.depth = level;
    current.depth_limit = depth;
    current.cloud_gap = gap;
    current.approximation_error = std::pow(ifs.r_max(), level) * 2.0 * ifs.bounding_radius();
    current.gap_lower_bound = gap - 2.0 * current.approximation_error;
    if (current.gap_lower_bound > 0.0 && (!certified || current.gap_lower_bound > best.gap_lower_bound)) {
      certified = true;
      best = current;
    }
    last = current;
  }

  if (certified) {
    best.kind = SeparationKind::CertifiedSeparated;
    return best;
  }
  last.kind = SeparationKind::Undecided;
  return last;
}

double ssc_tau(const Ifs& ifs, const SeparationVerdict& verdict) {
  if (verdict.kind != SeparationKind::CertifiedSeparated) {
    throw Error(ErrorKind::Precondition, "tau is only defined under a certified SSC");
  }
  return std::sqrt(static_cast<double>(ifs.dim())) / (verdict.gap_lower_bound * ifs.r_min());
}

namespace {

constexpr double kBoxTolerance = 1e-12;

bool inside_closed(const Box& box, const Eigen::VectorXd& x, double tol) {
  return ((x - box.lo).array() >= -tol).all() && ((box.hi - x).array() >= -tol).all();
}

bool inside_open(const Box& box, const Eigen::VectorXd& x, double margin) {
  return ((x - box.lo).array() > margin).all() && ((box.hi - x).array() > margin).all();
}

std::vector<Eigen::VectorXd> box_samples(const Box& box) {
  const int d = box.dim();
  int per_axis = std::max(3, static_cast<int>(std::floor(std::pow(4096.0, 1.0 / d))));
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) total *= static_cast<std::size_t>(per_axis);
  std::vector<Eigen::VectorXd> out;
  out.reserve(total);
  for (std::size_t n = 0; n < total; ++n) {
    Eigen::VectorXd x(d);
    std::size_t rest = n;
    for (int k = 0; k < d; ++k) {
      auto c = static_cast<double>(rest % static_cast<std::size_t>(per_axis));
      rest /= static_cast<std::size_t>(per_axis);
      x[k] = box.lo[k] + (c + 0.5) / per_axis * (box.hi[k] - box.lo[k]);
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace

OscReport check_declared_osc(const Ifs& ifs, const Box& box) {
  if (box.dim() != ifs.dim()) throw Error(ErrorKind::InvalidArgument, "box dimension does not match the IFS");
  if (((box.hi - box.lo).array() <= 0.0).any()) throw Error(ErrorKind::InvalidArgument, "box must be non-empty");

  const std::size_t k = ifs.size();
  OscReport report;
  report.heuristic = !ifs.all_homotheties();
  report.contained.resize(k);

  if (!report.heuristic) {
    std::vector<Box> images;
    for (const auto& m : ifs.maps()) images.push_back(Box{m.ratio() * box.lo + m.translation(), m.ratio() * box.hi + m.translation()});
    for (std::size_t i = 0; i < k; ++i) {
      report.contained[i] = ((images[i].lo - box.lo).array() >= -kBoxTolerance).all() &&
                            ((box.hi - images[i].hi).array() >= -kBoxTolerance).all();
    }
    for (Symbol i = 0; i < k; ++i) {
      for (Symbol j = i + 1; j < k; ++j) {
        bool disjoint = false;
        for (int a = 0; a < box.dim(); ++a) {
          if (images[i].hi[a] <= images[j].lo[a] + kBoxTolerance || images[j].hi[a] <= images[i].lo[a] + kBoxTolerance) {
            disjoint = true;
            break;
          }
        }
        report.pairs.push_back({i, j, disjoint});
      }
    }
  } else {
    const auto samples = box_samples(box);
    const double scale = (box.hi - box.lo).maxCoeff();
    for (std::size_t i = 0; i < k; ++i) {
      const auto& m = ifs.map(static_cast<Symbol>(i));
      report.contained[i] = std::all_of(samples.begin(), samples.end(),
                                        [&](const Eigen::VectorXd& x) { return inside_closed(box, m(x), 1e-12 * scale); });
    }
    for (Symbol i = 0; i < k; ++i) {
      for (Symbol j = i + 1; j < k; ++j) {
        auto inv_j = ifs.map(j).inverse();
        bool disjoint = std::none_of(samples.begin(), samples.end(), [&](const Eigen::VectorXd& x) {
          return inside_open(box, inv_j(ifs.map(i)(x)), 1e-12 * scale);
        });
        report.pairs.push_back({i, j, disjoint});
      }
    }
  }

  report.pass = std::all_of(report.contained.begin(), report.contained.end(), [](bool b) { return b; }) &&
                std::all_of(report.pairs.begin(), report.pairs.end(), [](const OscPairReport& p) { return p.disjoint; });
  return report;
}

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

std::vector<WscProfileEntry> wsc_profile(const Ifs& ifs, std::span<const double> rhos, std::size_t ball_samples,
                                         std::uint64_t seed, std::size_t cap) {
  const int d = ifs.dim();
  const std::size_t k = ifs.size();
  const int tail_len = k * k <= 256 ? 2 : 1;
  std::vector<double> tail = level_points(ifs, tail_len);
  const std::size_t tail_count = tail.size() / static_cast<std::size_t>(d);

  std::vector<WscProfileEntry> out;
  for (std::size_t n = 0; n < rhos.size(); ++n) {
    const double rho = rhos[n];
    Section section = build_section(ifs, rho, cap);
    const std::size_t m = section.entries.size();
    if (m * tail_count > cap) throw Error(ErrorKind::Resource, "WSC profile cloud exceeds cap");

    std::vector<SimilarityMap> maps;
    maps.reserve(m);
    for (const auto& e : section.entries) maps.push_back(compose_word(ifs, e.word));

    // Identical cylinder maps collapse into one class.
    std::vector<std::size_t> parent(m);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return maps[a].translation()[0] < maps[b].translation()[0];
    });
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a + 1; b < m; ++b) {
        if (maps[order[b]].translation()[0] - maps[order[a]].translation()[0] > kMapTolerance) break;
        if (maps[order[a]].approx_equal(maps[order[b]])) {
          parent[find_root(parent, order[a])] = find_root(parent, order[b]);
        }
      }
    }
    std::vector<std::size_t> cls(m);
    std::set<std::size_t> roots;
    for (std::size_t a = 0; a < m; ++a) {
      cls[a] = find_root(parent, a);
      roots.insert(cls[a]);
    }

    // Cylinder clouds phi_w(phi_u(x0)), |u| = tail_len, labelled by w.
    std::vector<double> pts(m * tail_count * static_cast<std::size_t>(d));
    std::vector<std::size_t> label(m * tail_count);
    std::vector<double> centers(m * static_cast<std::size_t>(d));
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t t = 0; t < tail_count; ++t) {
        std::size_t idx = a * tail_count + t;
        maps[a].apply(std::span<const double>(tail.data() + t * static_cast<std::size_t>(d), static_cast<std::size_t>(d)),
                      std::span<double>(pts.data() + idx * static_cast<std::size_t>(d), static_cast<std::size_t>(d)));
        label[idx] = cls[a];
      }
      Eigen::VectorXd c = maps[a](ifs.base_point());
      std::copy(c.data(), c.data() + d, centers.begin() + static_cast<std::ptrdiff_t>(a * static_cast<std::size_t>(d)));
    }
    KdTree tree(d, pts);

    std::vector<std::size_t> chosen;
    if (ball_samples >= m) {
      chosen.resize(m);
      std::iota(chosen.begin(), chosen.end(), 0);
    } else {
      rng::CounterEngine engine(rng::derive(seed, n));
      for (std::size_t b = 0; b < ball_samples; ++b) {
        chosen.push_back(static_cast<std::size_t>(engine.uniform() * static_cast<double>(m)));
      }
    }

    std::size_t max_count = 0;
    for (std::size_t c : chosen) {
      std::span<const double> q(centers.data() + c * static_cast<std::size_t>(d), static_cast<std::size_t>(d));
      std::set<std::size_t> hit;
      for (std::size_t idx : tree.within(q, rho)) hit.insert(label[idx]);
      max_count = std::max(max_count, hit.size());
    }
    out.push_back({rho, m, roots.size(), max_count});
  }
  return out;
}

}  // namespace gwf
