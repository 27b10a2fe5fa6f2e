#include "gwf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gwf/detail/cylinder_walker.hpp"
#include "gwf/errors.hpp"
#include "gwf/kd_tree.hpp"
#include "gwf/parallel.hpp"

namespace gwf {

namespace {

// max over points of `from` of the squared distance to the nearest point of `to`.
double directed_squared(const PointCloud& from, const PointCloud& to) {
  const KdTree tree(to.dim(), to.coords());
  const std::size_t n = from.size();
  const std::size_t chunk = 4096;
  const std::size_t blocks = (n + chunk - 1) / chunk;
  std::vector<double> best(blocks, 0.0);
  parallel_for(blocks, [&](std::size_t b) {
    double m = 0.0;
    for (std::size_t i = b * chunk; i < std::min(n, (b + 1) * chunk); ++i) {
      m = std::max(m, tree.nearest(from.point(i)).squared_distance);
    }
    best[b] = m;
  });
  return *std::max_element(best.begin(), best.end());
}

bool in_open_cube(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double c) { return c > 0.0 && c < 1.0; });
}

bool has_prefix(const Word& word, const Word& prefix) {
  return word.size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), word.begin());
}

std::optional<Tree> reduced(const Tree& tree) { return reduce_to_horizon(tree, tree.horizon()); }

}  // namespace

double hausdorff_distance(const PointCloud& a, const PointCloud& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::InvalidArgument, "Hausdorff distance between clouds of different dimension");
  return std::sqrt(std::max(directed_squared(a, b), directed_squared(b, a)));
}

double distance_to_unit_cube(std::span<const double> x) noexcept {
  double s = 0.0;
  for (double c : x) {
    double out = c < 0.0 ? -c : (c > 1.0 ? c - 1.0 : 0.0);
    s += out * out;
  }
  return std::sqrt(s);
}

CloudOrEmpty miniset(const PointCloud& f, const SimilarityMap& psi, std::optional<double> band) {
  if (psi.dim() != f.dim()) throw Error(ErrorKind::InvalidArgument, "map and cloud dimensions differ");
  if (psi.ratio() < 1.0 - 1e-12) throw Error(ErrorKind::Domain, "miniset map must not contract");
  const double scaled_eps = psi.ratio() * f.epsilon();
  const double b = band.value_or(scaled_eps);
  if (!(b >= 0.0)) throw Error(ErrorKind::InvalidArgument, "band must be non-negative");

  const auto dim = static_cast<std::size_t>(f.dim());
  std::vector<double> kept;
  std::vector<double> y(dim);
  for (std::size_t i = 0; i < f.size(); ++i) {
    psi.apply(f.point(i), y);
    if (distance_to_unit_cube(y) <= b) kept.insert(kept.end(), y.begin(), y.end());
  }
  if (kept.empty()) return EmptySet{};
  return PointCloud(f.dim(), std::move(kept), scaled_eps + b);
}

PointCloud descendant_cloud(const Tree& tree, const Ifs& ifs, const Word& v, double rho) {
  auto r = reduced(tree);
  if (!r) throw Error(ErrorKind::EmptySet, "extinct tree has no descendant sets");
  if (!r->contains(v)) throw Error(ErrorKind::NotFound, "node " + format_word(v, ifs.size()) + " is not in the reduced tree");
  return project_tree(descendant_tree(*r, v), ifs, rho);
}

ZoomSequence zoom_sequence(const Tree& tree, const Ifs& ifs, const Word& path, double rho, double tail_factor,
                           std::size_t tail_length) {
  auto r = reduced(tree);
  if (!r) throw Error(ErrorKind::EmptySet, "extinct tree");
  if (!r->contains(path)) {
    throw Error(ErrorKind::NotFound, "zoom path " + format_word(path, ifs.size()) + " leaves the reduced tree");
  }
  const PointCloud f = project_tree(tree, ifs, rho);

  ZoomSequence seq{{}, tail_factor, false};
  for (std::size_t len = 0; len <= path.size(); ++len) {
    Word node(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(len));
    SimilarityMap psi = compose_word(ifs, node).inverse();
    CloudOrEmpty m = miniset(f, psi);
    bool meets = false;
    if (const auto* c = std::get_if<PointCloud>(&m)) {
      for (std::size_t i = 0; i < c->size() && !meets; ++i) meets = in_open_cube(c->point(i));
    }
    std::optional<double> d;
    if (!seq.steps.empty()) {
      const auto* prev = std::get_if<PointCloud>(&seq.steps.back().miniset);
      const auto* cur = std::get_if<PointCloud>(&m);
      if (prev && cur) d = hausdorff_distance(*prev, *cur);
    }
    seq.steps.push_back({std::move(node), std::move(psi), std::move(m), d, meets});
  }

  if (tail_length > 0 && seq.steps.size() > tail_length) {
    bool ok = true;
    for (std::size_t k = seq.steps.size() - tail_length; k < seq.steps.size(); ++k) {
      const auto& s = seq.steps[k];
      const auto* c = std::get_if<PointCloud>(&s.miniset);
      ok = ok && c && s.d_h_to_prev && *s.d_h_to_prev <= tail_factor * c->epsilon();
    }
    seq.microset_approximant = ok;
  }
  return seq;
}

std::string_view to_string(ZoomStatus status) {
  switch (status) {
    case ZoomStatus::Pass: return "pass";
    case ZoomStatus::Fail: return "fail";
    case ZoomStatus::PreconditionViolated: return "precondition-violated";
  }
  return "?";
}

ZoomIdentityResult check_zoom_identity_ssc(const Tree& tree, const Ifs& ifs, const Word& v, double rho,
                                           const SeparationVerdict& verdict, const std::optional<Word>& descendant_of) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto precondition = [&](std::string why) {
    return ZoomIdentityResult{ZoomStatus::PreconditionViolated, nan, nan, nan, std::move(why)};
  };
  if (verdict.kind != SeparationKind::CertifiedSeparated) return precondition("SSC not certified");
  if (!(rho > 0.0)) throw Error(ErrorKind::Domain, "rho must be positive");
  auto r = reduced(tree);
  if (!r) return precondition("tree is extinct at its horizon");
  if (!r->contains(v)) return precondition("node " + format_word(v, ifs.size()) + " not in the reduced tree");
  const Word& u = descendant_of.value_or(v);
  if (!r->contains(u)) return precondition("node " + format_word(u, ifs.size()) + " not in the reduced tree");

  const SimilarityMap phi_v = compose_word(ifs, v);
  if (!(phi_v.ratio() > rho)) return precondition("node lies below the cloud resolution");
  const SimilarityMap psi = phi_v.inverse();

  // Zoom side, split by cylinder so the other cylinders can be checked.
  const auto entries = tree_section_at(*r, ifs, rho);
  const auto coords = detail::word_images(ifs, entries.size(), [&](std::size_t n) -> const Word& { return entries[n].word; });
  const PointCloud f(ifs.dim(), coords, rho * 2.0 * ifs.bounding_radius());
  const double band = psi.ratio() * f.epsilon();

  const auto dim = static_cast<std::size_t>(ifs.dim());
  std::vector<double> y(dim);
  double closest_other = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < entries.size(); ++n) {
    if (has_prefix(entries[n].word, v)) continue;
    psi.apply(f.point(n), y);
    closest_other = std::min(closest_other, distance_to_unit_cube(y));
  }
  if (closest_other <= band) {
    return precondition("another cylinder comes within the band of Q after zooming (distance " +
                        std::to_string(closest_other) + ")");
  }

  const CloudOrEmpty zoom = miniset(f, psi, band);
  const PointCloud desc_full = project_tree(descendant_tree(*r, u), ifs, rho / phi_v.ratio());
  const CloudOrEmpty desc = miniset(desc_full, compose(psi, phi_v), band);

  const auto* z = std::get_if<PointCloud>(&zoom);
  const auto* d = std::get_if<PointCloud>(&desc);
  if (!z || !d) {
    bool both = !z && !d;
    return {both ? ZoomStatus::Pass : ZoomStatus::Fail, both ? 0.0 : nan, nan, band,
            both ? "both sides empty" : "exactly one side is empty"};
  }
  const double tol = 2.0 * std::max(z->epsilon(), d->epsilon()) + band;
  const double dh = hausdorff_distance(*z, *d);
  return {dh <= tol ? ZoomStatus::Pass : ZoomStatus::Fail, dh, tol, band, {}};
}

}  // namespace gwf
