#include "gwf/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gwf/detail/cylinder_walker.hpp"
#include "gwf/errors.hpp"
#include "gwf/section.hpp"

namespace gwf {

namespace {

bool is_identity(const Eigen::MatrixXd& m) {
  return m.isIdentity(0.0);
}

}  // namespace

SimilarityMap::SimilarityMap(double ratio, Eigen::MatrixXd orthogonal, Eigen::VectorXd translation)
    : ratio_(ratio), orthogonal_(std::move(orthogonal)), translation_(std::move(translation)), homothety_(false) {
  if (!(ratio_ > 0.0) || !std::isfinite(ratio_)) {
    throw Error(ErrorKind::InvalidArgument, "similarity ratio must be positive and finite");
  }
  const auto d = translation_.size();
  if (d == 0) throw Error(ErrorKind::InvalidArgument, "similarity map needs dimension >= 1");
  if (orthogonal_.rows() != d || orthogonal_.cols() != d) {
    throw Error(ErrorKind::InvalidArgument, "orthogonal part must be " + std::to_string(d) + "x" + std::to_string(d));
  }
  if (!translation_.allFinite() || !orthogonal_.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "similarity map entries must be finite");
  }
  Eigen::MatrixXd gram = orthogonal_ * orthogonal_.transpose();
  if ((gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9) {
    throw Error(ErrorKind::InvalidArgument, "matrix is not orthogonal within 1e-9");
  }
  homothety_ = is_identity(orthogonal_);
}

SimilarityMap::SimilarityMap(double ratio, Eigen::MatrixXd orthogonal, Eigen::VectorXd translation, bool homothety)
    : ratio_(ratio), orthogonal_(std::move(orthogonal)), translation_(std::move(translation)), homothety_(homothety) {}

SimilarityMap SimilarityMap::identity(int dim) {
  return SimilarityMap(1.0, Eigen::MatrixXd::Identity(dim, dim), Eigen::VectorXd::Zero(dim), true);
}

SimilarityMap SimilarityMap::homothety(double ratio, Eigen::VectorXd translation) {
  const auto d = translation.size();
  return SimilarityMap(ratio, Eigen::MatrixXd::Identity(d, d), std::move(translation));
}

Eigen::VectorXd SimilarityMap::operator()(const Eigen::VectorXd& x) const {
  if (homothety_) return ratio_ * x + translation_;
  return ratio_ * (orthogonal_ * x) + translation_;
}

void SimilarityMap::apply(std::span<const double> in, std::span<double> out) const {
  const int d = dim();
  if (homothety_) {
    for (int k = 0; k < d; ++k) out[k] = ratio_ * in[k] + translation_[k];
    return;
  }
  for (int r = 0; r < d; ++r) {
    double s = 0.0;
    for (int c = 0; c < d; ++c) s += orthogonal_(r, c) * in[c];
    out[r] = ratio_ * s + translation_[r];
  }
}

SimilarityMap SimilarityMap::inverse() const {
  Eigen::MatrixXd ot = orthogonal_.transpose();
  Eigen::VectorXd t = -(ot * translation_) / ratio_;
  return SimilarityMap(1.0 / ratio_, std::move(ot), std::move(t), homothety_);
}

Eigen::VectorXd SimilarityMap::fixed_point() const {
  if (ratio_ == 1.0) throw Error(ErrorKind::Domain, "isometries have no unique fixed point");
  const auto d = translation_.size();
  if (homothety_) return translation_ / (1.0 - ratio_);
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(d, d) - ratio_ * orthogonal_;
  return a.partialPivLu().solve(translation_);
}

bool SimilarityMap::approx_equal(const SimilarityMap& other, double tol) const {
  if (dim() != other.dim()) return false;
  if (std::abs(ratio_ - other.ratio_) > tol) return false;
  if ((translation_ - other.translation_).cwiseAbs().maxCoeff() > tol) return false;
  return (orthogonal_ - other.orthogonal_).cwiseAbs().maxCoeff() <= tol;
}

SimilarityMap compose(const SimilarityMap& outer, const SimilarityMap& inner) {
  if (outer.dim() != inner.dim()) throw Error(ErrorKind::InvalidArgument, "composing maps of different dimension");
  bool homothety = outer.homothety_ && inner.homothety_;
  Eigen::MatrixXd o = homothety ? outer.orthogonal_ : Eigen::MatrixXd(outer.orthogonal_ * inner.orthogonal_);
  Eigen::VectorXd t = outer.homothety_ ? Eigen::VectorXd(outer.ratio_ * inner.translation_ + outer.translation_)
                                       : Eigen::VectorXd(outer.ratio_ * (outer.orthogonal_ * inner.translation_) +
                                                         outer.translation_);
  return SimilarityMap(outer.ratio_ * inner.ratio_, std::move(o), std::move(t), homothety);
}

Ifs::Ifs(std::vector<SimilarityMap> maps, std::optional<Box> osc_box)
    : maps_(std::move(maps)), osc_box_(std::move(osc_box)) {
  if (maps_.empty()) throw Error(ErrorKind::InvalidArgument, "an IFS needs at least one map");
  if (maps_.size() > kMaxAlphabet) throw Error(ErrorKind::InvalidArgument, "an IFS may hold at most 64 maps");
  const int d = maps_.front().dim();
  r_min_ = 1.0;
  r_max_ = 0.0;
  double max_translation = 0.0;
  for (std::size_t i = 0; i < maps_.size(); ++i) {
    const auto& m = maps_[i];
    if (m.dim() != d) throw Error(ErrorKind::InvalidArgument, "map " + std::to_string(i) + " has a different dimension");
    if (!(m.ratio() < 1.0)) throw Error(ErrorKind::InvalidArgument, "map " + std::to_string(i) + " is not a contraction");
    r_min_ = std::min(r_min_, m.ratio());
    r_max_ = std::max(r_max_, m.ratio());
    max_translation = std::max(max_translation, m.translation().norm());
  }
  if (osc_box_) {
    if (osc_box_->lo.size() != d || osc_box_->hi.size() != d) {
      throw Error(ErrorKind::InvalidArgument, "osc_box dimension does not match the IFS");
    }
    if (((osc_box_->hi - osc_box_->lo).array() <= 0.0).any()) {
      throw Error(ErrorKind::InvalidArgument, "osc_box must be non-empty");
    }
  }
  bounding_radius_ = max_translation / (1.0 - r_max_);
  base_point_ = maps_.front().fixed_point();
}

std::vector<double> Ifs::ratios() const {
  std::vector<double> out;
  out.reserve(maps_.size());
  for (const auto& m : maps_) out.push_back(m.ratio());
  return out;
}

bool Ifs::all_homotheties() const noexcept {
  return std::all_of(maps_.begin(), maps_.end(), [](const SimilarityMap& m) { return m.is_homothety(); });
}

Ifs Ifs::restricted(Subset subset) const {
  if (subset == 0) throw Error(ErrorKind::EmptySet, "restriction to the empty alphabet has no attractor");
  std::vector<SimilarityMap> kept;
  for (Symbol i : subset_members(subset)) {
    if (i >= maps_.size()) throw Error(ErrorKind::InvalidArgument, "subset member outside the alphabet");
    kept.push_back(maps_[i]);
  }
  return Ifs(std::move(kept));
}

SimilarityMap compose_word(const Ifs& ifs, const Word& word) {
  SimilarityMap out = SimilarityMap::identity(ifs.dim());
  for (Symbol s : word) {
    if (s >= ifs.size()) {
      throw Error(ErrorKind::InvalidArgument, "invalid word: symbol " + std::to_string(s) + " outside alphabet of size " +
                                                  std::to_string(ifs.size()));
    }
    out = compose(out, ifs.map(s));
  }
  return out;
}

PointCloud attractor_cloud(const Ifs& ifs, double rho, std::size_t cap) {
  Section section = build_section(ifs, rho, cap);
  auto coords = detail::word_images(ifs, section.entries.size(),
                                    [&](std::size_t n) -> const Word& { return section.entries[n].word; });
  return PointCloud(ifs.dim(), std::move(coords), rho * 2.0 * ifs.bounding_radius());
}

PointCloud restricted_attractor_cloud(const Ifs& ifs, Subset subset, double rho, std::size_t cap) {
  if (subset == 0) throw Error(ErrorKind::EmptySet, "K_A for A = {} is empty; its dimension is taken to be 0");
  return attractor_cloud(ifs.restricted(subset), rho, cap);
}

PointCloud transform(const PointCloud& cloud, const SimilarityMap& map) {
  const int d = cloud.dim();
  if (map.dim() != d) throw Error(ErrorKind::InvalidArgument, "map and cloud dimensions differ");
  std::vector<double> out(cloud.coords().size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    map.apply(cloud.point(i), std::span<double>(out.data() + i * static_cast<std::size_t>(d), static_cast<std::size_t>(d)));
  }
  return PointCloud(d, std::move(out), cloud.epsilon() * map.ratio());
}

namespace detail {

CylinderWalker::CylinderWalker(const Ifs& ifs) : ifs_(ifs), homothety_(ifs.all_homotheties()) {
  const int d = ifs.dim();
  ratio_.assign(1, 1.0);
  orthogonal_.assign(1, Eigen::MatrixXd::Identity(d, d));
  translation_.assign(1, Eigen::VectorXd::Zero(d));
}

void CylinderWalker::push(Symbol s) {
  const auto& m = ifs_.map(s);
  const std::size_t next = depth_ + 1;
  if (ratio_.size() <= next) {
    ratio_.push_back(0.0);
    orthogonal_.push_back(orthogonal_.front());
    translation_.push_back(translation_.front());
  }
  ratio_[next] = ratio_[depth_] * m.ratio();
  if (homothety_) {
    translation_[next] = ratio_[depth_] * m.translation() + translation_[depth_];
  } else {
    orthogonal_[next].noalias() = orthogonal_[depth_] * m.orthogonal();
    translation_[next] = translation_[depth_];
    translation_[next].noalias() += ratio_[depth_] * (orthogonal_[depth_] * m.translation());
  }
  depth_ = next;
}

void CylinderWalker::image(const Eigen::VectorXd& x, double* out) const {
  const auto d = x.size();
  Eigen::Map<Eigen::VectorXd> dst(out, d);
  if (homothety_) {
    dst = ratio_[depth_] * x + translation_[depth_];
  } else {
    dst = ratio_[depth_] * (orthogonal_[depth_] * x) + translation_[depth_];
  }
}

SimilarityMap CylinderWalker::current() const {
  if (homothety_) return SimilarityMap::homothety(ratio_[depth_], translation_[depth_]);
  return SimilarityMap(ratio_[depth_], orthogonal_[depth_], translation_[depth_]);
}

std::vector<double> word_images(const Ifs& ifs, std::size_t count,
                                const std::function<const Word&(std::size_t)>& word_at) {
  const auto d = static_cast<std::size_t>(ifs.dim());
  std::vector<double> coords(count * d);
  CylinderWalker walker(ifs);
  Word current;
  for (std::size_t n = 0; n < count; ++n) {
    const Word& word = word_at(n);
    // Lexicographic input: keep the common prefix on the walker.
    std::size_t common = 0;
    while (common < current.size() && common < word.size() && current[common] == word[common]) ++common;
    while (current.size() > common) {
      walker.pop();
      current.pop_back();
    }
    for (std::size_t k = common; k < word.size(); ++k) {
      walker.push(word[k]);
      current.push_back(word[k]);
    }
    walker.image(ifs.base_point(), coords.data() + n * d);
  }
  return coords;
}

}  // namespace detail

}  // namespace gwf
