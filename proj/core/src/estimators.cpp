#include "gwf/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "gwf/errors.hpp"
#include "gwf/kd_tree.hpp"
#include "gwf/parallel.hpp"
#include "gwf/rng.hpp"

namespace gwf {

namespace {

constexpr double kCellNudge = 1e-9;

// Row-major integer cell coordinates of every point on the grid of side `side`.
std::vector<std::int64_t> cell_keys(const PointCloud& cloud, double side) {
  const auto& c = cloud.coords();
  std::vector<std::int64_t> keys(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    keys[k] = static_cast<std::int64_t>(std::floor(c[k] / side + kCellNudge));
  }
  return keys;
}

struct KeyLess {
  const std::vector<std::int64_t>* keys;
  std::size_t dim;
  bool operator()(std::size_t a, std::size_t b) const {
    const auto* ka = keys->data() + a * dim;
    const auto* kb = keys->data() + b * dim;
    for (std::size_t t = 0; t < dim; ++t) {
      if (ka[t] != kb[t]) return ka[t] < kb[t];
    }
    return a < b;
  }
};

bool same_key(const std::vector<std::int64_t>& keys, std::size_t dim, std::size_t a, std::size_t b) {
  return std::equal(keys.begin() + static_cast<std::ptrdiff_t>(a * dim),
                    keys.begin() + static_cast<std::ptrdiff_t>((a + 1) * dim),
                    keys.begin() + static_cast<std::ptrdiff_t>(b * dim));
}

// Distinct cells of side r among the given points.
std::size_t occupied_cells(const PointCloud& cloud, std::vector<std::size_t> indices, double r) {
  const auto dim = static_cast<std::size_t>(cloud.dim());
  const auto& c = cloud.coords();
  std::vector<std::int64_t> keys(indices.size() * dim);
  for (std::size_t n = 0; n < indices.size(); ++n) {
    for (std::size_t t = 0; t < dim; ++t) {
      keys[n * dim + t] = static_cast<std::int64_t>(std::floor(c[indices[n] * dim + t] / r + kCellNudge));
    }
  }
  std::vector<std::size_t> order(indices.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), KeyLess{&keys, dim});
  std::size_t count = 0;
  for (std::size_t n = 0; n < order.size(); ++n) {
    if (n == 0 || !same_key(keys, dim, order[n - 1], order[n])) ++count;
  }
  return count;
}

void require_resolution(const PointCloud& cloud, double r, double guard) {
  if (!(r > 0.0)) throw Error(ErrorKind::Resolution, "scale must be positive");
  if (r < guard * cloud.epsilon()) {
    throw Error(ErrorKind::Resolution, "scale " + std::to_string(r) + " below guard " + std::to_string(guard) +
                                           " * epsilon " + std::to_string(cloud.epsilon()));
  }
}

double diagonal(const PointCloud& cloud) {
  const Box b = cloud.bounds();
  return (b.hi - b.lo).norm();
}

double window_exponent(std::size_t count, double R, double r) {
  return count <= 1 ? 0.0 : std::log(static_cast<double>(count)) / std::log(R / r);
}

std::vector<WindowRecord> grid_windows(const PointCloud& cloud, const ScalePair& pair,
                                       std::span<const std::size_t> centers) {
  const auto dim = static_cast<std::size_t>(cloud.dim());
  const auto keys = cell_keys(cloud, pair.R);
  std::vector<std::size_t> order(cloud.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const KeyLess less{&keys, dim};
  std::sort(order.begin(), order.end(), less);

  // Range of `order` holding the R-cell of each centre; centres sharing a cell
  // share the window.
  std::vector<std::size_t> rank(cloud.size());
  for (std::size_t n = 0; n < order.size(); ++n) rank[order[n]] = n;
  std::vector<std::size_t> block_start(order.size());
  for (std::size_t n = 0; n < order.size(); ++n) {
    block_start[n] = (n > 0 && same_key(keys, dim, order[n - 1], order[n])) ? block_start[n - 1] : n;
  }
  std::vector<std::size_t> starts;
  for (std::size_t c : centers) starts.push_back(block_start[rank.at(c)]);
  std::vector<std::size_t> distinct = starts;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<std::size_t> counts(distinct.size());
  parallel_for(distinct.size(), [&](std::size_t k) {
    std::size_t begin = distinct[k];
    std::size_t end = begin + 1;
    while (end < order.size() && block_start[end] == begin) ++end;
    counts[k] = occupied_cells(cloud, {order.begin() + static_cast<std::ptrdiff_t>(begin),
                                       order.begin() + static_cast<std::ptrdiff_t>(end)},
                               pair.r);
  });

  std::vector<WindowRecord> out;
  out.reserve(centers.size());
  for (std::size_t n = 0; n < centers.size(); ++n) {
    auto k = static_cast<std::size_t>(std::lower_bound(distinct.begin(), distinct.end(), starts[n]) - distinct.begin());
    out.push_back({centers[n], pair.R, pair.r, counts[k], window_exponent(counts[k], pair.R, pair.r)});
  }
  return out;
}

std::vector<WindowRecord> ball_windows(const PointCloud& cloud, const KdTree& tree, const ScalePair& pair,
                                       std::span<const std::size_t> centers) {
  std::vector<WindowRecord> out(centers.size());
  parallel_for(centers.size(), [&](std::size_t n) {
    auto inside = tree.within(cloud.point(centers[n]), pair.R);
    std::size_t count = occupied_cells(cloud, std::move(inside), pair.r);
    out[n] = {centers[n], pair.R, pair.r, count, window_exponent(count, pair.R, pair.r)};
  });
  return out;
}

LocalEstimate local_estimate(const PointCloud& cloud, std::span<const ScalePair> pairs,
                             std::span<const std::size_t> centers, WindowShape shape, double guard, bool upper) {
  if (centers.empty()) throw Error(ErrorKind::InvalidArgument, "no window centres");
  for (std::size_t c : centers) {
    if (c >= cloud.size()) throw Error(ErrorKind::InvalidArgument, "window centre outside the cloud");
  }
  const double diam = diagonal(cloud);
  std::vector<ScalePair> admissible;
  for (const auto& p : pairs) {
    if (p.r > 0.0 && p.r >= guard * cloud.epsilon() && p.R >= kMinWindowRatio * p.r * (1.0 - 1e-12) && p.R <= diam) {
      admissible.push_back(p);
    }
  }
  if (admissible.empty()) {
    throw Error(ErrorKind::Resolution, "no admissible scale pair (need r >= guard*epsilon, R/r >= 8, R <= diam)");
  }

  std::optional<KdTree> tree;
  if (shape == WindowShape::Ball) tree.emplace(cloud.dim(), cloud.coords());

  LocalEstimate est{upper ? 0.0 : INFINITY, {}, {}, admissible.size()};
  bool found = false;
  for (const auto& p : admissible) {
    auto windows = shape == WindowShape::GridCell ? grid_windows(cloud, p, centers) : ball_windows(cloud, *tree, p, centers);
    for (const auto& w : windows) {
      // Single-cell windows only inform the lower estimate.
      if (upper && w.count <= 1) continue;
      if (!found || (upper ? w.exponent > est.value : w.exponent < est.value)) {
        est.value = w.exponent;
        est.extreme = w;
        found = true;
      }
    }
    est.windows.insert(est.windows.end(), windows.begin(), windows.end());
  }
  if (!found) {
    est.value = 0.0;
    est.extreme = est.windows.front();
  }
  return est;
}

}  // namespace

std::size_t box_count(const PointCloud& cloud, double r, double guard) {
  require_resolution(cloud, r, guard);
  std::vector<std::size_t> all(cloud.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return occupied_cells(cloud, std::move(all), r);
}

BoxDimEstimate box_dim_estimate(const PointCloud& cloud, std::span<const double> radii, double guard) {
  BoxDimEstimate est{0.0, {}};
  for (double r : radii) est.table.push_back({r, box_count(cloud, r, guard)});
  std::vector<double> xs;
  for (double r : radii) xs.push_back(-std::log(r));
  std::sort(xs.begin(), xs.end());
  if (std::unique(xs.begin(), xs.end()) - xs.begin() < 2) {
    throw Error(ErrorKind::InvalidArgument, "box dimension needs at least two distinct radii");
  }
  double mx = 0.0;
  double my = 0.0;
  for (const auto& row : est.table) {
    mx += -std::log(row.r);
    my += std::log(static_cast<double>(row.count));
  }
  const auto n = static_cast<double>(est.table.size());
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& row : est.table) {
    double dx = -std::log(row.r) - mx;
    sxy += dx * (std::log(static_cast<double>(row.count)) - my);
    sxx += dx * dx;
  }
  est.slope = sxy / sxx;
  return est;
}

std::vector<ScalePair> geometric_scale_pairs(double base, double coarsest, double finest) {
  if (!(base > 0.0 && base < 1.0)) throw Error(ErrorKind::Domain, "scale base must lie in (0, 1)");
  if (!(finest > 0.0 && finest <= coarsest)) throw Error(ErrorKind::Domain, "need 0 < finest <= coarsest");
  const double lb = std::log(base);
  const auto first = static_cast<int>(std::ceil(std::log(coarsest) / lb - 1e-9));
  const auto last = static_cast<int>(std::floor(std::log(finest) / lb + 1e-9));
  std::vector<ScalePair> pairs;
  for (int i = std::max(first, 0); i <= last; ++i) {
    for (int j = i + 1; j <= last; ++j) {
      if (std::pow(base, j - i) <= (1.0 + 1e-12) / kMinWindowRatio) pairs.push_back({std::pow(base, i), std::pow(base, j)});
    }
  }
  return pairs;
}

LocalEstimate assouad_estimate(const PointCloud& cloud, std::span<const ScalePair> pairs,
                               std::span<const std::size_t> centers, WindowShape shape, double guard) {
  return local_estimate(cloud, pairs, centers, shape, guard, true);
}

LocalEstimate lower_estimate(const PointCloud& cloud, std::span<const ScalePair> pairs,
                             std::span<const std::size_t> centers, WindowShape shape, double guard) {
  return local_estimate(cloud, pairs, centers, shape, guard, false);
}

std::vector<std::size_t> sample_centers(const PointCloud& cloud, std::size_t count, std::uint64_t seed) {
  const std::size_t n = cloud.size();
  std::vector<std::size_t> out;
  if (count >= n) {
    out.resize(n);
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
  }
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto c = static_cast<std::size_t>(rng::to_unit(rng::derive(seed, i)) * static_cast<double>(n));
    out.push_back(std::min(c, n - 1));
  }
  return out;
}

}  // namespace gwf
