#include <doctest.h>

#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "gwf/errors.hpp"
#include "gwf/estimators.hpp"
#include "gwf/galton_watson.hpp"
#include "gwf/trees.hpp"

using namespace gwf;

namespace {

const double kCantorDim = std::log(2.0) / std::log(3.0);

std::vector<std::int64_t> cell_of(std::span<const double> x, double side) {
  std::vector<std::int64_t> k;
  for (double v : x) k.push_back(static_cast<std::int64_t>(std::floor(v / side + 1e-9)));
  return k;
}

// Direct count of occupied r-cells among points selected by `inside`.
template <class Pred>
std::size_t brute_window(const PointCloud& c, double r, Pred inside) {
  std::set<std::vector<std::int64_t>> cells;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (inside(c.point(i))) cells.insert(cell_of(c.point(i), r));
  return cells.size();
}

PointCloud one_over_n(std::size_t n) {
  std::vector<double> xs{0.0};
  for (std::size_t k = 1; k <= n; ++k) xs.push_back(1.0 / static_cast<double>(k));
  return fx::cloud1(xs, 1e-7);
}

}  // namespace

TEST_CASE("box_count") {
  const PointCloud square = attractor_cloud(fx::square(), 1.0 / 512);
  for (int j = 1; j <= 5; ++j) CHECK(box_count(square, std::ldexp(1.0, -j)) == (std::size_t{1} << (2 * j)));
  const PointCloud point = fx::cloud1({0.3}, 1e-6);
  for (double r : {0.5, 0.1, 0.001}) CHECK(box_count(point, r) == 1);

  try {
    box_count(square, square.epsilon());
    FAIL("expected a resolution error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Resolution);
  }
  CHECK_NOTHROW(box_count(square, square.epsilon(), 1.0));

  SUBCASE("monotone on nested grids") {
    const auto w = OffspringDistribution::binomial(4, 0.7);
    for (std::uint64_t s = 0; s < 10; ++s) {
      const PointCloud cloud = project_tree(sample_surviving(w, 9, s).tree, fx::square(), 1.0 / 512);
      std::size_t prev = 0;
      for (int j = 0; j <= 5; ++j) {
        const std::size_t n = box_count(cloud, std::ldexp(1.0, -j));
        CHECK(n >= prev);
        prev = n;
      }
    }
  }
}

TEST_CASE("box_dim_estimate") {
  const PointCloud square = attractor_cloud(fx::square(), 1.0 / 512);
  std::vector<double> radii;
  for (int j = 1; j <= 5; ++j) radii.push_back(std::ldexp(1.0, -j));
  auto sq = box_dim_estimate(square, radii);
  CHECK(std::abs(sq.slope - 2.0) < 0.05);
  CHECK(sq.table.size() == radii.size());

  CHECK(box_dim_estimate(fx::cloud1({0.3}, 1e-6), radii).slope == doctest::Approx(0.0));

  const PointCloud cantor = attractor_cloud(fx::cantor(), std::pow(3.0, -10));
  std::vector<double> triadic;
  for (int k = 1; k <= 8; ++k) triadic.push_back(std::pow(3.0, -k));
  auto est = box_dim_estimate(cantor, triadic);
  CHECK(std::abs(est.slope - kCantorDim) < 0.05);
  for (std::size_t k = 0; k < est.table.size(); ++k) CHECK(est.table[k].count == (std::size_t{1} << (k + 1)));

  CHECK_THROWS_AS(box_dim_estimate(cantor, std::vector<double>{0.1}), Error);
}

TEST_CASE("geometric_scale_pairs") {
  auto pairs = geometric_scale_pairs(0.5, 1.0, 1.0 / 64);
  CHECK_FALSE(pairs.empty());
  for (const auto& p : pairs) {
    CHECK(p.R / p.r >= 8.0 - 1e-9);
    CHECK(p.R <= 1.0);
    CHECK(p.r >= 1.0 / 64 - 1e-15);
  }
  // (1, 1/8) ... (1/8, 1/64): i in 0..3, j - i in 3..6 - i.
  CHECK(pairs.size() == 4 + 3 + 2 + 1);
  CHECK(geometric_scale_pairs(1.0 / 3, 1.0, 1.0 / 27).size() == 1 + 1 + 1);
}

TEST_CASE("local estimators on regular sets") {
  SUBCASE("filled square") {
    const PointCloud sq = attractor_cloud(fx::square(), 1.0 / 256);
    const auto pairs = geometric_scale_pairs(0.5, 1.0, 1.0 / 64);
    const auto centers = sample_centers(sq, 300, 1);
    CHECK(std::abs(assouad_estimate(sq, pairs, centers).value - 2.0) < 0.1);
    CHECK(std::abs(lower_estimate(sq, pairs, centers).value - 2.0) < 0.1);
  }
  SUBCASE("Cantor cloud") {
    const PointCloud c = attractor_cloud(fx::cantor(), std::pow(3.0, -10));
    const auto pairs = geometric_scale_pairs(1.0 / 3, 1.0, std::pow(3.0, -8));
    const auto centers = sample_centers(c, 300, 2);
    auto hi = assouad_estimate(c, pairs, centers);
    auto lo = lower_estimate(c, pairs, centers);
    CHECK(std::abs(hi.value - kCantorDim) < 0.1);
    CHECK(std::abs(lo.value - kCantorDim) < 0.1);
    CHECK(hi.admissible_pairs == lo.admissible_pairs);
    CHECK(hi.windows.size() == hi.admissible_pairs * centers.size());
  }
}

TEST_CASE("accumulating sequence: Assouad above box") {
  const PointCloud c = one_over_n(3000);
  std::vector<double> radii;
  for (int j = 4; j <= 13; ++j) radii.push_back(std::ldexp(1.0, -j));
  const double box = box_dim_estimate(c, radii).slope;
  const auto pairs = geometric_scale_pairs(0.5, 0.5, std::ldexp(1.0, -13));
  std::vector<std::size_t> all(c.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto hi = assouad_estimate(c, pairs, all);
  CHECK(hi.value > box + 0.2);
  // The densest window sits next to the accumulation point.
  CHECK(c.point(hi.extreme.center)[0] < hi.extreme.R);
}

TEST_CASE("window counts agree with a direct count") {
  const auto w = OffspringDistribution::binomial(4, 0.7);
  const PointCloud cloud = project_tree(sample_surviving(w, 8, 3).tree, fx::square(), 1.0 / 256);
  const auto pairs = geometric_scale_pairs(0.5, 1.0, 1.0 / 64);
  const auto centers = sample_centers(cloud, 40, 9);
  for (WindowShape shape : {WindowShape::GridCell, WindowShape::Ball}) {
    auto est = assouad_estimate(cloud, pairs, centers, shape);
    for (const auto& win : est.windows) {
      const auto x = cloud.point(win.center);
      std::size_t n = 0;
      if (shape == WindowShape::GridCell) {
        const auto home = cell_of(x, win.R);
        n = brute_window(cloud, win.r, [&](std::span<const double> y) { return cell_of(y, win.R) == home; });
      } else {
        n = brute_window(cloud, win.r, [&](std::span<const double> y) { return distance(x, y) <= win.R; });
      }
      CHECK(win.count == n);
      CHECK(win.exponent == doctest::Approx(n <= 1 ? 0.0 : std::log(double(n)) / std::log(win.R / win.r)));
    }
  }
}

TEST_CASE("estimator ordering") {
  const auto w = OffspringDistribution::binomial(4, 0.7);
  const auto pairs = geometric_scale_pairs(0.5, 1.0, 1.0 / 64);
  std::vector<double> radii;
  for (int j = 1; j <= 6; ++j) radii.push_back(std::ldexp(1.0, -j));
  for (std::uint64_t s = 0; s < 5; ++s) {
    const PointCloud cloud = project_tree(sample_surviving(w, 10, s).tree, fx::square(), 1.0 / 1024);
    const auto centers = sample_centers(cloud, 500, s);
    const double lo = lower_estimate(cloud, pairs, centers).value;
    const double hi = assouad_estimate(cloud, pairs, centers).value;
    const double box = box_dim_estimate(cloud, radii).slope;
    CHECK(lo <= box + 1e-9);
    CHECK(box <= hi + 1e-9);
  }
}

TEST_CASE("estimator errors and centres") {
  const PointCloud c = attractor_cloud(fx::cantor(), 1.0 / 81);
  const auto fine = geometric_scale_pairs(1.0 / 3, 1.0 / 81, 1.0 / 6561);
  const auto centers = sample_centers(c, 10, 0);
  try {
    assouad_estimate(c, fine, centers);
    FAIL("expected a resolution error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Resolution);
  }
  std::vector<std::size_t> outside{c.size()};
  CHECK_THROWS_AS(lower_estimate(c, geometric_scale_pairs(1.0 / 3, 1.0, 1.0 / 27), outside), Error);

  CHECK(sample_centers(c, 10, 4) == sample_centers(c, 10, 4));
  for (std::size_t i : sample_centers(c, 50, 5)) CHECK(i < c.size());
  CHECK(sample_centers(c, c.size() + 3, 5).size() == c.size());
}
