#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "gwf/dimension.hpp"
#include "gwf/errors.hpp"
#include "gwf/geometry.hpp"
#include "gwf/section.hpp"
#include "gwf/separation.hpp"

using namespace gwf;

namespace {

bool is_prefix(const Word& p, const Word& w) {
  return p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin());
}

}  // namespace

TEST_CASE("similarity map validation") {
  Eigen::MatrixXd skew(2, 2);
  skew << 1.0, 0.1, 0.0, 1.0;
  CHECK_THROWS_AS(SimilarityMap(0.5, skew, Eigen::VectorXd::Zero(2)), Error);
  CHECK_THROWS_AS(SimilarityMap(0.0, Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2)), Error);
  CHECK_THROWS_AS(Ifs({fx::line_map(1.0, 0.0)}), Error);
  CHECK_THROWS_AS(Ifs({}), Error);

  Eigen::MatrixXd rot(2, 2);
  rot << 0.0, -1.0, 1.0, 0.0;
  SimilarityMap f(0.5, rot, Eigen::VectorXd::Ones(2));
  SimilarityMap g = SimilarityMap::homothety(0.25, Eigen::VectorXd::Zero(2));
  CHECK(compose(f, g).ratio() == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(compose(f, f.inverse()).approx_equal(SimilarityMap::identity(2)));
}

TEST_CASE("compose_word") {
  const Ifs c = fx::cantor();
  SUBCASE("empty word is the identity") {
    SimilarityMap id = compose_word(c, {});
    CHECK(id.ratio() == 1.0);
    CHECK(id.translation()[0] == 0.0);
  }
  SUBCASE("Cantor 01 is x/9 + 2/9") {
    SimilarityMap m = compose_word(c, {0, 1});
    CHECK(m.ratio() == doctest::Approx(1.0 / 9).epsilon(1e-15));
    CHECK(m.translation()[0] == doctest::Approx(2.0 / 9).epsilon(1e-15));
  }
  SUBCASE("ratios multiply") {
    const Ifs m = fx::mixed();
    const Word i{0, 1, 1}, j{1, 0};
    Word ij = i;
    ij.insert(ij.end(), j.begin(), j.end());
    CHECK(compose_word(m, ij).ratio() == doctest::Approx(compose_word(m, i).ratio() * compose_word(m, j).ratio()));
  }
  CHECK_THROWS_AS(compose_word(c, {0, 2}), Error);
}

TEST_CASE("build_section examples") {
  SUBCASE("equal ratios give a full level") {
    const Ifs c = fx::cantor();
    for (double rho : {0.2, 0.05, 0.01, 1.0 / 27}) {
      auto n = static_cast<std::size_t>(std::ceil(std::log(rho) / std::log(1.0 / 3) - 1e-9));
      Section s = build_section(c, rho);
      CHECK(s.entries.size() == (std::size_t{1} << n));
      for (const auto& e : s.entries) CHECK(e.word.size() == n);
    }
  }
  SUBCASE("ratios 1/2 and 1/4 at 1/4") {
    Section s = build_section(fx::mixed(), 0.25);
    REQUIRE(s.entries.size() == 3);
    CHECK(s.entries[0].word == Word{0, 0});
    CHECK(s.entries[1].word == Word{0, 1});
    CHECK(s.entries[2].word == Word{1});
  }
  SUBCASE("domain and cap") {
    CHECK_THROWS_AS(build_section(fx::mixed(), 0.25 + 1e-3), Error);
    CHECK_THROWS_AS(build_section(fx::mixed(), 0.6), Error);
    CHECK_THROWS_AS(build_section(fx::mixed(), 0.0), Error);
    try {
      build_section(fx::cantor(), 1e-9, 100);
      FAIL("expected a resource error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Resource);
    }
  }
}

TEST_CASE("section invariants") {
  const Ifs m = fx::mixed();
  std::mt19937_64 gen(99);
  for (double rho : {0.2, 0.03, 1e-3, 1e-5}) {
    Section s = build_section(m, rho);
    // rho * r_min < r_word <= rho
    for (const auto& e : s.entries) {
      CHECK(e.ratio <= rho * (1 + 1e-12));
      CHECK(e.ratio > rho * m.r_min());
    }
    // Moran telescoping: sum r_w^s = 1.
    const double sdim = moran_dimension(m.ratios());
    double sum = 0.0;
    for (const auto& e : s.entries) sum += std::pow(e.ratio, sdim);
    CHECK(std::abs(sum - 1.0) < 1e-8);
    // Exactly one entry prefixes every long random word.
    std::uniform_int_distribution<Symbol> sym(0, 1);
    for (int t = 0; t < 1000; ++t) {
      Word w(64);
      for (auto& x : w) x = sym(gen);
      int hits = 0;
      for (const auto& e : s.entries) hits += is_prefix(e.word, w) ? 1 : 0;
      CHECK(hits == 1);
    }
  }
}

TEST_CASE("attractor_cloud") {
  const Ifs c = fx::cantor();
  SUBCASE("Cantor at 1/27 has 8 points, near 0 and 1") {
    PointCloud cloud = attractor_cloud(c, 1.0 / 27);
    CHECK(cloud.size() == 8);
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      lo = std::min(lo, cloud.point(i)[0]);
      hi = std::max(hi, cloud.point(i)[0]);
    }
    CHECK(lo <= cloud.epsilon());
    CHECK(1.0 - hi <= cloud.epsilon());
  }
  SUBCASE("size equals section size") {
    for (double rho : {0.1, 0.01}) CHECK(attractor_cloud(fx::mixed(), rho).size() == build_section(fx::mixed(), rho).entries.size());
  }
  SUBCASE("refinement stays within epsilon") {
    for (const Ifs& ifs : {fx::cantor(), fx::mixed(), fx::square()}) {
      const double rho = 0.1;
      PointCloud a = attractor_cloud(ifs, rho);
      PointCloud b = attractor_cloud(ifs, rho * rho);
      CHECK(fx::brute_hausdorff(a, b) <= a.epsilon());
    }
  }
  SUBCASE("Hutchinson identity at cloud scale") {
    for (const Ifs& ifs : {fx::cantor(), fx::mixed(), fx::square()}) {
      PointCloud k = attractor_cloud(ifs, 0.02);
      std::vector<double> united;
      for (const auto& map : ifs.maps()) {
        PointCloud img = transform(k, map);
        united.insert(united.end(), img.coords().begin(), img.coords().end());
      }
      PointCloud u(ifs.dim(), united, k.epsilon());
      CHECK(hausdorff_distance(u, k) <= 2 * k.epsilon());
    }
  }
}

TEST_CASE("bounding radius contains every cylinder image of its ball") {
  for (const Ifs& ifs : {fx::cantor(), fx::mixed(), fx::square()}) {
    const double rk = ifs.bounding_radius();
    Section s = build_section(ifs, 0.01);
    for (const auto& e : s.entries) {
      SimilarityMap m = compose_word(ifs, e.word);
      CHECK(m.translation().norm() + m.ratio() * rk <= rk * (1 + 1e-12));
    }
  }
}

TEST_CASE("restricted_attractor_cloud") {
  const Ifs c = fx::cantor();
  CHECK(restricted_attractor_cloud(c, 0b11, 0.01) == attractor_cloud(c, 0.01));
  PointCloud zero = restricted_attractor_cloud(c, 0b01, 0.01);
  for (std::size_t i = 0; i < zero.size(); ++i) CHECK(std::abs(zero.point(i)[0]) <= zero.epsilon());
  PointCloud one = restricted_attractor_cloud(c, 0b10, 0.01);
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(std::abs(one.point(i)[0] - 1.0) <= one.epsilon());
  try {
    restricted_attractor_cloud(c, 0, 0.01);
    FAIL("expected an empty-set error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptySet);
  }
}

TEST_CASE("check_ssc") {
  SUBCASE("Cantor is separated and the gap tends to 1/3") {
    SeparationVerdict v = check_ssc(fx::cantor(), 10);
    CHECK(v.kind == SeparationKind::CertifiedSeparated);
    CHECK(v.cloud_gap >= 1.0 / 3 - 1e-12);
    CHECK(v.gap_lower_bound > 0.0);
    CHECK(v.gap_lower_bound <= 1.0 / 3 + 1e-12);
    CHECK(check_ssc(fx::cantor(), 14).gap_lower_bound >= v.gap_lower_bound);
  }
  SUBCASE("identical maps overlap") {
    CHECK(check_ssc(fx::doubled(), 3).kind == SeparationKind::CertifiedOverlap);
  }
  SUBCASE("touching halves stay undecided") {
    for (int depth = 1; depth <= 10; ++depth) CHECK(check_ssc(fx::halves(), depth).kind == SeparationKind::Undecided);
  }
  SUBCASE("monotone in depth") {
    for (const Ifs& ifs : {fx::cantor(), fx::mixed(), fx::halves(), fx::square()}) {
      bool seen = false;
      for (int depth = 1; depth <= 9; ++depth) {
        bool sep = check_ssc(ifs, depth).kind == SeparationKind::CertifiedSeparated;
        if (seen) CHECK(sep);
        seen = seen || sep;
      }
    }
  }
  SUBCASE("certificate soundness") {
    SeparationVerdict v = check_ssc(fx::mixed(), 8);
    REQUIRE(v.kind == SeparationKind::CertifiedSeparated);
    CHECK(v.cloud_gap > 2 * v.approximation_error);
    CHECK(v.gap_lower_bound <= 0.25 + 1e-12);  // true gap between [0,1/2] and [3/4,1]
    CHECK(ssc_tau(fx::mixed(), v) > 0.0);
  }
}

TEST_CASE("check_declared_osc") {
  const Box unit{Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 1.0)};
  CHECK(check_declared_osc(fx::halves(), unit).pass);
  CHECK(check_declared_osc(fx::cantor(), unit).pass);
  OscReport bad = check_declared_osc(fx::doubled(), unit);
  CHECK_FALSE(bad.pass);
  CHECK_FALSE(bad.heuristic);
  const Box shifted{Eigen::VectorXd::Constant(1, 5.0), Eigen::VectorXd::Constant(1, 6.0)};
  CHECK_FALSE(check_declared_osc(fx::doubled(), shifted).pass);

  Eigen::MatrixXd flip(1, 1);
  flip << -1.0;
  Ifs reflected({SimilarityMap(1.0 / 3, flip, Eigen::VectorXd::Constant(1, 1.0 / 3)), fx::line_map(1.0 / 3, 2.0 / 3)});
  OscReport r = check_declared_osc(reflected, unit);
  CHECK(r.heuristic);
  CHECK(r.pass);
}

TEST_CASE("wsc_profile") {
  const std::vector<double> rhos{1.0 / 9, 1.0 / 27, 1.0 / 81};
  SUBCASE("identical maps count once") {
    for (const auto& e : wsc_profile(fx::doubled(), std::vector<double>{0.2, 0.1, 0.05}, 1000, 1)) {
      CHECK(e.max_count == 1);
      CHECK(e.distinct_maps == 1);
    }
  }
  SUBCASE("Cantor is bounded and constant, matching a brute-force count") {
    const Ifs c = fx::cantor();
    auto prof = wsc_profile(c, rhos, 100000, 1);
    for (const auto& e : prof) {
      CHECK(e.max_count == prof.front().max_count);
      CHECK(e.max_count <= 2);
      // Brute force: cylinder clouds phi_w(phi_u(0)), |u| = 2, and balls at phi_w(0).
      Section s = build_section(c, e.rho);
      std::size_t worst = 0;
      for (const auto& centre : s.entries) {
        const double x = compose_word(c, centre.word).translation()[0];
        std::size_t hits = 0;
        for (const auto& cyl : s.entries) {
          SimilarityMap m = compose_word(c, cyl.word);
          bool meets = false;
          for (Word u : {Word{0, 0}, Word{0, 1}, Word{1, 0}, Word{1, 1}}) {
            double y = m(compose_word(c, u).translation())[0];
            meets = meets || std::abs(y - x) <= e.rho;
          }
          hits += meets ? 1 : 0;
        }
        worst = std::max(worst, hits);
      }
      CHECK(e.max_count == worst);
    }
  }
  SUBCASE("unit interval halves stay at most 3 at dyadic scales") {
    for (const auto& e : wsc_profile(fx::halves(), std::vector<double>{0.25, 1.0 / 16, 1.0 / 64}, 100000, 1)) {
      CHECK(e.max_count <= 3);
    }
  }
  SUBCASE("sampled balls are reproducible") {
    auto a = wsc_profile(fx::square(), std::vector<double>{0.1, 0.01}, 50, 42);
    auto b = wsc_profile(fx::square(), std::vector<double>{0.1, 0.01}, 50, 42);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].max_count == b[i].max_count);
  }
}
