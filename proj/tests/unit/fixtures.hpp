#pragma once

// Shared systems and oracles for the test suites.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "gwf/galton_watson.hpp"
#include "gwf/point_cloud.hpp"
#include "gwf/similarity.hpp"

namespace fx {

inline gwf::SimilarityMap line_map(double r, double t) {
  return gwf::SimilarityMap::homothety(r, Eigen::VectorXd::Constant(1, t));
}

inline gwf::Ifs cantor() { return gwf::Ifs({line_map(1.0 / 3, 0.0), line_map(1.0 / 3, 2.0 / 3)}); }

inline gwf::Ifs cantor_with_box() {
  gwf::Box b{Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 1.0)};
  return gwf::Ifs({line_map(1.0 / 3, 0.0), line_map(1.0 / 3, 2.0 / 3)}, b);
}

inline gwf::Ifs halves() { return gwf::Ifs({line_map(0.5, 0.0), line_map(0.5, 0.5)}); }

inline gwf::Ifs doubled() { return gwf::Ifs({line_map(0.5, 0.0), line_map(0.5, 0.0)}); }

// Ratios {1/2, 1/4} on the line.
inline gwf::Ifs mixed() { return gwf::Ifs({line_map(0.5, 0.0), line_map(0.25, 0.75)}); }

// Mandelbrot percolation grid: b = 2, d = 2; symbol = x + 2 y.
inline gwf::Ifs square() {
  std::vector<gwf::SimilarityMap> maps;
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 2; ++x) {
      Eigen::VectorXd t(2);
      t << 0.5 * x, 0.5 * y;
      maps.push_back(gwf::SimilarityMap::homothety(0.5, t));
    }
  }
  return gwf::Ifs(std::move(maps));
}

// P[W = {}] = 1/4, P[W = {0,1}] = 3/4.
inline gwf::OffspringDistribution quadratic() { return gwf::OffspringDistribution(2, {{0b00, 0.25}, {0b11, 0.75}}); }

// Uniform on {{0}, {0,1}}.
inline gwf::OffspringDistribution cantor_mixed() {
  return gwf::OffspringDistribution(2, {{0b01, 0.5}, {0b11, 0.5}});
}

inline gwf::PointCloud cloud1(std::vector<double> xs, double eps = 0.0) {
  return gwf::PointCloud(1, std::move(xs), eps);
}

// O(|A||B|) Hausdorff distance.
inline double brute_hausdorff(const gwf::PointCloud& a, const gwf::PointCloud& b) {
  auto directed = [](const gwf::PointCloud& p, const gwf::PointCloud& q) {
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      double best = INFINITY;
      for (std::size_t j = 0; j < q.size(); ++j) best = std::min(best, gwf::distance(p.point(i), q.point(j)));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

// Smallest fixed point of f(s) = sum p_B s^|B| by plain iteration (independent of the library loop).
inline double iterate_q(const std::vector<std::pair<int, double>>& size_law, int steps = 100000) {
  double s = 0.0;
  for (int k = 0; k < steps; ++k) {
    double f = 0.0;
    for (auto [n, p] : size_law) f += p * std::pow(s, n);
    s = f;
  }
  return s;
}

}  // namespace fx
