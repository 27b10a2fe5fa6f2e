#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gwf/point_cloud.hpp"

namespace gwf {

// Estimators refuse scales finer than guard * epsilon of the cloud.
inline constexpr double kDefaultResolutionGuard = 4.0;
// Smallest admissible R / r for local windows.
inline constexpr double kMinWindowRatio = 8.0;

// Occupied cells of the grid of side r anchored at the origin. Cell index of a
// coordinate is floor(x / r + 1e-9), so points sitting on a grid line up to
// rounding go to the upper cell. A constant-factor surrogate for N_r.
std::size_t box_count(const PointCloud& cloud, double r, double guard = kDefaultResolutionGuard);

struct BoxCountRow {
  double r;
  std::size_t count;
};

struct BoxDimEstimate {
  double slope;  // least squares slope of log N_r against log(1/r)
  std::vector<BoxCountRow> table;
};

// Needs at least two distinct radii.
BoxDimEstimate box_dim_estimate(const PointCloud& cloud, std::span<const double> radii,
                                double guard = kDefaultResolutionGuard);

struct ScalePair {
  double R;
  double r;
};

// Pairs (base^i, base^j) with i < j, base^j >= finest, base^i <= coarsest and
// base^(j-i) <= 1 / kMinWindowRatio. base in (0, 1).
std::vector<ScalePair> geometric_scale_pairs(double base, double coarsest, double finest);

enum class WindowShape {
  GridCell,  // the grid cell of side R that contains the centre
  Ball,      // the closed Euclidean ball B_R(x)
};

struct WindowRecord {
  std::size_t center;  // index into the cloud
  double R;
  double r;
  std::size_t count;  // occupied r-cells inside the window
  double exponent;    // log count / log(R / r)
};

struct LocalEstimate {
  double value;
  WindowRecord extreme;  // window attaining value
  std::vector<WindowRecord> windows;
  std::size_t admissible_pairs;
};

// Admissible pairs satisfy r >= guard * epsilon, R / r >= kMinWindowRatio and
// R <= diagonal of the cloud's bounding box. Every centre is tried with every
// admissible pair. Throws Resolution when no pair is admissible.
LocalEstimate assouad_estimate(const PointCloud& cloud, std::span<const ScalePair> pairs,
                               std::span<const std::size_t> centers, WindowShape shape = WindowShape::GridCell,
                               double guard = kDefaultResolutionGuard);
LocalEstimate lower_estimate(const PointCloud& cloud, std::span<const ScalePair> pairs,
                             std::span<const std::size_t> centers, WindowShape shape = WindowShape::GridCell,
                             double guard = kDefaultResolutionGuard);

// Centre i is floor(u_i * size) with u_i = rng::to_unit(rng::derive(seed, i)).
// count >= size returns every index.
std::vector<std::size_t> sample_centers(const PointCloud& cloud, std::size_t count, std::uint64_t seed);

}  // namespace gwf
