#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gwf/estimators.hpp"
#include "gwf/galton_watson.hpp"
#include "gwf/similarity.hpp"

namespace gwf::lab {

inline constexpr int kSchemaVersion = 1;

// Independent sub-streams of the run seed: stream s uses rng::derive(seed, s).
enum Stream : std::uint64_t { kKestenStigum = 1, kTrees = 2, kEstimators = 3, kZoom = 4, kWsc = 5 };

struct EstimatorConfig {
  std::optional<double> scale_base;  // default: the common ratio, else 1/2
  std::size_t centers = 1024;
  double guard = kDefaultResolutionGuard;
  WindowShape shape = WindowShape::GridCell;
};

struct CheckConfig {
  int ssc_depth = 8;
  std::vector<double> wsc_rhos;  // default: r_min^2, r_min^3, r_min^4
  std::size_t wsc_balls = 256;
  std::size_t zoom_nodes = 20;
  std::size_t zoom_horizon = 12;
  std::size_t zoom_margin = 4;  // levels kept below a checked node
};

struct ZoomConfig {
  std::string path;  // base-|alphabet| digits; empty: follow the first surviving child
  std::size_t depth = 6;
  double tail_factor = 4.0;
  std::size_t tail_length = 2;
};

struct RenderConfig {
  std::size_t width = 512;
  std::size_t height = 512;
};

struct ExperimentConfig {
  Ifs ifs;
  OffspringDistribution offspring;  // default: every symbol, always (the full tree)
  std::uint64_t seed = 0;
  std::size_t horizon = 12;
  std::vector<double> rho{};  // section scales; default r_max^{H/4, H/2, 3H/4, H} below r_min
  std::size_t trials = 1000;
  std::size_t ks_generation = 10;
  std::size_t tree_samples = 10;
  std::uint64_t max_attempts = kDefaultMaxAttempts;
  std::filesystem::path output = "gwf_out";
  EstimatorConfig estimators{};
  CheckConfig check{};
  ZoomConfig zoom{};
  RenderConfig render{};
};

// Throws Error(Config) with the offending field in the message.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Each command returns its report; commands that write files put them under
// config.output.
nlohmann::json cmd_dims(const ExperimentConfig& config);
nlohmann::json cmd_simulate(const ExperimentConfig& config);
nlohmann::json cmd_check(const ExperimentConfig& config);
nlohmann::json cmd_zoom(const ExperimentConfig& config);
nlohmann::json cmd_render(const ExperimentConfig& config);

// Cloud of surviving sample 0 at the finest configured scale, as written to
// cloud_0.csv by cmd_simulate.
PointCloud reference_cloud(const ExperimentConfig& config);

// The "estimators" block of the simulate summary for a given cloud.
nlohmann::json estimator_report(const PointCloud& cloud, const ExperimentConfig& config);

// Full command line: gwf_lab <dims|simulate|check|zoom|render> CONFIG [--seed N] [--out DIR] [--trials N].
// Returns the process exit code: 0 ok, 1 config, 2 domain, 3 resource.
int run_cli(int argc, char** argv);

}  // namespace gwf::lab
