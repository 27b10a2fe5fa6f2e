#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "gwf/dimension.hpp"
#include "gwf/estimators.hpp"
#include "gwf/galton_watson.hpp"
#include "gwf/geometry.hpp"
#include "gwf/similarity.hpp"

namespace {

gwf::Ifs square() {
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

gwf::PointCloud random_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> xs(2 * n);
  for (auto& x : xs) x = u(gen);
  return gwf::PointCloud(2, std::move(xs), 0.0);
}

void BM_Moran(benchmark::State& state) {
  std::vector<double> ratios(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < ratios.size(); ++i) ratios[i] = 0.05 + 0.9 / static_cast<double>(ratios.size() + i);
  for (auto _ : state) benchmark::DoNotOptimize(gwf::moran_dimension(ratios));
}
BENCHMARK(BM_Moran)->Arg(2)->Arg(16)->Arg(64);

void BM_SampleTree(benchmark::State& state) {
  const auto w = gwf::OffspringDistribution::binomial(4, 0.7);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(gwf::sample_tree(w, static_cast<std::size_t>(state.range(0)), seed++));
}
BENCHMARK(BM_SampleTree)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_Hausdorff(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_cloud(n, 1);
  const auto b = random_cloud(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(gwf::hausdorff_distance(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Hausdorff)->RangeMultiplier(4)->Range(1 << 8, 1 << 16)->Complexity()->Unit(benchmark::kMillisecond);

void BM_AttractorCloud(benchmark::State& state) {
  const auto ifs = square();
  const double rho = std::ldexp(1.0, -static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gwf::attractor_cloud(ifs, rho));
}
BENCHMARK(BM_AttractorCloud)->Arg(6)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_BoxCount(benchmark::State& state) {
  const auto cloud = random_cloud(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(gwf::box_count(cloud, 1.0 / 64));
}
BENCHMARK(BM_BoxCount)->Arg(1 << 12)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
