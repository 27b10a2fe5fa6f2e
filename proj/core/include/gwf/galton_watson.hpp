#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "gwf/trees.hpp"
#include "gwf/types.hpp"

namespace gwf {

struct Atom {
  Subset subset;
  double probability;
};

// Law of a random subset W of the alphabet. Atoms are kept sorted by bitmask,
// which is the order used by inverse-CDF sampling.
class OffspringDistribution {
 public:
  OffspringDistribution(std::size_t alphabet_size, std::vector<Atom> atoms);

  // Mandelbrot percolation: each symbol kept independently with probability p.
  static OffspringDistribution binomial(std::size_t alphabet_size, double p);
  static OffspringDistribution dirac(std::size_t alphabet_size, Subset subset);

  std::size_t alphabet_size() const noexcept { return alphabet_size_; }
  std::span<const Atom> atoms() const noexcept { return atoms_; }
  double probability(Subset subset) const;
  // Atoms with positive probability, ascending bitmask.
  std::vector<Subset> support() const;

  double mean_offspring() const noexcept { return mean_; }
  bool supercritical() const noexcept { return mean_ > 1.0; }

  // f(s) = sum_B P[W = B] s^|B|.
  double generating_function(double s) const;

  // Inverse CDF over the atom order; u in [0, 1).
  Subset draw(double u) const;

 private:
  std::size_t alphabet_size_;
  std::vector<Atom> atoms_;
  std::vector<double> cdf_;
  double mean_;
};

struct ExtinctionReport {
  double q;  // extinction probability
  double p;  // survival probability 1 - q
  std::size_t iterations;
  double residual;  // |f(q) - q|
};

// Smallest fixed point of f on [0, 1] by monotone iteration from 0.
ExtinctionReport extinction_probability(const OffspringDistribution& w);

// q_n = P[T_n is empty]: q_0 = 0, q_{n+1} = f(q_n).
double extinction_by_generation(const OffspringDistribution& w, std::size_t n);

inline constexpr std::size_t kDefaultMaxNodes = 50'000'000;
inline constexpr std::uint64_t kDefaultMaxAttempts = 1'000'000;

// Galton-Watson tree truncated at `horizon`. The child set of node v is
// W.draw(rng::uniform(seed, rng::word_key(v))): bits depend only on (seed, v).
Tree sample_tree(const OffspringDistribution& w, std::size_t horizon, std::uint64_t seed,
                 std::size_t max_nodes = kDefaultMaxNodes);

// True iff the tree sample_tree(w, horizon, seed) has a node at depth
// `horizon`, decided depth-first without materialising the tree.
bool survives_to(const OffspringDistribution& w, std::size_t horizon, std::uint64_t seed);

struct SurvivingSample {
  Tree tree;
  std::uint64_t attempts;
};

// Attempt a uses seed rng::derive(seed, a); the first tree reaching depth
// `horizon` is returned.
SurvivingSample sample_surviving(const OffspringDistribution& w, std::size_t horizon, std::uint64_t seed,
                                 std::uint64_t max_attempts = kDefaultMaxAttempts,
                                 std::size_t max_nodes = kDefaultMaxNodes);

// Offspring law of the reduced tree T' given survival:
//   P[W' = A] = (1/p) sum_{B >= A} P[W = B] p^|A| (1 - p)^|B \ A|,  A != {}.
OffspringDistribution reduced_offspring(const OffspringDistribution& w);

// sum_{A != {}} sum_{B >= A} P[W = B] p^|A| (1 - p)^|B \ A|; equals p when p
// is the survival probability.
double reduced_normalization(const OffspringDistribution& w, double p);

struct KestenStigumStats {
  std::size_t generation;
  std::size_t trials;
  double growth;  // E|W|
  double mean;    // sample mean of |T_k| / growth^k
  double variance;
  double standard_error;
  double survival_fraction;  // fraction with |T_k| > 0
};

// Generation sizes |T_0..T_k| of independent trials; trial t draws from a
// counter stream seeded with rng::derive(seed, t). |T_{n+1}| is obtained from
// |T_n| through multinomial atom counts.
KestenStigumStats kesten_stigum_stats(const OffspringDistribution& w, std::size_t k, std::size_t trials,
                                      std::uint64_t seed);

// |T_0|, ..., |T_horizon| of a materialised tree.
std::vector<std::uint64_t> generation_sizes(const Tree& tree);

struct EmpiricalLaw {
  std::map<Subset, std::size_t> counts;
  std::size_t samples = 0;
  std::uint64_t attempts = 0;

  double frequency(Subset s) const;
};

// Root child set of reduce_to_horizon(sample_surviving(w, horizon, derive(seed, s)).tree, horizon)
// for s = 0..samples-1.
EmpiricalLaw empirical_reduced_law(const OffspringDistribution& w, std::size_t horizon, std::size_t samples,
                                   std::uint64_t seed, std::uint64_t max_attempts = kDefaultMaxAttempts);

double total_variation(const EmpiricalLaw& empirical, const OffspringDistribution& exact);

}  // namespace gwf
