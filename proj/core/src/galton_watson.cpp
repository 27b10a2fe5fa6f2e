#include "gwf/galton_watson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include <boost/random/binomial_distribution.hpp>

#include "gwf/errors.hpp"
#include "gwf/parallel.hpp"
#include "gwf/rng.hpp"

namespace gwf {

OffspringDistribution::OffspringDistribution(std::size_t alphabet_size, std::vector<Atom> atoms)
    : alphabet_size_(alphabet_size), atoms_(std::move(atoms)) {
  if (alphabet_size_ == 0 || alphabet_size_ > kMaxAlphabet) {
    throw Error(ErrorKind::InvalidArgument, "alphabet size must be in 1..64");
  }
  if (atoms_.empty()) throw Error(ErrorKind::InvalidArgument, "offspring distribution needs at least one atom");
  std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.subset < b.subset; });
  const Subset allowed = full_subset(alphabet_size_);
  double total = 0.0;
  mean_ = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& a = atoms_[i];
    if (i > 0 && atoms_[i - 1].subset == a.subset) {
      throw Error(ErrorKind::InvalidArgument, "duplicate atom " + format_subset(a.subset));
    }
    if ((a.subset & ~allowed) != 0) throw Error(ErrorKind::InvalidArgument, "atom " + format_subset(a.subset) + " leaves the alphabet");
    if (!(a.probability >= 0.0) || !(a.probability <= 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "atom probabilities must lie in [0, 1]");
    }
    total += a.probability;
    mean_ += a.probability * subset_size(a.subset);
    cdf_.push_back(total);
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorKind::InvalidArgument, "atom probabilities sum to " + std::to_string(total) + ", not 1");
  }
}

OffspringDistribution OffspringDistribution::binomial(std::size_t alphabet_size, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidArgument, "binomial_p must lie in [0, 1]");
  if (alphabet_size > 20) throw Error(ErrorKind::Resource, "binomial expansion over more than 20 symbols");
  std::vector<Atom> atoms;
  for (Subset s = 0; s <= full_subset(alphabet_size); ++s) {
    int k = subset_size(s);
    double prob = std::pow(p, k) * std::pow(1.0 - p, static_cast<int>(alphabet_size) - k);
    atoms.push_back({s, prob});
  }
  // Drop the rounding residue into the largest atom so the total is 1 to within an ulp.
  double total = 0.0;
  for (const auto& a : atoms) total += a.probability;
  auto largest = std::max_element(atoms.begin(), atoms.end(),
                                  [](const Atom& a, const Atom& b) { return a.probability < b.probability; });
  largest->probability += 1.0 - total;
  return OffspringDistribution(alphabet_size, std::move(atoms));
}

OffspringDistribution OffspringDistribution::dirac(std::size_t alphabet_size, Subset subset) {
  return OffspringDistribution(alphabet_size, {{subset, 1.0}});
}

double OffspringDistribution::probability(Subset subset) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), subset,
                             [](const Atom& a, Subset s) { return a.subset < s; });
  return it != atoms_.end() && it->subset == subset ? it->probability : 0.0;
}

std::vector<Subset> OffspringDistribution::support() const {
  std::vector<Subset> out;
  for (const auto& a : atoms_) {
    if (a.probability > 0.0) out.push_back(a.subset);
  }
  return out;
}

double OffspringDistribution::generating_function(double s) const {
  double f = 0.0;
  for (const auto& a : atoms_) f += a.probability * std::pow(s, subset_size(a.subset));
  return f;
}

Subset OffspringDistribution::draw(double u) const {
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) {
    // u beyond the rounded total: last atom with positive mass.
    for (auto a = atoms_.rbegin(); a != atoms_.rend(); ++a) {
      if (a->probability > 0.0) return a->subset;
    }
  }
  return atoms_[static_cast<std::size_t>(it - cdf_.begin())].subset;
}

ExtinctionReport extinction_probability(const OffspringDistribution& w) {
  double single = 0.0;
  for (const auto& a : w.atoms()) {
    if (subset_size(a.subset) == 1) single += a.probability;
  }
  if (single >= 1.0 - 1e-15) return {0.0, 1.0, 0, 0.0};  // f(s) = s: a single line of descent never dies
  if (!w.supercritical()) return {1.0, 0.0, 0, std::abs(w.generating_function(1.0) - 1.0)};

  constexpr std::size_t kMaxIterations = 100'000'000;
  double q = 0.0;
  std::size_t it = 0;
  for (; it < kMaxIterations; ++it) {
    double next = w.generating_function(q);
    if (next <= q) break;  // monotone from below: stalls exactly at the fixed point in floating point
    q = next;
    if (std::abs(w.generating_function(q) - q) < 1e-15) {
      ++it;
      break;
    }
  }
  return {q, 1.0 - q, it, std::abs(w.generating_function(q) - q)};
}

double extinction_by_generation(const OffspringDistribution& w, std::size_t n) {
  double q = 0.0;
  for (std::size_t k = 0; k < n; ++k) q = w.generating_function(q);
  return q;
}

Tree sample_tree(const OffspringDistribution& w, std::size_t horizon, std::uint64_t seed, std::size_t max_nodes) {
  std::vector<std::vector<Subset>> masks(horizon + 1);
  std::vector<std::uint64_t> keys{rng::kRootKey};
  std::size_t total = 1;
  for (std::size_t n = 0; n < horizon; ++n) {
    std::vector<std::uint64_t> next;
    masks[n].reserve(keys.size());
    for (std::uint64_t key : keys) {
      Subset b = w.draw(rng::uniform(seed, key));
      masks[n].push_back(b);
      for (Symbol s : subset_members(b)) next.push_back(rng::child_key(key, s));
    }
    total += next.size();
    if (total > max_nodes) {
      throw Error(ErrorKind::Resource, "sampled tree exceeds " + std::to_string(max_nodes) + " nodes");
    }
    keys = std::move(next);
  }
  masks[horizon].assign(keys.size(), 0);
  return Tree(w.alphabet_size(), horizon, std::move(masks));
}

namespace {

bool survives_from(const OffspringDistribution& w, std::uint64_t seed, std::uint64_t key, std::size_t remaining) {
  if (remaining == 0) return true;
  Subset b = w.draw(rng::uniform(seed, key));
  for (Symbol s : subset_members(b)) {
    if (survives_from(w, seed, rng::child_key(key, s), remaining - 1)) return true;
  }
  return false;
}

}  // namespace

bool survives_to(const OffspringDistribution& w, std::size_t horizon, std::uint64_t seed) {
  return survives_from(w, seed, rng::kRootKey, horizon);
}

SurvivingSample sample_surviving(const OffspringDistribution& w, std::size_t horizon, std::uint64_t seed,
                                 std::uint64_t max_attempts, std::size_t max_nodes) {
  if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be >= 1");
  for (std::uint64_t a = 0; a < max_attempts; ++a) {
    std::uint64_t s = rng::derive(seed, a);
    if (survives_to(w, horizon, s)) return {sample_tree(w, horizon, s, max_nodes), a + 1};
  }
  throw Error(ErrorKind::Sampling, "no tree survived to depth " + std::to_string(horizon) + " in " +
                                       std::to_string(max_attempts) + " attempts");
}

OffspringDistribution reduced_offspring(const OffspringDistribution& w) {
  const ExtinctionReport ext = extinction_probability(w);
  if (!(ext.p > 0.0)) {
    throw Error(ErrorKind::Domain, "reduced offspring law needs a positive survival probability (E|W| = " +
                                       std::to_string(w.mean_offspring()) + ")");
  }
  const double p = ext.p;
  std::map<Subset, double> law;
  for (const auto& atom : w.atoms()) {
    if (atom.probability <= 0.0) continue;
    const Subset b = atom.subset;
    const int nb = subset_size(b);
    for (Subset a = b; a != 0; a = (a - 1) & b) {
      const int na = subset_size(a);
      law[a] += atom.probability * std::pow(p, na) * std::pow(1.0 - p, nb - na) / p;
    }
  }
  std::vector<Atom> atoms;
  for (const auto& [s, prob] : law) atoms.push_back({s, prob});
  // The sum is p/p up to the residual of q; renormalise that residual away.
  double total = 0.0;
  for (const auto& a : atoms) total += a.probability;
  for (auto& a : atoms) a.probability /= total;
  return OffspringDistribution(w.alphabet_size(), std::move(atoms));
}

double reduced_normalization(const OffspringDistribution& w, double p) {
  double total = 0.0;
  for (const auto& atom : w.atoms()) {
    const Subset b = atom.subset;
    const int nb = subset_size(b);
    for (Subset a = b; a != 0; a = (a - 1) & b) {
      const int na = subset_size(a);
      total += atom.probability * std::pow(p, na) * std::pow(1.0 - p, nb - na);
    }
  }
  return total;
}

KestenStigumStats kesten_stigum_stats(const OffspringDistribution& w, std::size_t k, std::size_t trials,
                                      std::uint64_t seed) {
  if (!w.supercritical()) throw Error(ErrorKind::Domain, "Kesten-Stigum statistics need a supercritical law");
  if (trials == 0) throw Error(ErrorKind::InvalidArgument, "trials must be positive");
  if (static_cast<double>(k) * std::log2(static_cast<double>(w.alphabet_size())) > 62.0) {
    throw Error(ErrorKind::Resource, "generation sizes could overflow 64 bits");
  }
  const auto atoms = w.atoms();
  const double growth = w.mean_offspring();
  const double norm = std::pow(growth, static_cast<double>(k));

  std::vector<std::uint64_t> final_size(trials);
  parallel_for(trials, [&](std::size_t t) {
    rng::CounterEngine engine(rng::derive(seed, t));
    std::uint64_t n = 1;
    for (std::size_t g = 0; g < k && n > 0; ++g) {
      std::uint64_t remaining = n;
      double mass = 1.0;
      std::uint64_t next = 0;
      for (std::size_t j = 0; j < atoms.size() && remaining > 0; ++j) {
        const double pj = atoms[j].probability;
        if (pj <= 0.0) continue;
        std::uint64_t count;
        double cond = mass > 0.0 ? pj / mass : 1.0;
        if (j + 1 == atoms.size() || cond >= 1.0) {
          count = remaining;
        } else {
          boost::random::binomial_distribution<long long, double> dist(static_cast<long long>(remaining), cond);
          count = static_cast<std::uint64_t>(dist(engine));
        }
        next += count * static_cast<std::uint64_t>(subset_size(atoms[j].subset));
        remaining -= count;
        mass -= pj;
      }
      n = next;
    }
    final_size[t] = n;
  });

  double mean = 0.0;
  std::size_t alive = 0;
  for (std::uint64_t n : final_size) {
    mean += static_cast<double>(n) / norm;
    if (n > 0) ++alive;
  }
  mean /= static_cast<double>(trials);
  double var = 0.0;
  for (std::uint64_t n : final_size) {
    double d = static_cast<double>(n) / norm - mean;
    var += d * d;
  }
  var = trials > 1 ? var / static_cast<double>(trials - 1) : 0.0;
  return {k,
          trials,
          growth,
          mean,
          var,
          std::sqrt(var / static_cast<double>(trials)),
          static_cast<double>(alive) / static_cast<double>(trials)};
}

std::vector<std::uint64_t> generation_sizes(const Tree& tree) {
  std::vector<std::uint64_t> out;
  for (std::size_t n = 0; n <= tree.horizon(); ++n) out.push_back(tree.level_size(n));
  return out;
}

double EmpiricalLaw::frequency(Subset s) const {
  auto it = counts.find(s);
  return it == counts.end() || samples == 0 ? 0.0 : static_cast<double>(it->second) / static_cast<double>(samples);
}

EmpiricalLaw empirical_reduced_law(const OffspringDistribution& w, std::size_t horizon, std::size_t samples,
                                   std::uint64_t seed, std::uint64_t max_attempts) {
  if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be >= 1");
  if (extinction_probability(w).p <= 0.0) throw Error(ErrorKind::Domain, "offspring law dies out almost surely");
  std::vector<Subset> root(samples);
  std::vector<std::uint64_t> attempts(samples);
  parallel_for(samples, [&](std::size_t s) {
    const std::uint64_t sample_seed = rng::derive(seed, s);
    for (std::uint64_t a = 0; a < max_attempts; ++a) {
      const std::uint64_t tree_seed = rng::derive(sample_seed, a);
      // Same bits as materialising the tree, reducing it and reading the root.
      const Subset b = w.draw(rng::uniform(tree_seed, rng::kRootKey));
      Subset kept = 0;
      for (Symbol c : subset_members(b)) {
        if (survives_from(w, tree_seed, rng::child_key(rng::kRootKey, c), horizon - 1)) kept |= Subset{1} << c;
      }
      if (kept != 0) {
        root[s] = kept;
        attempts[s] = a + 1;
        return;
      }
    }
    throw Error(ErrorKind::Sampling, "no surviving tree within the attempt budget");
  });
  EmpiricalLaw law;
  law.samples = samples;
  for (std::size_t s = 0; s < samples; ++s) {
    ++law.counts[root[s]];
    law.attempts += attempts[s];
  }
  return law;
}

double total_variation(const EmpiricalLaw& empirical, const OffspringDistribution& exact) {
  std::set<Subset> keys;
  for (const auto& [s, c] : empirical.counts) keys.insert(s);
  for (const auto& a : exact.atoms()) keys.insert(a.subset);
  double tv = 0.0;
  for (Subset s : keys) tv += std::abs(empirical.frequency(s) - exact.probability(s));
  return 0.5 * tv;
}

}  // namespace gwf
