// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "fixtures.hpp"
#include "gwf/dimension.hpp"
#include "gwf/errors.hpp"
#include "gwf/estimators.hpp"
#include "gwf/galton_watson.hpp"
#include "gwf/geometry.hpp"
#include "gwf/rng.hpp"
#include "gwf/section.hpp"
#include "gwf/separation.hpp"
#include "gwf/trees.hpp"
#include "harness.hpp"

using namespace gwf;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const double kCantorDim = std::log(2.0) / std::log(3.0);

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Random law over k symbols with E|W| > 1.
OffspringDistribution random_supercritical(std::size_t k, std::uint64_t seed) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    std::vector<Atom> atoms;
    double total = 0;
    for (Subset s = 0; s <= full_subset(k); ++s) {
      const double u = rng::to_unit(rng::derive(rng::derive(seed, attempt), s));
      if (u < 0.5) continue;
      atoms.push_back({s, u});
      total += u;
    }
    if (atoms.empty()) continue;
    for (auto& a : atoms) a.probability /= total;
    double rest = 1.0;
    for (std::size_t i = 0; i + 1 < atoms.size(); ++i) rest -= atoms[i].probability;
    atoms.back().probability = rest;
    OffspringDistribution w(k, atoms);
    if (w.mean_offspring() > 1.0 + 1e-6) return w;
  }
}

// Any valid law over k symbols (possibly subcritical).
OffspringDistribution random_law(std::size_t k, std::uint64_t seed) {
  std::vector<Atom> atoms;
  double total = 0;
  for (Subset s = 0; s <= full_subset(k); ++s) {
    const double u = rng::to_unit(rng::derive(seed, s));
    if (u < 0.4) continue;
    atoms.push_back({s, u});
    total += u;
  }
  if (atoms.empty()) return OffspringDistribution::dirac(k, full_subset(k));
  for (auto& a : atoms) a.probability /= total;
  double rest = 1.0;
  for (std::size_t i = 0; i + 1 < atoms.size(); ++i) rest -= atoms[i].probability;
  atoms.back().probability = rest;
  return OffspringDistribution(k, atoms);
}

Ifs random_line_ifs(std::size_t k, std::uint64_t seed) {
  std::vector<SimilarityMap> maps;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = 0.1 + 0.5 * rng::to_unit(rng::derive(seed, 2 * i));
    maps.push_back(fx::line_map(r, rng::to_unit(rng::derive(seed, 2 * i + 1))));
  }
  return Ifs(std::move(maps));
}

PointCloud random_cloud(int dim, std::size_t n, std::uint64_t seed) {
  std::vector<double> c(n * static_cast<std::size_t>(dim));
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = std::floor(rng::to_unit(rng::derive(seed, k)) * 64) / 64;
  return PointCloud(dim, std::move(c), 0.0);
}

Outcome moran() {
  const std::vector<double> cantor{1.0 / 3, 1.0 / 3}, mixed{0.5, 0.25};
  auto t0 = Clock::now();
  const double a = moran_dimension(cantor);
  const double ta = seconds_since(t0);
  t0 = Clock::now();
  const double b = moran_dimension(mixed);
  const double tb = seconds_since(t0);
  const double ea = std::abs(a - kCantorDim);
  const double eb = std::abs(b + std::log2((std::sqrt(5.0) - 1) / 2));
  return {ea < 1e-10 && eb < 1e-10 && ta < 1e-3 && tb < 1e-3,
          fmt("errors %.2e %.2e, times %.1f us %.1f us", ea, eb, ta * 1e6, tb * 1e6)};
}

Outcome gwf_dim() {
  const double p = gwf_dimension(fx::square(), OffspringDistribution::binomial(4, 0.7));
  const double c = gwf_dimension(fx::cantor(), fx::cantor_mixed());
  const double ep = std::abs(p - std::log2(2.8));
  const double ec = std::abs(c - std::log(1.5) / std::log(3.0));
  return {ep < 1e-10 && ec < 1e-10, fmt("percolation error %.2e, Cantor mixed error %.2e", ep, ec)};
}

Outcome endpoints() {
  const auto ex = offspring_extremes(fx::square(), OffspringDistribution::binomial(4, 0.7));
  const bool exact = ex.min == 0.0 && ex.max == 2.0;
  std::size_t violations = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const std::size_t k = 2 + s % 3;
    const Ifs ifs = random_line_ifs(k, s + 77000);
    const auto w = random_supercritical(k, s + 99000);
    const double d = gwf_dimension(ifs, w);
    const auto e = offspring_extremes(ifs, w);
    if (d < e.min || d > e.max) ++violations;
  }
  return {exact && violations == 0, fmt("(m_W, M_W) = (%.17g, %.17g), sandwich violations %zu / 1000", ex.min, ex.max, violations)};
}

Outcome reduced_law() {
  const auto t0 = Clock::now();
  const auto w = fx::quadratic();
  const auto r = reduced_offspring(w);
  const double atom_err = std::max({std::abs(r.probability(0b01) - 0.25), std::abs(r.probability(0b10) - 0.25),
                                    std::abs(r.probability(0b11) - 0.5)});
  double norm_err = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto law = random_law(2 + s % 3, s + 31000);
    const double p = extinction_probability(law).p;
    // Direct double sum, independent of the library routine.
    double total = 0;
    for (Subset a = 1; a <= full_subset(law.alphabet_size()); ++a) {
      for (const Atom& b : law.atoms()) {
        if ((a & ~b.subset) != 0) continue;
        total += b.probability * std::pow(p, subset_size(a)) * std::pow(1 - p, subset_size(b.subset & ~a));
      }
    }
    norm_err = std::max(norm_err, std::abs(total - p));
  }
  const auto emp = empirical_reduced_law(w, 20, 100000, 4242);
  const double tv = total_variation(emp, r);
  const double t = seconds_since(t0);
  return {atom_err < 1e-12 && norm_err < 1e-12 && tv < 0.02 && t < 60,
          fmt("atom error %.2e, normalization error %.2e, TV %.4f, %.1f s", atom_err, norm_err, tv, t)};
}

Outcome kesten_stigum() {
  const auto t0 = Clock::now();
  const auto config = lab::load_config(fs::path(GWF_CONFIG_DIR) / "percolation.json");
  const auto& w = config.offspring;
  const auto ks = kesten_stigum_stats(w, 14, 10000, rng::derive(config.seed, lab::kKestenStigum));
  const double surv = 1.0 - extinction_by_generation(w, 14);
  const double surv_se = std::sqrt(surv * (1 - surv) / 10000);
  const double t = seconds_since(t0);
  const bool mean_ok = std::abs(ks.mean - 1.0) <= 3 * ks.standard_error;
  const bool surv_ok = std::abs(ks.survival_fraction - surv) <= 3 * surv_se;
  return {mean_ok && surv_ok && t < 120,
          fmt("mean %.5f (SE %.5f), survival %.4f vs %.4f (SE %.4f), %.1f s", ks.mean, ks.standard_error,
              ks.survival_fraction, surv, surv_se, t)};
}

Outcome section_bounds() {
  const auto t0 = Clock::now();
  const Ifs ifs({fx::line_map(0.5, 0.0), fx::line_map(0.3, 0.55), fx::line_map(0.15, 0.85)});
  const OffspringDistribution w(3, {{0b011, 0.4}, {0b101, 0.3}, {0b111, 0.3}});
  const Family family(w.support());
  const std::vector<double> rhos{0.15, 0.05, 0.02, 0.01};
  std::size_t violations = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) violations += section_count_check(sample_tree(w, 8, rng::derive(606, s)), ifs, family, rhos).size();
  const Tree ray = Tree::ray(3, Word(8, 0));
  const auto flagged = section_count_check(ray, ifs, family, rhos, FamilyValidation::Skip);
  const double t = seconds_since(t0);
  return {violations == 0 && !flagged.empty() && t < 60,
          fmt("violations %zu over 1000 x 4, counterexample flagged at %zu scales, %.1f s", violations, flagged.size(), t)};
}

Outcome next_generation() {
  const Ifs ifs = fx::mixed();
  const Tree full = Tree::full(2, 8);
  const auto ratios = ifs.ratios();
  std::size_t checked = 0, mismatches = 0;
  for (double rho : {0.25, 0.2}) {
    for (std::size_t n = 1;; ++n) {
      std::vector<TreeSectionEntry> next;
      try {
        next = tree_section(full, ifs, rho, n + 1);
      } catch (const Error&) {
        break;
      }
      std::size_t covered = 0;
      for (const auto& i : tree_section(full, ifs, rho, n)) {
        std::set<Word> tails, expect;
        for (const auto& e : next) {
          if (e.word.size() >= i.word.size() && std::equal(i.word.begin(), i.word.end(), e.word.begin()))
            tails.insert(Word(e.word.begin() + static_cast<std::ptrdiff_t>(i.word.size()), e.word.end()));
        }
        for (const auto& s : section_entries(ratios, rho / i.a_value)) expect.insert(s.word);
        if (tails != expect) ++mismatches;
        if (std::abs(i.a_value - compose_word(ifs, i.word).ratio() / std::pow(rho, double(n))) > 1e-12) ++mismatches;
        covered += tails.size();
        ++checked;
      }
      if (covered != next.size()) ++mismatches;
    }
  }
  return {checked > 0 && mismatches == 0, fmt("%zu section nodes checked, %zu mismatches", checked, mismatches)};
}

Outcome estimators() {
  const auto t0 = Clock::now();
  const PointCloud cantor = attractor_cloud(fx::cantor(), std::pow(3.0, -10));
  std::vector<double> triadic;
  for (int k = 1; k <= 8; ++k) triadic.push_back(std::pow(3.0, -k));
  const double box = box_dim_estimate(cantor, triadic).slope;
  const auto cpairs = geometric_scale_pairs(1.0 / 3, 1.0, std::pow(3.0, -8));
  const auto ccenters = sample_centers(cantor, 1024, 1);
  const double c_hi = assouad_estimate(cantor, cpairs, ccenters).value;
  const double c_lo = lower_estimate(cantor, cpairs, ccenters).value;

  // The reference percolation run: sample 0 of simulate on percolation.json.
  const auto config = lab::load_config(fs::path(GWF_CONFIG_DIR) / "percolation.json");
  const PointCloud perc = lab::reference_cloud(config);
  const auto report = lab::estimator_report(perc, config);
  const double p_hi = report.at("assouad").get<double>();
  const double p_lo = report.at("lower").get<double>();
  const double t = seconds_since(t0);
  const bool ok = std::abs(box - kCantorDim) < 0.05 && std::abs(c_hi - kCantorDim) < 0.1 &&
                  std::abs(c_lo - kCantorDim) < 0.1 && p_hi >= 1.75 && p_lo <= 0.25 && t < 120;
  return {ok, fmt("Cantor box %.4f assouad %.4f lower %.4f; percolation assouad %.4f (>= 1.75) lower %.4f (<= 0.25); %.1f s",
                  box, c_hi, c_lo, p_hi, p_lo, t)};
}

Outcome round_trip() {
  const Ifs c = fx::cantor();
  const Family family = Family::all_nonempty(2);
  const auto iv = family_interval(c, family);
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const double a = iv.min + (iv.max - iv.min) * i / 49.0;
    const auto w = offspring_for_target(c, family, a);
    worst = std::max(worst, std::abs(gwf_dimension(c, w.law) - a));
  }
  return {worst < 1e-9, fmt("interval [%.6f, %.6f], worst error %.2e over 50 targets", iv.min, iv.max, worst)};
}

Outcome zoom_identity() {
  const Ifs c = fx::cantor();
  const auto verdict = check_ssc(c, 6);
  if (verdict.kind != SeparationKind::CertifiedSeparated) return {false, "SSC not certified"};
  const auto w = fx::quadratic();
  const std::size_t horizon = 14;
  const double rho = std::pow(3.0, -double(horizon));
  std::size_t nodes = 0, passed = 0, corrupted = 0, corrupted_failed = 0;
  double worst_ratio = 0;
  for (std::uint64_t s = 0; nodes < 100; ++s) {
    const auto sample = sample_surviving(w, horizon, rng::derive(1010, s));
    const Tree reduced = *reduce_to_horizon(sample.tree, horizon);
    std::vector<Word> eligible;
    for (const Word& v : reduced.words())
      if (!v.empty() && v.size() <= horizon - 4) eligible.push_back(v);
    const Word v = eligible[rng::derive(2020, s) % eligible.size()];
    const auto r = check_zoom_identity_ssc(sample.tree, c, v, rho, verdict);
    ++nodes;
    if (r.status == ZoomStatus::Pass) {
      ++passed;
      worst_ratio = std::max(worst_ratio, r.d_h / r.tolerance);
    }
    // Sibling with a different reduced child set.
    Word u = v;
    u.back() = 1 - u.back();
    if (reduced.contains(u) && reduced.child_set(u) != reduced.child_set(v)) {
      ++corrupted;
      const auto bad = check_zoom_identity_ssc(sample.tree, c, v, rho, verdict, u);
      if (bad.status == ZoomStatus::Fail) ++corrupted_failed;
    }
  }
  return {passed == nodes && corrupted > 0 && corrupted_failed == corrupted,
          fmt("%zu / %zu nodes pass (max d_H / tolerance %.3g), %zu / %zu corrupted comparisons fail", passed, nodes,
              worst_ratio, corrupted_failed, corrupted)};
}

Outcome hausdorff() {
  std::size_t mismatches = 0, axiom = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const int dim = 1 + static_cast<int>(s % 3);
    const PointCloud x = random_cloud(dim, 1 + s % 53, 3 * s + 1);
    const PointCloud y = random_cloud(dim, 1 + (s * 7) % 47, 3 * s + 2);
    const PointCloud z = random_cloud(dim, 1 + (s * 11) % 29, 3 * s + 3);
    const double xy = hausdorff_distance(x, y);
    if (xy != fx::brute_hausdorff(x, y)) ++mismatches;
    if (xy != hausdorff_distance(y, x)) ++axiom;
    if (hausdorff_distance(x, x) != 0.0) ++axiom;
    if (hausdorff_distance(x, z) > xy + hausdorff_distance(y, z) + 1e-12) ++axiom;
    if ((xy == 0.0) != (x.canonical().coords() == y.canonical().coords())) ++axiom;
  }
  return {mismatches == 0 && axiom == 0, fmt("%zu brute-force mismatches, %zu axiom failures over 1000 triples", mismatches, axiom)};
}

int run(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path out = fs::temp_directory_path() / "gwf_acceptance_determinism";
  fs::remove_all(out);
  const std::string cfg = std::string("\"") + GWF_CONFIG_DIR + "/percolation.json\"";
  const int a = run("GWF_LAB_THREADS=1 \"" GWF_LAB_PATH "\" simulate " + cfg + " --out \"" + (out / "t1").string() + "\" >/dev/null");
  const int b = run("GWF_LAB_THREADS=4 \"" GWF_LAB_PATH "\" simulate " + cfg + " --out \"" + (out / "t4").string() + "\" >/dev/null");
  const std::string s1 = slurp(out / "t1" / "summary.json");
  const std::string s4 = slurp(out / "t4" / "summary.json");
  return {a == 0 && b == 0 && !s1.empty() && s1 == s4,
          fmt("exit codes %d %d, summary sizes %zu %zu, identical: %s", a, b, s1.size(), s4.size(), s1 == s4 ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"Moran solver", moran},
      {"GWF dimension", gwf_dim},
      {"dimension endpoints and sandwich", endpoints},
      {"reduced offspring law", reduced_law},
      {"Kesten-Stigum", kesten_stigum},
      {"section count bounds", section_bounds},
      {"next-generation section identity", next_generation},
      {"estimator sanity", estimators},
      {"target dimension round trip", round_trip},
      {"SSC zoom identity", zoom_identity},
      {"Hausdorff metric", hausdorff},
      {"determinism across thread counts", determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("criterion %2zu %s: %s  (%s)\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
