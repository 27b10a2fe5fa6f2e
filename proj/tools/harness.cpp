#include "harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gwf/dimension.hpp"
#include "gwf/errors.hpp"
#include "gwf/geometry.hpp"
#include "gwf/io.hpp"
#include "gwf/parallel.hpp"
#include "gwf/rng.hpp"
#include "gwf/separation.hpp"
#include "gwf/trees.hpp"

namespace gwf::lab {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::Config, "config." + field + ": " + what);
}

std::size_t count_field(const json& obj, const char* key, std::size_t fallback, const std::string& prefix = "") {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0)) {
    bad(prefix + key, "expected a non-negative integer");
  }
  return it->get<std::size_t>();
}

double real_field(const json& obj, const char* key, double fallback, const std::string& prefix = "") {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) bad(prefix + key, "expected a number");
  return it->get<double>();
}

std::vector<double> real_list(const json& v, const std::string& field) {
  if (!v.is_array()) bad(field, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) bad(field, "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

json subset_json(Subset s) {
  json a = json::array();
  for (Symbol i : subset_members(s)) a.push_back(i);
  return a;
}

json subsets_json(const std::vector<Subset>& v) {
  json a = json::array();
  for (Subset s : v) a.push_back(subset_json(s));
  return a;
}

json law_json(const OffspringDistribution& w) {
  json a = json::array();
  for (const auto& atom : w.atoms()) {
    if (atom.probability > 0.0) a.push_back({{"subset", subset_json(atom.subset)}, {"prob", atom.probability}});
  }
  return a;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Error(ErrorKind::Resource, "cannot write " + path.string());
}

void prepare_output(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Resource, "cannot create " + dir.string() + ": " + ec.message());
}

std::vector<double> default_rhos(const Ifs& ifs, std::size_t horizon) {
  std::vector<double> out;
  for (std::size_t k = 1; k <= 4; ++k) {
    std::size_t n = std::max<std::size_t>(1, horizon * k / 4);
    double rho = std::pow(ifs.r_max(), static_cast<double>(n));
    if (rho < ifs.r_min() && (out.empty() || rho < out.back())) out.push_back(rho);
  }
  if (out.empty()) throw Error(ErrorKind::Config, "config.horizon: too small for any section scale below r_min");
  return out;
}

double scale_base(const ExperimentConfig& c) {
  if (c.estimators.scale_base) return *c.estimators.scale_base;
  return c.ifs.r_max() - c.ifs.r_min() <= 1e-12 * c.ifs.r_max() ? c.ifs.r_max() : 0.5;
}

Family offspring_family(const OffspringDistribution& w) { return Family(w.support()).down_closure(); }

std::string word_text(const Word& w, std::size_t k) { return w.empty() ? "" : format_word(w, k); }

struct EstimatorRun {
  json report;
  std::string box_csv;
  std::string window_csv;
};

EstimatorRun run_estimators(const PointCloud& cloud, const ExperimentConfig& c) {
  EstimatorRun run;
  const double base = scale_base(c);
  const Box b = cloud.bounds();
  const double diam = (b.hi - b.lo).norm();
  const double floor_r = c.estimators.guard * cloud.epsilon();
  json& r = run.report;
  r["points"] = cloud.size();
  r["epsilon"] = cloud.epsilon();
  r["scale_base"] = base;
  r["guard"] = c.estimators.guard;
  r["window"] = c.estimators.shape == WindowShape::GridCell ? "grid" : "ball";

  std::vector<double> radii;
  if (diam > 0.0 && floor_r <= diam) {
    for (double x = 1.0; x >= floor_r; x *= base) {
      if (x <= diam) radii.push_back(x);
    }
  }
  run.box_csv = "r,count\n";
  if (radii.size() >= 2) {
    auto est = box_dim_estimate(cloud, radii, c.estimators.guard);
    r["box_dim"] = est.slope;
    for (const auto& row : est.table) {
      std::ostringstream line;
      line.precision(17);
      line << row.r << ',' << row.count << '\n';
      run.box_csv += line.str();
    }
  } else {
    r["box_dim"] = nullptr;
  }

  run.window_csv = "center";
  for (int t = 0; t < cloud.dim(); ++t) run.window_csv += ",x" + std::to_string(t);
  run.window_csv += ",R,r,count,exponent\n";
  auto pairs = diam > 0.0 && floor_r < diam ? geometric_scale_pairs(base, diam, floor_r) : std::vector<ScalePair>{};
  auto centers = sample_centers(cloud, c.estimators.centers, rng::derive(c.seed, kEstimators));
  try {
    auto hi = assouad_estimate(cloud, pairs, centers, c.estimators.shape, c.estimators.guard);
    auto lo = lower_estimate(cloud, pairs, centers, c.estimators.shape, c.estimators.guard);
    r["assouad"] = hi.value;
    r["lower"] = lo.value;
    r["admissible_pairs"] = hi.admissible_pairs;
    r["windows"] = hi.windows.size();
    for (const auto& w : hi.windows) {
      std::ostringstream line;
      line.precision(17);
      line << w.center;
      for (double x : cloud.point(w.center)) line << ',' << x;
      line << ',' << w.R << ',' << w.r << ',' << w.count << ',' << w.exponent << '\n';
      run.window_csv += line.str();
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Resolution) throw;
    r["assouad"] = nullptr;
    r["lower"] = nullptr;
    r["admissible_pairs"] = 0;
    r["windows"] = 0;
  }
  return run;
}

json check_entry(const std::string& name, bool pass, json detail = json::object()) {
  detail["name"] = name;
  detail["pass"] = pass;
  return detail;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string("config: ") + e.what());
  }
  if (!root.is_object()) bad("", "expected an object");
  auto ifs_it = root.find("ifs");
  if (ifs_it == root.end()) bad("ifs", "missing");
  Ifs ifs = [&] {
    try {
      return parse_ifs_json(ifs_it->dump());
    } catch (const Error& e) {
      bad("ifs", e.what());
    }
  }();
  OffspringDistribution w = OffspringDistribution::dirac(ifs.size(), full_subset(ifs.size()));
  if (auto it = root.find("offspring"); it != root.end()) {
    try {
      w = parse_offspring_json(it->dump(), ifs.size());
    } catch (const Error& e) {
      bad("offspring", e.what());
    }
  }
  ExperimentConfig c{.ifs = std::move(ifs), .offspring = std::move(w)};

  if (auto it = root.find("seed"); it != root.end()) {
    if (!it->is_number_unsigned()) bad("seed", "expected an unsigned 64-bit integer");
    c.seed = it->get<std::uint64_t>();
  }
  c.horizon = count_field(root, "horizon", c.horizon);
  if (c.horizon < 1) bad("horizon", "must be >= 1");
  c.trials = count_field(root, "trials", c.trials);
  c.ks_generation = count_field(root, "ks_generation", c.ks_generation);
  c.tree_samples = count_field(root, "tree_samples", c.tree_samples);
  c.max_attempts = count_field(root, "max_attempts", c.max_attempts);
  if (auto it = root.find("output"); it != root.end()) {
    if (!it->is_string()) bad("output", "expected a path string");
    c.output = it->get<std::string>();
  }
  if (auto it = root.find("rho"); it != root.end()) {
    c.rho = real_list(*it, "rho");
    for (double r : c.rho) {
      if (!(r > 0.0 && r <= c.ifs.r_min())) bad("rho", "every scale must lie in (0, r_min]");
    }
  } else {
    c.rho = default_rhos(c.ifs, c.horizon);
  }
  if (c.rho.empty()) bad("rho", "needs at least one scale");

  if (auto it = root.find("estimators"); it != root.end()) {
    const std::string p = "estimators.";
    if (auto b = it->find("scale_base"); b != it->end()) {
      double v = real_field(*it, "scale_base", 0.5, p);
      if (!(v > 0.0 && v < 1.0)) bad(p + "scale_base", "must lie in (0, 1)");
      c.estimators.scale_base = v;
    }
    c.estimators.centers = count_field(*it, "centers", c.estimators.centers, p);
    c.estimators.guard = real_field(*it, "guard", c.estimators.guard, p);
    if (!(c.estimators.guard > 0.0)) bad(p + "guard", "must be positive");
    if (auto s = it->find("window"); s != it->end()) {
      if (*s == "grid") {
        c.estimators.shape = WindowShape::GridCell;
      } else if (*s == "ball") {
        c.estimators.shape = WindowShape::Ball;
      } else {
        bad(p + "window", "expected \"grid\" or \"ball\"");
      }
    }
  }
  if (auto it = root.find("check"); it != root.end()) {
    const std::string p = "check.";
    c.check.ssc_depth = static_cast<int>(count_field(*it, "ssc_depth", static_cast<std::size_t>(c.check.ssc_depth), p));
    if (c.check.ssc_depth < 1) bad(p + "ssc_depth", "must be >= 1");
    if (auto r = it->find("wsc_rhos"); r != it->end()) c.check.wsc_rhos = real_list(*r, p + "wsc_rhos");
    c.check.wsc_balls = count_field(*it, "wsc_balls", c.check.wsc_balls, p);
    c.check.zoom_nodes = count_field(*it, "zoom_nodes", c.check.zoom_nodes, p);
    c.check.zoom_horizon = count_field(*it, "zoom_horizon", c.check.zoom_horizon, p);
    c.check.zoom_margin = count_field(*it, "zoom_margin", c.check.zoom_margin, p);
  }
  if (c.check.wsc_rhos.empty()) {
    for (int k = 2; k <= 4; ++k) c.check.wsc_rhos.push_back(std::pow(c.ifs.r_min(), k));
  }
  if (auto it = root.find("zoom"); it != root.end()) {
    const std::string p = "zoom.";
    if (auto s = it->find("path"); s != it->end()) {
      if (!s->is_string()) bad(p + "path", "expected a word string");
      c.zoom.path = s->get<std::string>();
      try {
        (void)parse_word(c.zoom.path, c.ifs.size());
      } catch (const Error& e) {
        bad(p + "path", e.what());
      }
    }
    c.zoom.depth = count_field(*it, "depth", c.zoom.depth, p);
    c.zoom.tail_factor = real_field(*it, "tail_factor", c.zoom.tail_factor, p);
    c.zoom.tail_length = count_field(*it, "tail_length", c.zoom.tail_length, p);
  }
  if (auto it = root.find("render"); it != root.end()) {
    c.render.width = count_field(*it, "width", c.render.width, "render.");
    c.render.height = count_field(*it, "height", c.render.height, "render.");
    if (c.render.width == 0 || c.render.height == 0) bad("render", "raster must be non-empty");
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Config, "cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

json cmd_dims(const ExperimentConfig& c) {
  const DimensionReport d = dimension_report(c.ifs, c.offspring);
  const OffspringDistribution reduced = reduced_offspring(c.offspring);
  json out;
  out["schema_version"] = kSchemaVersion;
  out["command"] = "dims";
  out["delta"] = d.delta;
  out["delta_residual"] = d.delta_residual;
  out["m_W"] = d.m_w;
  out["M_W"] = d.M_w;
  out["argmin_sets"] = subsets_json(d.argmin);
  out["argmax_sets"] = subsets_json(d.argmax);
  out["mean_offspring"] = c.offspring.mean_offspring();
  out["extinction_q"] = d.q;
  out["survival_p"] = d.p;
  out["reduced_law"] = law_json(reduced);
  out["similarity_dimension"] = moran_dimension(c.ifs.ratios());
  return out;
}

json cmd_simulate(const ExperimentConfig& c) {
  const DimensionReport d = dimension_report(c.ifs, c.offspring);
  const ExtinctionReport ext = extinction_probability(c.offspring);
  const OffspringDistribution reduced = reduced_offspring(c.offspring);
  const Family family = offspring_family(c.offspring);
  json checks = json::array();

  json out;
  out["schema_version"] = kSchemaVersion;
  out["command"] = "simulate";
  out["seed"] = c.seed;
  out["horizon"] = c.horizon;
  out["rho"] = c.rho;
  out["dims"] = {{"delta", d.delta}, {"m_W", d.m_w}, {"M_W", d.M_w}, {"argmin_sets", subsets_json(d.argmin)},
                 {"argmax_sets", subsets_json(d.argmax)}};
  checks.push_back(check_entry("dimension_sandwich", d.m_w <= d.delta + 1e-12 && d.delta <= d.M_w + 1e-12));

  out["extinction"] = {{"q", ext.q}, {"p", ext.p}, {"iterations", ext.iterations}, {"residual", ext.residual},
                       {"q_horizon", extinction_by_generation(c.offspring, c.horizon)}};
  const double norm = reduced_normalization(c.offspring, ext.p);
  out["reduced_law"] = law_json(reduced);
  out["reduced_normalization"] = norm;
  checks.push_back(check_entry("reduced_normalization", std::abs(norm - ext.p) <= 1e-12,
                               {{"value", norm}, {"p", ext.p}}));

  // Kesten-Stigum martingale at generation k.
  const auto ks = kesten_stigum_stats(c.offspring, c.ks_generation, c.trials, rng::derive(c.seed, kKestenStigum));
  const double q_k = extinction_by_generation(c.offspring, c.ks_generation);
  const double surv_se = std::sqrt((1.0 - q_k) * q_k / static_cast<double>(std::max<std::size_t>(c.trials, 1)));
  out["kesten_stigum"] = {{"generation", ks.generation}, {"trials", ks.trials},       {"growth", ks.growth},
                          {"mean", ks.mean},             {"variance", ks.variance},   {"standard_error", ks.standard_error},
                          {"survival_fraction", ks.survival_fraction},                {"survival_expected", 1.0 - q_k},
                          {"survival_standard_error", surv_se}};
  checks.push_back(check_entry("kesten_stigum_mean", std::abs(ks.mean - 1.0) <= 3.0 * ks.standard_error));
  checks.push_back(check_entry("kesten_stigum_survival",
                               std::abs(ks.survival_fraction - (1.0 - q_k)) <= std::max(3.0 * surv_se, 1e-12)));

  // Surviving samples: section counts against the exact bounds.
  const std::uint64_t tree_seed = rng::derive(c.seed, kTrees);
  struct SampleResult {
    std::optional<Tree> reduced;
    std::uint64_t attempts = 0;
    std::vector<std::size_t> counts;
    std::size_t violations = 0;
    bool family_ok = false;
  };
  std::vector<SampleResult> samples(c.tree_samples);
  parallel_for(c.tree_samples, [&](std::size_t s) {
    auto sample = sample_surviving(c.offspring, c.horizon, rng::derive(tree_seed, s), c.max_attempts);
    auto& res = samples[s];
    res.attempts = sample.attempts;
    res.reduced = reduce_to_horizon(sample.tree, c.horizon);
    res.family_ok = is_family_tree(*res.reduced, family);
    for (double rho : c.rho) res.counts.push_back(tree_section_at(*res.reduced, c.ifs, rho).size());
    res.violations = section_count_check(*res.reduced, c.ifs, family, c.rho, FamilyValidation::Skip).size();
  });
  const DimensionExtremes fam = family_interval(c.ifs, family);
  std::string counts_csv = "sample,rho,count,lower,upper\n";
  std::size_t violations = 0;
  std::size_t family_failures = 0;
  std::uint64_t attempts = 0;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    violations += samples[s].violations;
    family_failures += samples[s].family_ok ? 0 : 1;
    attempts += samples[s].attempts;
    for (std::size_t k = 0; k < c.rho.size(); ++k) {
      std::ostringstream line;
      line.precision(17);
      line << s << ',' << c.rho[k] << ',' << samples[s].counts[k] << ',' << std::pow(c.rho[k], -fam.min) << ','
           << std::pow(c.rho[k], -fam.max) * std::pow(c.ifs.r_min(), -fam.max) << '\n';
      counts_csv += line.str();
    }
  }
  out["section_counts"] = {{"samples", c.tree_samples}, {"scales", c.rho.size()}, {"violations", violations},
                           {"family_m", fam.min}, {"family_M", fam.max}, {"attempts", attempts}};
  checks.push_back(check_entry("family_trees", family_failures == 0));
  checks.push_back(check_entry("section_count_bounds", violations == 0, {{"violations", violations}}));

  prepare_output(c.output);
  write_file(c.output / "section_counts.csv", counts_csv);

  if (!samples.empty()) {
    const Tree& t0 = *samples.front().reduced;
    const PointCloud cloud = project_tree(t0, c.ifs, *std::min_element(c.rho.begin(), c.rho.end()));
    write_file(c.output / "tree_0.txt", t0.serialize());
    write_file(c.output / "cloud_0.csv", cloud_to_csv(cloud));
    auto est = run_estimators(cloud, c);
    write_file(c.output / "box_counts.csv", est.box_csv);
    write_file(c.output / "windows.csv", est.window_csv);
    const json& e = est.report;
    if (e["box_dim"].is_number() && e["assouad"].is_number()) {
      const double lo = e["lower"].get<double>();
      const double box = e["box_dim"].get<double>();
      const double hi = e["assouad"].get<double>();
      checks.push_back(check_entry("estimator_ordering", lo <= box + 1e-9 && box <= hi + 1e-9));
    }
    out["estimators"] = std::move(est.report);
  }

  bool all = true;
  for (const auto& ch : checks) all = all && ch["pass"].get<bool>();
  out["checks"] = checks;
  out["all_pass"] = all;
  write_file(c.output / "summary.json", out.dump(2) + "\n");
  return out;
}

json cmd_check(const ExperimentConfig& c) {
  json out;
  out["schema_version"] = kSchemaVersion;
  out["command"] = "check";

  const SeparationVerdict ssc = check_ssc(c.ifs, c.check.ssc_depth);
  json js = {{"verdict", std::string(to_string(ssc.kind))},
             {"cloud_gap", ssc.cloud_gap},
             {"approximation_error", ssc.approximation_error},
             {"gap_lower_bound", ssc.gap_lower_bound},
             {"depth", ssc.depth},
             {"depth_limit", ssc.depth_limit},
             {"detail", ssc.detail}};
  if (ssc.kind == SeparationKind::CertifiedSeparated) js["tau"] = ssc_tau(c.ifs, ssc);
  out["ssc"] = js;

  if (c.ifs.osc_box()) {
    const OscReport osc = check_declared_osc(c.ifs, *c.ifs.osc_box());
    json pairs = json::array();
    for (const auto& p : osc.pairs) pairs.push_back({{"i", p.i}, {"j", p.j}, {"disjoint", p.disjoint}});
    out["osc"] = {{"declared", true}, {"pass", osc.pass}, {"heuristic", osc.heuristic},
                  {"contained", osc.contained}, {"pairs", pairs}};
  } else {
    out["osc"] = {{"declared", false}};
  }

  json wsc = json::array();
  for (const auto& e : wsc_profile(c.ifs, c.check.wsc_rhos, c.check.wsc_balls, rng::derive(c.seed, kWsc))) {
    wsc.push_back({{"rho", e.rho}, {"section_size", e.section_size}, {"distinct_maps", e.distinct_maps},
                   {"max_count", e.max_count}});
  }
  out["wsc"] = wsc;

  json zoom = {{"performed", false}};
  if (ssc.kind == SeparationKind::CertifiedSeparated && c.check.zoom_nodes > 0 &&
      c.check.zoom_horizon > c.check.zoom_margin) {
    const std::uint64_t zseed = rng::derive(c.seed, kZoom);
    const auto sample = sample_surviving(c.offspring, c.check.zoom_horizon, zseed, c.max_attempts);
    const Tree tree = *reduce_to_horizon(sample.tree, c.check.zoom_horizon);
    const double rho = std::pow(c.ifs.r_max(), static_cast<double>(c.check.zoom_horizon));

    // Candidate nodes: depth 1 .. horizon - margin, in level order.
    std::vector<std::pair<std::size_t, std::size_t>> nodes;
    for (std::size_t depth = 1; depth + c.check.zoom_margin <= c.check.zoom_horizon; ++depth) {
      for (std::size_t i = 0; i < tree.level_size(depth); ++i) nodes.emplace_back(depth, i);
    }
    std::size_t passed = 0, failed = 0, skipped = 0, corrupted = 0, corrupted_failed = 0;
    json results = json::array();
    for (std::size_t k = 0; k < c.check.zoom_nodes && !nodes.empty(); ++k) {
      auto pick = static_cast<std::size_t>(rng::to_unit(rng::derive(zseed ^ 0x5a5a5a5a5a5a5a5aULL, k)) *
                                           static_cast<double>(nodes.size()));
      auto [depth, idx] = nodes[std::min(pick, nodes.size() - 1)];
      const Word v = tree.word(depth, idx);
      const auto res = check_zoom_identity_ssc(tree, c.ifs, v, rho, ssc);
      json jr = {{"node", word_text(v, c.ifs.size())}, {"status", std::string(to_string(res.status))},
                 {"d_h", std::isnan(res.d_h) ? json(nullptr) : json(res.d_h)},
                 {"tolerance", std::isnan(res.tolerance) ? json(nullptr) : json(res.tolerance)}};
      if (res.status == ZoomStatus::Pass) ++passed;
      if (res.status == ZoomStatus::Fail) ++failed;
      if (res.status == ZoomStatus::PreconditionViolated) {
        ++skipped;
        jr["detail"] = res.detail;
      }
      // Wrong comparison: a sibling whose reduced child set differs from v's.
      const std::size_t parent = tree.parent(depth, idx);
      const std::size_t first = tree.first_child(depth - 1, parent);
      const std::size_t n_children = static_cast<std::size_t>(subset_size(tree.child_mask(depth - 1, parent)));
      for (std::size_t j = first; j < first + n_children; ++j) {
        if (j == idx || tree.child_mask(depth, j) == tree.child_mask(depth, idx)) continue;
        const auto bad_res = check_zoom_identity_ssc(tree, c.ifs, v, rho, ssc, tree.word(depth, j));
        ++corrupted;
        if (bad_res.status == ZoomStatus::Fail) ++corrupted_failed;
        jr["sibling"] = word_text(tree.word(depth, j), c.ifs.size());
        jr["sibling_status"] = std::string(to_string(bad_res.status));
        break;
      }
      results.push_back(std::move(jr));
    }
    zoom = {{"performed", true},  {"rho", rho},          {"nodes", results.size()},
            {"passed", passed},   {"failed", failed},    {"precondition_violated", skipped},
            {"corrupted", corrupted}, {"corrupted_failed", corrupted_failed}, {"results", results}};
  }
  out["zoom_identity"] = zoom;

  prepare_output(c.output);
  write_file(c.output / "check.json", out.dump(2) + "\n");
  return out;
}

json cmd_zoom(const ExperimentConfig& c) {
  const std::uint64_t zseed = rng::derive(c.seed, kZoom);
  const auto sample = sample_surviving(c.offspring, c.horizon, zseed, c.max_attempts);
  const Tree tree = *reduce_to_horizon(sample.tree, c.horizon);
  Word path;
  if (!c.zoom.path.empty()) {
    path = parse_word(c.zoom.path, c.ifs.size());
  } else {
    std::size_t idx = 0;
    for (std::size_t depth = 0; depth < std::min(c.zoom.depth, c.horizon); ++depth) {
      Subset m = tree.child_mask(depth, idx);
      path.push_back(subset_members(m).front());
      idx = tree.first_child(depth, idx);
    }
  }
  const double rho = *std::min_element(c.rho.begin(), c.rho.end());
  const ZoomSequence seq = zoom_sequence(tree, c.ifs, path, rho, c.zoom.tail_factor, c.zoom.tail_length);

  prepare_output(c.output);
  json steps = json::array();
  for (std::size_t k = 0; k < seq.steps.size(); ++k) {
    const auto& s = seq.steps[k];
    json js = {{"node", word_text(s.node, c.ifs.size())}, {"expansion", s.map.ratio()},
               {"meets_open_cube", s.meets_open_cube},
               {"d_h_to_prev", s.d_h_to_prev ? json(*s.d_h_to_prev) : json(nullptr)}};
    if (const auto* m = std::get_if<PointCloud>(&s.miniset)) {
      js["points"] = m->size();
      js["epsilon"] = m->epsilon();
      write_file(c.output / ("zoom_step_" + std::to_string(k) + ".csv"), cloud_to_csv(*m));
    } else {
      js["points"] = 0;
      js["empty"] = true;
    }
    steps.push_back(std::move(js));
  }
  json out = {{"schema_version", kSchemaVersion}, {"command", "zoom"},
              {"path", word_text(path, c.ifs.size())}, {"rho", rho},
              {"tail_factor", seq.tail_factor}, {"microset_approximant", seq.microset_approximant},
              {"steps", steps}};
  write_file(c.output / "zoom.json", out.dump(2) + "\n");
  return out;
}

json cmd_render(const ExperimentConfig& c) {
  if (c.ifs.dim() > 2) throw Error(ErrorKind::Domain, "render needs an IFS in dimension 1 or 2");
  // Detail below one pixel is invisible, so the finest scale is capped there.
  const double pixel = 2.0 * c.ifs.bounding_radius() / static_cast<double>(std::max(c.render.width, c.render.height));
  const double rho = std::max(*std::min_element(c.rho.begin(), c.rho.end()), pixel);
  prepare_output(c.output);
  auto region_of = [](const PointCloud& cloud) {
    Box b = cloud.bounds();
    for (int t = 0; t < b.dim(); ++t) {
      if (b.hi[t] - b.lo[t] <= 0.0) {
        b.lo[t] -= 0.5;
        b.hi[t] += 0.5;
      }
    }
    return b;
  };
  const PointCloud attractor = attractor_cloud(c.ifs, rho);
  const Box region = region_of(attractor);
  write_file(c.output / "attractor.pgm", render_pgm(attractor, region, c.render.width, c.render.height));
  const auto sample = sample_surviving(c.offspring, c.horizon, rng::derive(rng::derive(c.seed, kTrees), 0), c.max_attempts);
  const PointCloud gwf = project_tree(sample.tree, c.ifs, rho);
  write_file(c.output / "sample_0.pgm", render_pgm(gwf, region, c.render.width, c.render.height));
  json out = {{"schema_version", kSchemaVersion}, {"command", "render"}, {"rho", rho},
              {"attractor_points", attractor.size()}, {"sample_points", gwf.size()},
              {"width", c.render.width}, {"height", c.render.height}};
  write_file(c.output / "render.json", out.dump(2) + "\n");
  return out;
}

PointCloud reference_cloud(const ExperimentConfig& c) {
  auto sample = sample_surviving(c.offspring, c.horizon, rng::derive(rng::derive(c.seed, kTrees), 0), c.max_attempts);
  return project_tree(sample.tree, c.ifs, *std::min_element(c.rho.begin(), c.rho.end()));
}

json estimator_report(const PointCloud& cloud, const ExperimentConfig& c) { return run_estimators(cloud, c).report; }

int run_cli(int argc, char** argv) {
  CLI::App app{"Galton-Watson fractal lab"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> trials;
  std::string chosen;
  for (const char* name : {"dims", "simulate", "check", "zoom", "render"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out", out_dir, "override the output directory");
    sub->add_option("--trials", trials, "override the Kesten-Stigum trial count");
    sub->callback([&chosen, name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    ExperimentConfig c = load_config(config_path);
    if (seed) c.seed = *seed;
    if (out_dir) c.output = *out_dir;
    if (trials) c.trials = *trials;
    json report;
    if (chosen == "dims") {
      report = cmd_dims(c);
    } else if (chosen == "simulate") {
      report = cmd_simulate(c);
    } else if (chosen == "check") {
      report = cmd_check(c);
    } else if (chosen == "zoom") {
      report = cmd_zoom(c);
    } else {
      report = cmd_render(c);
    }
    std::cout << report.dump(2) << '\n';
    return 0;
  } catch (const Error& e) {
    std::cerr << "gwf_lab: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::bad_alloc&) {
    std::cerr << "gwf_lab: out of memory\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "gwf_lab: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace gwf::lab
