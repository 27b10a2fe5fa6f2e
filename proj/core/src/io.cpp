#include "gwf/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "gwf/errors.hpp"

namespace gwf {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::Config, path + ": " + what);
}

json parse_text(std::string_view text, const char* what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string(what) + ": " + e.what());
  }
}

const json& member(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "not finite");
  return x;
}

Eigen::VectorXd vector_of(const json& v, const std::string& path, int dim) {
  if (!v.is_array()) fail(path, "expected an array");
  if (static_cast<int>(v.size()) != dim) fail(path, "expected " + std::to_string(dim) + " entries");
  Eigen::VectorXd out(dim);
  for (int i = 0; i < dim; ++i) out[i] = number(v[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
  return out;
}

}  // namespace

Ifs parse_ifs_json(std::string_view text) {
  const json root = parse_text(text, "IFS JSON");
  const json& jd = member(root, "", "dim");
  if (!jd.is_number_integer() || jd.get<long long>() < 1) fail("dim", "expected a positive integer");
  const int dim = static_cast<int>(jd.get<long long>());

  const json& jmaps = member(root, "", "maps");
  if (!jmaps.is_array() || jmaps.empty()) fail("maps", "expected a non-empty array");
  std::vector<SimilarityMap> maps;
  for (std::size_t k = 0; k < jmaps.size(); ++k) {
    const std::string p = "maps[" + std::to_string(k) + "]";
    const json& m = jmaps[k];
    const double ratio = number(member(m, p, "ratio"), p + ".ratio");
    if (!(ratio > 0.0 && ratio < 1.0)) fail(p + ".ratio", "expected a contraction ratio in (0, 1)");
    Eigen::MatrixXd o = Eigen::MatrixXd::Identity(dim, dim);
    if (auto it = m.find("orthogonal"); it != m.end()) {
      if (it->is_string()) {
        if (it->get<std::string>() != "identity") fail(p + ".orthogonal", "expected \"identity\" or a matrix");
      } else {
        if (!it->is_array() || static_cast<int>(it->size()) != dim) fail(p + ".orthogonal", "expected a d x d matrix");
        for (int i = 0; i < dim; ++i) {
          o.row(i) = vector_of((*it)[static_cast<std::size_t>(i)], p + ".orthogonal[" + std::to_string(i) + "]", dim);
        }
        if (!(o.transpose() * o).isApprox(Eigen::MatrixXd::Identity(dim, dim), 1e-9)) {
          fail(p + ".orthogonal", "matrix is not orthogonal");
        }
      }
    }
    Eigen::VectorXd t = vector_of(member(m, p, "translation"), p + ".translation", dim);
    try {
      maps.emplace_back(ratio, std::move(o), std::move(t));
    } catch (const Error& e) {
      fail(p, e.what());
    }
  }

  std::optional<Box> box;
  if (auto it = root.find("osc_box"); it != root.end()) {
    Box b{vector_of(member(*it, "osc_box", "lo"), "osc_box.lo", dim), vector_of(member(*it, "osc_box", "hi"), "osc_box.hi", dim)};
    if (!(b.lo.array() < b.hi.array()).all()) fail("osc_box", "need lo < hi in every coordinate");
    box = std::move(b);
  }
  try {
    return Ifs(std::move(maps), std::move(box));
  } catch (const Error& e) {
    fail("maps", e.what());
  }
}

OffspringDistribution parse_offspring_json(std::string_view text, std::size_t alphabet_size) {
  const json root = parse_text(text, "offspring JSON");
  if (!root.is_object()) fail("offspring", "expected an object");
  try {
    if (auto it = root.find("binomial_p"); it != root.end()) {
      if (root.contains("atoms")) fail("offspring", "give either atoms or binomial_p, not both");
      return OffspringDistribution::binomial(alphabet_size, number(*it, "binomial_p"));
    }
    const json& atoms = member(root, "", "atoms");
    if (!atoms.is_array() || atoms.empty()) fail("atoms", "expected a non-empty array");
    std::vector<Atom> out;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      const std::string p = "atoms[" + std::to_string(k) + "]";
      const json& js = member(atoms[k], p, "subset");
      if (!js.is_array()) fail(p + ".subset", "expected an array of symbols");
      Subset s = 0;
      for (std::size_t i = 0; i < js.size(); ++i) {
        const std::string q = p + ".subset[" + std::to_string(i) + "]";
        if (!js[i].is_number_integer()) fail(q, "expected a symbol index");
        auto sym = js[i].get<long long>();
        if (sym < 0 || static_cast<std::size_t>(sym) >= alphabet_size) fail(q, "symbol outside the alphabet");
        if (contains(s, static_cast<Symbol>(sym))) fail(q, "repeated symbol");
        s |= Subset{1} << sym;
      }
      out.push_back({s, number(member(atoms[k], p, "prob"), p + ".prob")});
    }
    return OffspringDistribution(alphabet_size, std::move(out));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    throw Error(ErrorKind::Config, std::string("offspring: ") + e.what());
  }
}

std::string cloud_to_csv(const PointCloud& cloud) {
  std::string out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "# ambient_dim=%d epsilon=%.17g\n", cloud.dim(), cloud.epsilon());
  out += buf;
  for (int t = 0; t < cloud.dim(); ++t) out += (t ? ",x" : "x") + std::to_string(t);
  out += '\n';
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    auto p = cloud.point(i);
    for (std::size_t t = 0; t < p.size(); ++t) {
      std::snprintf(buf, sizeof buf, t ? ",%.17g" : "%.17g", p[t]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

PointCloud cloud_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int dim = 0;
  double eps = 0.0;
  if (!std::getline(in, line) || std::sscanf(line.c_str(), "# ambient_dim=%d epsilon=%lf", &dim, &eps) != 2 || dim < 1) {
    throw Error(ErrorKind::Config, "cloud CSV: bad header line");
  }
  std::getline(in, line);  // column names
  std::vector<double> coords;
  std::size_t row = 2;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string cell;
    int n = 0;
    while (std::getline(cells, cell, ',')) {
      try {
        coords.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorKind::Config, "cloud CSV line " + std::to_string(row) + ": bad number");
      }
      ++n;
    }
    if (n != dim) throw Error(ErrorKind::Config, "cloud CSV line " + std::to_string(row) + ": wrong column count");
  }
  return PointCloud(dim, std::move(coords), eps);
}

std::string render_pgm(const PointCloud& cloud, const Box& region, std::size_t width, std::size_t height) {
  if (cloud.dim() > 2) throw Error(ErrorKind::InvalidArgument, "PGM rendering needs dimension 1 or 2");
  if (region.dim() != cloud.dim()) throw Error(ErrorKind::InvalidArgument, "render region dimension differs from cloud");
  if (width == 0 || height == 0) throw Error(ErrorKind::InvalidArgument, "empty raster");
  if (!(region.lo.array() < region.hi.array()).all()) throw Error(ErrorKind::InvalidArgument, "degenerate render region");

  std::vector<unsigned char> pixels(width * height, 255);
  auto cell = [](double x, double lo, double hi, std::size_t n) -> std::optional<std::size_t> {
    if (x < lo || x > hi) return std::nullopt;
    auto k = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(n));
    return std::min(k, n - 1);
  };
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    auto p = cloud.point(i);
    auto cx = cell(p[0], region.lo[0], region.hi[0], width);
    if (!cx) continue;
    if (cloud.dim() == 1) {
      for (std::size_t row = 0; row < height; ++row) pixels[row * width + *cx] = 0;
      continue;
    }
    auto cy = cell(p[1], region.lo[1], region.hi[1], height);
    if (!cy) continue;
    pixels[(height - 1 - *cy) * width + *cx] = 0;
  }
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.append(pixels.begin(), pixels.end());
  return out;
}

}  // namespace gwf
