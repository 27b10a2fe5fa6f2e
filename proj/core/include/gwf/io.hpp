#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "gwf/galton_watson.hpp"
#include "gwf/point_cloud.hpp"
#include "gwf/similarity.hpp"

namespace gwf {

// { "dim": d,
//   "maps": [ { "ratio": r, "orthogonal": "identity" | [[...], ...], "translation": [...] } ],
//   "osc_box": { "lo": [...], "hi": [...] } }      osc_box optional
// Errors are Config errors naming the offending path, e.g. "maps[2].ratio".
Ifs parse_ifs_json(std::string_view text);

// { "atoms": [ { "subset": [i, ...], "prob": p } ] } or { "binomial_p": p }.
OffspringDistribution parse_offspring_json(std::string_view text, std::size_t alphabet_size);

// "# ambient_dim=<d> epsilon=<eps>", then "x0,x1,...", then one point per row
// (17 significant digits).
std::string cloud_to_csv(const PointCloud& cloud);
PointCloud cloud_from_csv(std::string_view text);

// Binary PGM (P5), width x height pixels over `region`; occupied pixels are
// 0, the rest 255. Row 0 is the top (largest second coordinate). Clouds of
// dimension 1 fill whole columns. Dimension above 2 is rejected.
std::string render_pgm(const PointCloud& cloud, const Box& region, std::size_t width, std::size_t height);

}  // namespace gwf
