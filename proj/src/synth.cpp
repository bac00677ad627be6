#include "curbgraph/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "curbgraph/raster_ops.hpp"
#include "curbgraph/rng.hpp"

namespace curbgraph {

namespace {

constexpr double kRoadHalfWidth = 15.0;  // block inset from the road cut lines
constexpr double kArcStep = 4.0;         // fillet arc sample spacing
constexpr double kIrregularProb = 0.15;
constexpr double kMinBlockSide = 40.0;

std::vector<double> walk_cuts(Rng& rng, double extent, double lo, double hi) {
  std::vector<double> cuts{0.0};
  double x = 0.0;
  while (true) {
    x += rng.uniform(lo, hi);
    if (x > extent - 0.5 * lo) break;
    cuts.push_back(x);
  }
  cuts.push_back(extent);
  return cuts;
}

void add_loop(BoundaryGraph& graph, const std::vector<Point>& pts) {
  if (pts.size() < 3) return;
  std::vector<int> ids;
  ids.reserve(pts.size());
  for (const auto& p : pts) ids.push_back(graph.add_vertex(p.x, p.y));
  for (size_t i = 0; i < ids.size(); ++i)
    graph.add_edge(ids[i], ids[(i + 1) % ids.size()]);
}

// clockwise quarter arc from `from_angle`, appended exclusive of the final point
void append_arc(std::vector<Point>& pts, Point center, double radius, double a0, double a1) {
  double arc_len = radius * std::abs(a1 - a0);
  int n = std::max(1, static_cast<int>(std::ceil(arc_len / kArcStep)));
  for (int i = 0; i < n; ++i) {
    double a = a0 + (a1 - a0) * i / n;
    pts.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  }
}

std::vector<Point> rounded_rect_loop(const Rect& r, double radius) {
  std::vector<Point> pts;
  if (radius < 2.0) {
    return {{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}};
  }
  // corner arc centers, walking the loop clockwise in raster coordinates
  // (x right, y down): top edge, right edge, bottom edge, left edge
  pts.push_back({r.x0 + radius, r.y0});
  pts.push_back({r.x1 - radius, r.y0});
  append_arc(pts, {r.x1 - radius, r.y0 + radius}, radius, -M_PI / 2, 0.0);
  pts.push_back({r.x1, r.y0 + radius});
  pts.push_back({r.x1, r.y1 - radius});
  append_arc(pts, {r.x1 - radius, r.y1 - radius}, radius, 0.0, M_PI / 2);
  pts.push_back({r.x1 - radius, r.y1});
  pts.push_back({r.x0 + radius, r.y1});
  append_arc(pts, {r.x0 + radius, r.y1 - radius}, radius, M_PI / 2, M_PI);
  pts.push_back({r.x0, r.y1 - radius});
  pts.push_back({r.x0, r.y0 + radius});
  append_arc(pts, {r.x0 + radius, r.y0 + radius}, radius, M_PI, 3 * M_PI / 2);
  // drop consecutive duplicates introduced by arc endpoints
  std::vector<Point> out;
  for (const auto& p : pts)
    if (out.empty() || dist(out.back(), p) > 1e-9) out.push_back(p);
  if (out.size() > 1 && dist(out.front(), out.back()) <= 1e-9) out.pop_back();
  return out;
}

std::vector<Point> irregular_loop(const Rect& r, Rng& rng) {
  double j = std::min(12.0, std::min(r.width(), r.height()) / 8.0);
  auto jit = [&]() { return rng.uniform(-j, j); };
  return {{r.x0 + jit(), r.y0 + jit()},
          {r.x1 + jit(), r.y0 + jit()},
          {r.x1 + jit(), r.y1 + jit()},
          {r.x0 + jit(), r.y1 + jit()}};
}

void validate_spec(const CitySpec& spec) {
  if (spec.tile_rows < 1 || spec.tile_cols < 1 || spec.tile_size < 1)
    throw std::invalid_argument("city: tiles and tile_size must be positive");
  if (spec.spacing_min <= 0.0 || spec.spacing_max < spec.spacing_min)
    throw std::invalid_argument("city: bad spacing range");
  if (spec.rounding_min < 0.0 || spec.rounding_max < spec.rounding_min)
    throw std::invalid_argument("city: bad rounding range");
  double w = spec.city_width(), h = spec.city_height();
  if (spec.spacing_min + 2.0 * kRoadHalfWidth >= std::min(w, h))
    throw std::invalid_argument("city: blocks larger than the city");
  if (spec.noise.dropout < 0.0 || spec.noise.dropout > 1.0 ||
      spec.noise.jitter_sigma < 0.0 || spec.noise.fp_per_kilopixel < 0.0)
    throw std::invalid_argument("city: bad noise spec");
}

}  // namespace

CityLayout compute_layout(const CitySpec& spec) {
  validate_spec(spec);
  CityLayout layout;
  Rng xr = Rng::derive(spec.seed, 0);
  Rng yr = Rng::derive(spec.seed, 1);
  layout.x_cuts = walk_cuts(xr, spec.city_width(), spec.spacing_min, spec.spacing_max);
  layout.y_cuts = walk_cuts(yr, spec.city_height(), spec.spacing_min, spec.spacing_max);
  layout.block_count = static_cast<int>((layout.x_cuts.size() - 1) * (layout.y_cuts.size() - 1));
  return layout;
}

BoundaryGraph generate_city(const CitySpec& spec) {
  CityLayout layout = compute_layout(spec);
  BoundaryGraph graph;
  int nx = static_cast<int>(layout.x_cuts.size()) - 1;
  for (size_t yi = 0; yi + 1 < layout.y_cuts.size(); ++yi) {
    for (size_t xi = 0; xi + 1 < layout.x_cuts.size(); ++xi) {
      Rect block{layout.x_cuts[xi] + kRoadHalfWidth, layout.y_cuts[yi] + kRoadHalfWidth,
                 layout.x_cuts[xi + 1] - kRoadHalfWidth,
                 layout.y_cuts[yi + 1] - kRoadHalfWidth};
      if (block.width() < kMinBlockSide || block.height() < kMinBlockSide) continue;
      // per-block stream keyed by the global cell index, so block order and
      // tile assignment never change the output
      Rng rng = Rng::derive(spec.seed, 1000 + yi * static_cast<size_t>(nx) + xi);
      if (rng.bernoulli(kIrregularProb)) {
        add_loop(graph, irregular_loop(block, rng));
      } else {
        double radius = rng.uniform(spec.rounding_min, spec.rounding_max);
        radius = std::min(radius, std::min(block.width(), block.height()) / 2.0 - 2.0);
        add_loop(graph, rounded_rect_loop(block, radius));
      }
    }
  }
  return graph;
}

std::pair<RasterMap, RasterMap> simulate_inference(const BoundaryGraph& gt,
                                                   const PatchFrame& frame,
                                                   const NoiseSpec& noise,
                                                   const CornerParams& corner_params,
                                                   double aux_spacing, double sigma,
                                                   std::uint64_t patch_seed) {
  auto keypoints = patch_keypoints(gt, frame, corner_params, aux_spacing);
  RasterMap kp_map;
  if (noise.is_zero()) {
    kp_map = keypoint_label_map(keypoints, frame, sigma);
  } else {
    Rng rng(patch_seed);
    std::vector<Point> pts;
    pts.reserve(keypoints.size());
    for (const auto& kp : keypoints) {
      if (rng.bernoulli(noise.dropout)) continue;
      Point local = frame.to_local(kp.pos);
      if (noise.jitter_sigma > 0.0) {
        local.x += rng.normal(0.0, noise.jitter_sigma);
        local.y += rng.normal(0.0, noise.jitter_sigma);
      }
      pts.push_back(local);
    }
    double size = frame.expanded_size();
    double area_kpx = size * size / 1000.0;
    int n_fp = rng.poisson(noise.fp_per_kilopixel * area_kpx);
    for (int i = 0; i < n_fp; ++i)
      pts.push_back({rng.uniform(0.0, size), rng.uniform(0.0, size)});
    kp_map = render_gaussian_points(pts, sigma, frame.expanded_size(), frame.expanded_size());
  }
  RasterMap seg = gaussian_blur(rasterize_graph(gt, frame, 3.0), sigma);
  return {std::move(kp_map), std::move(seg)};
}

RasterMap make_feature_tensor(const RasterMap& keypoint_map, const RasterMap& seg_map,
                              std::uint64_t seed) {
  if (keypoint_map.width != seg_map.width || keypoint_map.height != seg_map.height ||
      keypoint_map.channels != 1 || seg_map.channels != 1)
    throw std::invalid_argument("feature_tensor: map shape mismatch");
  RasterMap out(keypoint_map.width, keypoint_map.height, 6);
  Rng noise_a = Rng::derive(seed, 2);
  Rng noise_b = Rng::derive(seed, 3);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      float seg = seg_map.at(x, y);
      out.at(x, y, 0) = seg;
      out.at(x, y, 1) = 1.0f - seg;
      out.at(x, y, 2) = static_cast<float>(noise_a.uniform());
      out.at(x, y, 3) = static_cast<float>(noise_b.uniform());
      out.at(x, y, 4) = keypoint_map.at(x, y);
      out.at(x, y, 5) = seg;
    }
  }
  return out;
}

}  // namespace curbgraph
