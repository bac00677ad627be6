#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "curbgraph/graph.hpp"
#include "curbgraph/keypoints.hpp"
#include "curbgraph/raster.hpp"
#include "curbgraph/tiling.hpp"

namespace curbgraph {

struct NoiseSpec {
  double jitter_sigma = 0.0;    // per-keypoint position jitter, pixels
  double fp_per_kilopixel = 0.0;  // expected false-positive peaks per 1000 px
  double dropout = 0.0;         // per-keypoint dropout probability

  bool is_zero() const {
    return jitter_sigma == 0.0 && fp_per_kilopixel == 0.0 && dropout == 0.0;
  }
};

struct CitySpec {
  std::uint64_t seed = 0;
  int tile_rows = 1;
  int tile_cols = 1;
  int tile_size = 5000;
  double spacing_min = 250.0;  // road block spacing range
  double spacing_max = 450.0;
  double rounding_min = 0.0;  // corner fillet radius range
  double rounding_max = 40.0;
  NoiseSpec noise;

  double city_width() const { return static_cast<double>(tile_cols) * tile_size; }
  double city_height() const { return static_cast<double>(tile_rows) * tile_size; }
};

// The seeded street layout behind generate_city, exposed so tests can
// recompute block counts from the cut positions.
struct CityLayout {
  std::vector<double> x_cuts;  // ascending, includes 0 and city width
  std::vector<double> y_cuts;
  int block_count = 0;
};
CityLayout compute_layout(const CitySpec& spec);

// Block-grid city: one boundary loop per block, rectangular with randomly
// rounded corners (arcs sampled every 4 px) and occasional perturbed
// quadrilaterals. Deterministic per (seed, spec); per-block detail uses
// derived sub-streams so block order never matters.
BoundaryGraph generate_city(const CitySpec& spec);

// FPN stand-in for one patch: the keypoint label map with per-point jitter,
// dropout and uniform false-positive peaks, plus the segmentation map
// (thickness-3 rasterization blurred at sigma). A zero NoiseSpec reproduces
// the label renderers exactly.
std::pair<RasterMap, RasterMap> simulate_inference(const BoundaryGraph& gt,
                                                   const PatchFrame& frame,
                                                   const NoiseSpec& noise,
                                                   const CornerParams& corner_params,
                                                   double aux_spacing, double sigma,
                                                   std::uint64_t patch_seed);

// 6-channel tensor: segmentation, inverted segmentation, two seeded noise
// channels, keypoint map, segmentation map.
RasterMap make_feature_tensor(const RasterMap& keypoint_map, const RasterMap& seg_map,
                              std::uint64_t seed);

}  // namespace curbgraph
