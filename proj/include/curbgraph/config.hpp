#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "curbgraph/afa.hpp"
#include "curbgraph/keypoints.hpp"
#include "curbgraph/metrics.hpp"
#include "curbgraph/synth.hpp"
#include "curbgraph/vertex_extract.hpp"

namespace curbgraph {

// Flat key = value text, # comments. Unknown keys are rejected so typos in
// config files fail loudly.
struct PipelineConfig {
  // tiling
  int tile_size = 5000;
  int core_size = 1000;
  int margin = 50;
  int tile_rows = 1;
  int tile_cols = 1;

  // keypoints
  double sigma = 3.0;
  double peak_threshold = 0.3;
  int nms_radius = 5;
  CornerParams corner;
  double aux_spacing = 256.0;

  // extraction
  ExtractParams extract;

  // afa
  int roi_size = 64;
  int d_model = 256;
  int attn_layers = 2;
  double learning_rate = 1e-2;
  int train_steps = 200;
  int train_instances = 16;
  double afa_threshold = 0.0;  // raw score space; 0.5 in probability space

  // adjacency oracle
  double adjacency_snap_radius = 10.0;

  // stitching
  double merge_radius = 2.0;
  double connector_spacing = 4.0;

  // metrics
  MetricConfig metrics;

  // synthetic city / noise
  double spacing_min = 250.0;
  double spacing_max = 450.0;
  double rounding_min = 0.0;
  double rounding_max = 40.0;
  NoiseSpec noise;

  std::uint64_t seed = 0;
  int workers = 1;

  CitySpec city_spec() const;

  static PipelineConfig load(const std::string& path);
  static PipelineConfig from_text(const std::string& text);
  // validates module preconditions; throws with the offending key
  void validate() const;
  std::string to_text() const;
};

std::map<std::string, std::string> parse_key_values(const std::string& text);

}  // namespace curbgraph
