#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "curbgraph/geometry.hpp"
#include "curbgraph/graph.hpp"

namespace curbgraph {

struct MetricConfig {
  std::vector<double> relax_ratios = {2.0, 5.0, 10.0};
  double tlts_phi = 0.05;
  int sample_pairs = 500;
  double snap_radius = 20.0;
  std::uint64_t seed = 0;
};

struct PixelScore {
  double relax_ratio = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricReport {
  std::vector<PixelScore> pixel;   // one entry per relax ratio
  std::optional<double> apls;      // nullopt when gt has no connected pair
  std::optional<double> tlts;
  int sampled_pairs = 0;
  int unmatched_pairs = 0;  // missing correspondence or missing pred path

  std::string to_json() const;
  std::string to_table() const;
};

// Relaxed precision/recall/F1 between the graphs rasterized at thickness 1
// over the same rect. d(p,Q) < tau with exact integer pixel arithmetic.
std::vector<PixelScore> pixel_metrics(const BoundaryGraph& pred, const BoundaryGraph& gt,
                                      const Rect& rect, const MetricConfig& config);

// Mean over sampled connected gt vertex pairs of
// 1 - min(1, |l_gt - l_pred| / l_gt); pairs without a snapped correspondence
// or a pred path score 0. nullopt if gt has no connected pair.
std::optional<double> apls(const BoundaryGraph& gt, const BoundaryGraph& pred,
                           const MetricConfig& config, int* unmatched = nullptr,
                           int* sampled = nullptr);

// Fraction of sampled pairs with |l_gt - l_pred| <= l_gt * phi; missing
// correspondences and paths fail.
std::optional<double> tlts(const BoundaryGraph& gt, const BoundaryGraph& pred,
                           const MetricConfig& config, int* unmatched = nullptr,
                           int* sampled = nullptr);

MetricReport evaluate(const BoundaryGraph& pred, const BoundaryGraph& gt, const Rect& rect,
                      const MetricConfig& config);

}  // namespace curbgraph
