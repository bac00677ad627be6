#pragma once

#include <string>
#include <vector>

#include "curbgraph/graph.hpp"
#include "curbgraph/raster.hpp"
#include "curbgraph/tiling.hpp"

namespace curbgraph {

enum class KeypointKind {
  corner_isolated,
  corner_rounded,
  intersect_core_edge,
  intersect_neighbor_edge,
  intersect_aux_line,
};

const char* keypoint_kind_name(KeypointKind kind);
KeypointKind keypoint_kind_from_name(const std::string& name);

struct Keypoint {
  Point pos;
  KeypointKind kind = KeypointKind::corner_isolated;
};

struct CornerParams {
  double angle_threshold_deg = 30.0;  // minimum tangent change
  double arc_window = 8.0;            // tangent compared at s +- arc_window
  double gather_threshold = 6.0;      // qualifying arc beyond the window span
                                      // that flips isolated -> rounded
};

// Curvature keypoints of every polyline of the graph, in global coordinates.
// A sample qualifies when the tangent direction changes by at least
// angle_threshold across the +-arc_window neighborhood. A point singularity
// (sharp bend) qualifies a run of exactly the window span, so runs whose arc
// length exceeds the span by more than gather_threshold are distributed
// curvature: every sample of those runs is emitted as corner_rounded.
// Shorter runs collapse to one corner_isolated at their arc midpoint.
std::vector<Keypoint> corner_keypoints(const BoundaryGraph& graph, const CornerParams& params);

// Intersections of boundary polylines with the core-edge segments of this
// frame and of its 4 edge-adjacent frames, plus the global auxiliary grid
// lines at multiples of aux_spacing (none if aux_spacing <= 0). All returned
// points lie inside the expanded rect; duplicates within 0.5 px are merged.
std::vector<Keypoint> intersection_keypoints(const BoundaryGraph& graph,
                                             const PatchFrame& frame,
                                             double aux_spacing);

// Merge, dedup within 0.5 px (corner kinds win over intersection kinds), and
// keep only keypoints inside the expanded rect.
std::vector<Keypoint> merge_keypoints(const std::vector<Keypoint>& corners,
                                      const std::vector<Keypoint>& intersections,
                                      const PatchFrame& frame);

// All keypoints of one patch: global corners filtered to the frame plus the
// frame's intersection keypoints.
std::vector<Keypoint> patch_keypoints(const BoundaryGraph& graph, const PatchFrame& frame,
                                      const CornerParams& corner_params, double aux_spacing);

// Gaussian rendering of the keypoints in the frame's local pixel grid.
RasterMap keypoint_label_map(const std::vector<Keypoint>& keypoints,
                             const PatchFrame& frame, double sigma);

std::string keypoints_to_json(const std::vector<Keypoint>& keypoints);
std::vector<Keypoint> keypoints_from_json(const std::string& text);

}  // namespace curbgraph
