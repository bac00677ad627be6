#pragma once

#include <vector>

#include "curbgraph/afa.hpp"
#include "curbgraph/graph.hpp"
#include "curbgraph/raster.hpp"
#include "curbgraph/tiling.hpp"
#include "curbgraph/vertex_extract.hpp"

namespace curbgraph {

struct PatchResult {
  PatchFrame frame;
  RasterMap keypoint_map;
  BoundaryGraph graph;  // global coordinates
};

// Replace every map pixel covered by k expanded frames with the arithmetic
// mean over those k patches, accumulated in ascending frame order so the
// overlap regions of adjacent outputs are bit-identical. Maps must all match
// their frame's expanded size.
std::vector<PatchResult> average_overlaps(const std::vector<PatchResult>& results);

// Per-patch graph from extraction output: adjacency edges between vertices,
// except pairs joined by a connector, which instead contribute the connector
// polyline resampled every connector_spacing pixels as a vertex chain.
BoundaryGraph assemble_patch_graph(const ExtractedVertices& vertices, const BoolMat& adjacency,
                                   double connector_spacing = 4.0);

// Union of the per-patch graphs with cross-patch vertices within merge_radius
// identified (union-find; merged position is the coordinate mean). Merging
// repeats on the merged positions until no pair of stitched vertices lies
// within merge_radius.
BoundaryGraph stitch_graphs(const std::vector<PatchResult>& results, double merge_radius);

}  // namespace curbgraph
