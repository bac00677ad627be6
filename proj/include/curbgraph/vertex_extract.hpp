#pragma once

#include <string>
#include <vector>

#include "curbgraph/geometry.hpp"
#include "curbgraph/raster.hpp"
#include "curbgraph/tiling.hpp"

namespace curbgraph {

// Graph vertices recovered from one keypoint map, in global coordinates.
// Connectors are the skeleton polylines of rounded-corner blobs; their
// endpoints are entries of `vertices` referenced by index.
struct ExtractedVertices {
  std::vector<Point> vertices;  // sorted by (y,x)
  struct Connector {
    int a = 0;
    int b = 0;
    std::vector<Point> polyline;
  };
  std::vector<Connector> connectors;
  int branch_splits = 0;  // skeletons that had to be cut at branch pixels
};

struct ExtractParams {
  float binarize_threshold = 0.3f;
  int short_skeleton_len = 5;  // pixels; at most this many -> one vertex
};

// Binarize, skeletonize, group skeleton components. Short components yield
// their centroid-nearest skeleton pixel; longer ones yield their two
// endpoints plus the traced polyline as a connector. Branching skeletons are
// split at branch pixels into simple arcs first.
ExtractedVertices extract_vertices(const RasterMap& keypoint_map,
                                   const ExtractParams& params,
                                   const PatchFrame& frame);

std::string extraction_to_json(const ExtractedVertices& ev);
ExtractedVertices extraction_from_json(const std::string& text);

}  // namespace curbgraph
