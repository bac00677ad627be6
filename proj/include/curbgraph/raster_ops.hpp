#pragma once

#include <vector>

#include "curbgraph/geometry.hpp"
#include "curbgraph/graph.hpp"
#include "curbgraph/raster.hpp"

namespace curbgraph {

struct PixelCoord {
  int x = 0;
  int y = 0;
  bool operator==(const PixelCoord&) const = default;
};
using PixelSet = std::vector<PixelCoord>;

// Thin a binary map to a 1-pixel-wide skeleton. Sequential two-subcycle
// border peeling with the crossing-number test, so 8-connected component
// count is preserved exactly and a converged image is a fixpoint.
RasterMap skeletonize(const RasterMap& map);

// Foreground partition; components ordered by their smallest (y,x) member,
// pixels within a component in (y,x) scan order.
std::vector<PixelSet> connected_components(const RasterMap& map, int connectivity);

// Greedy non-maximum suppression: candidates with value >= threshold,
// visited in descending value (ties by (y,x)); survivors suppress everything
// within nms_radius in Chebyshev distance.
std::vector<PixelCoord> local_peaks(const RasterMap& map, float threshold, int nms_radius);

// Per-pixel max over points of exp(-d^2 / (2 sigma^2)); points are in the
// raster's own pixel coordinates.
RasterMap render_gaussian_points(const std::vector<Point>& points, double sigma,
                                 int width, int height);

// 2-channel tangent-direction map of the rasterized graph. Foreground pixels
// store the unit tangent of the nearest edge segment, sign-canonicalized to
// dx >= 0 (dy >= 0 when dx == 0), mapped from [-1,1] to [0,1]. Background is
// (0.5, 0.5).
RasterMap orientation_map(const BoundaryGraph& graph, const PatchFrame& frame,
                          double thickness);

// Separable Gaussian blur, kernel truncated at 3 sigma and renormalized.
RasterMap gaussian_blur(const RasterMap& map, double sigma);

}  // namespace curbgraph
