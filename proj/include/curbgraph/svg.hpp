#pragma once

#include <string>
#include <vector>

#include "curbgraph/graph.hpp"
#include "curbgraph/tiling.hpp"

namespace curbgraph {

// Vertices as circles, edges as segments, patch cores as faint rectangles.
void render_svg(const std::string& path, const BoundaryGraph& graph,
                const std::vector<PatchFrame>& frames);

}  // namespace curbgraph
