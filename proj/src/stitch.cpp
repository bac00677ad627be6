#include "curbgraph/stitch.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace curbgraph {

namespace {

// canonical frame order so every patch accumulates overlap sums identically
bool frame_less(const PatchFrame& a, const PatchFrame& b) {
  auto ka = std::tuple(a.tile_row(), a.tile_col(), a.patch_row(), a.patch_col());
  auto kb = std::tuple(b.tile_row(), b.tile_col(), b.patch_row(), b.patch_col());
  return ka < kb;
}

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(size_t n) : parent(n) {
    for (size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
  }
  int find(int i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    // deterministic: smaller root wins
    if (a > b) std::swap(a, b);
    parent[b] = a;
    return true;
  }
};

}  // namespace

std::vector<PatchResult> average_overlaps(const std::vector<PatchResult>& results) {
  for (const auto& r : results) {
    if (r.keypoint_map.width != r.frame.expanded_size() ||
        r.keypoint_map.height != r.frame.expanded_size() || r.keypoint_map.channels != 1)
      throw std::invalid_argument("average_overlaps: map does not match its frame");
  }
  std::vector<size_t> order(results.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return frame_less(results[a].frame, results[b].frame); });

  std::vector<PatchResult> out = results;
  for (size_t pi = 0; pi < results.size(); ++pi) {
    const PatchFrame& frame = results[pi].frame;
    Rect ex = frame.expanded_rect();
    // candidates that can cover any pixel of this patch, in canonical order
    std::vector<size_t> near;
    for (size_t oi : order)
      if (intersect(ex, results[oi].frame.expanded_rect())) near.push_back(oi);

    RasterMap& dst = out[pi].keypoint_map;
    Point origin = frame.expanded_origin();
    int n = frame.expanded_size();
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        Point g{origin.x + x, origin.y + y};
        double sum = 0.0;
        int count = 0;
        for (size_t oi : near) {
          const PatchFrame& of = results[oi].frame;
          if (!of.expanded_rect().contains(g)) continue;
          Point lp = of.to_local(g);
          sum += results[oi].keypoint_map.at(static_cast<int>(lp.x), static_cast<int>(lp.y));
          ++count;
        }
        dst.at(x, y) = static_cast<float>(sum / count);
      }
    }
  }
  return out;
}

BoundaryGraph assemble_patch_graph(const ExtractedVertices& vertices, const BoolMat& adjacency,
                                   double connector_spacing) {
  size_t m = vertices.vertices.size();
  if (adjacency.rows() != static_cast<Eigen::Index>(m) ||
      adjacency.cols() != static_cast<Eigen::Index>(m))
    throw std::invalid_argument("assemble_patch_graph: adjacency shape mismatch");
  BoundaryGraph g;
  for (const auto& p : vertices.vertices) g.add_vertex(p.x, p.y);

  std::map<std::pair<int, int>, bool> connector_pair;
  for (const auto& c : vertices.connectors)
    connector_pair[{std::min(c.a, c.b), std::max(c.a, c.b)}] = true;

  for (size_t i = 0; i < m; ++i)
    for (size_t j = i + 1; j < m; ++j) {
      if (!adjacency(i, j)) continue;
      // connector endpoints are joined by the skeleton chain, not a chord
      if (connector_pair.count({static_cast<int>(i), static_cast<int>(j)})) continue;
      g.add_edge(static_cast<int>(i), static_cast<int>(j));
    }

  for (const auto& c : vertices.connectors) {
    const auto& pl = c.polyline;
    if (pl.size() < 2) {
      if (c.a != c.b) g.add_edge(c.a, c.b);
      continue;
    }
    double total = 0.0;
    for (size_t k = 1; k < pl.size(); ++k) total += dist(pl[k - 1], pl[k]);
    int nseg = std::max(1, static_cast<int>(std::lround(total / connector_spacing)));
    int prev = c.a;
    double target = 0.0, walked = 0.0;
    size_t seg = 1;
    for (int s = 1; s < nseg; ++s) {
      target = total * s / nseg;
      while (seg < pl.size() - 1 && walked + dist(pl[seg - 1], pl[seg]) < target) {
        walked += dist(pl[seg - 1], pl[seg]);
        ++seg;
      }
      double seg_len = dist(pl[seg - 1], pl[seg]);
      double t = seg_len > 0.0 ? (target - walked) / seg_len : 0.0;
      Point p = pl[seg - 1] + (pl[seg] - pl[seg - 1]) * std::clamp(t, 0.0, 1.0);
      int vid = g.add_vertex(p.x, p.y);
      g.add_edge(prev, vid);
      prev = vid;
    }
    if (prev != c.b) g.add_edge(prev, c.b);
  }
  return g;
}

BoundaryGraph stitch_graphs(const std::vector<PatchResult>& results, double merge_radius) {
  if (merge_radius <= 0.0)
    throw std::invalid_argument("stitch_graphs: merge_radius must be positive");

  // gather all vertices with stable keys independent of patch list order
  struct Entry {
    int patch_key;  // canonical frame rank
    int vertex_id;
    Point pos;
  };
  std::vector<size_t> order(results.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return frame_less(results[a].frame, results[b].frame); });

  std::vector<Entry> entries;
  std::vector<std::pair<int, int>> edge_list;  // entry indices
  for (size_t rank = 0; rank < order.size(); ++rank) {
    const auto& res = results[order[rank]];
    std::map<int, int> local;  // vertex id -> entry index
    for (const auto& v : res.graph.vertices()) {
      local[v.id] = static_cast<int>(entries.size());
      entries.push_back({static_cast<int>(rank), v.id, v.pos()});
    }
    for (const auto& [a, b] : res.graph.edges())
      edge_list.emplace_back(local.at(a), local.at(b));
  }

  DisjointSet ds(entries.size());

  // pass 1: cross-patch proximity via a uniform grid
  auto cell_of = [&](Point p) {
    return std::pair<long, long>(static_cast<long>(std::floor(p.x / merge_radius)),
                                 static_cast<long>(std::floor(p.y / merge_radius)));
  };
  std::map<std::pair<long, long>, std::vector<int>> grid;
  for (size_t i = 0; i < entries.size(); ++i) grid[cell_of(entries[i].pos)].push_back(static_cast<int>(i));
  for (size_t i = 0; i < entries.size(); ++i) {
    auto [cx, cy] = cell_of(entries[i].pos);
    for (long dy = -1; dy <= 1; ++dy)
      for (long dx = -1; dx <= 1; ++dx) {
        auto it = grid.find({cx + dx, cy + dy});
        if (it == grid.end()) continue;
        for (int j : it->second) {
          if (j <= static_cast<int>(i)) continue;
          if (entries[i].patch_key == entries[j].patch_key) continue;
          if (dist(entries[i].pos, entries[j].pos) <= merge_radius) ds.unite(static_cast<int>(i), j);
        }
      }
  }

  // cluster means over original member positions, summed in a fixed order
  auto cluster_positions = [&]() {
    std::map<int, std::vector<int>> clusters;
    for (size_t i = 0; i < entries.size(); ++i)
      clusters[ds.find(static_cast<int>(i))].push_back(static_cast<int>(i));
    std::map<int, Point> means;
    for (auto& [root, members] : clusters) {
      std::sort(members.begin(), members.end());
      double sx = 0.0, sy = 0.0;
      for (int mi : members) {
        sx += entries[mi].pos.x;
        sy += entries[mi].pos.y;
      }
      means[root] = {sx / members.size(), sy / members.size()};
    }
    return means;
  };

  // pass 2..n: enforce that no two stitched vertices stay within merge_radius
  std::map<int, Point> means = cluster_positions();
  bool merged = true;
  while (merged) {
    merged = false;
    std::map<std::pair<long, long>, std::vector<int>> cgrid;
    for (const auto& [root, pos] : means) cgrid[cell_of(pos)].push_back(root);
    for (const auto& [root, pos] : means) {
      auto [cx, cy] = cell_of(pos);
      for (long dy = -1; dy <= 1; ++dy)
        for (long dx = -1; dx <= 1; ++dx) {
          auto it = cgrid.find({cx + dx, cy + dy});
          if (it == cgrid.end()) continue;
          for (int other : it->second) {
            if (other <= root) continue;
            if (dist(pos, means.at(other)) <= merge_radius)
              merged |= ds.unite(root, other);
          }
        }
    }
    if (merged) means = cluster_positions();
  }

  // stable output ids: clusters sorted by merged position
  std::vector<std::pair<Point, int>> roots;
  for (const auto& [root, pos] : means) roots.emplace_back(pos, root);
  std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
    if (a.first.y != b.first.y) return a.first.y < b.first.y;
    if (a.first.x != b.first.x) return a.first.x < b.first.x;
    return a.second < b.second;
  });

  BoundaryGraph out;
  std::map<int, int> root_to_id;
  for (const auto& [pos, root] : roots) root_to_id[root] = out.add_vertex(pos.x, pos.y);
  for (const auto& [ea, eb] : edge_list) {
    int a = root_to_id.at(ds.find(ea));
    int b = root_to_id.at(ds.find(eb));
    if (a != b) out.add_edge(a, b);
  }
  return out;
}

}  // namespace curbgraph
