#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "curbgraph/geometry.hpp"
#include "curbgraph/raster.hpp"

namespace curbgraph {

struct GraphVertex {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  Point pos() const { return {x, y}; }
};

// Undirected, unweighted spatial graph in global pixel coordinates.
// Invariants: unique vertex ids, no self-loops, no duplicate edges.
class BoundaryGraph {
 public:
  BoundaryGraph() = default;

  // returns the assigned id
  int add_vertex(double x, double y);
  // throws if the id is already present
  void add_vertex_with_id(int id, double x, double y);
  // throws if an endpoint is missing; self-loops and duplicates are ignored
  bool add_edge(int a, int b);

  bool has_vertex(int id) const { return index_.count(id) != 0; }
  const GraphVertex& vertex(int id) const;
  const std::vector<GraphVertex>& vertices() const { return vertices_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  size_t vertex_count() const { return vertices_.size(); }
  size_t edge_count() const { return edges_.size(); }
  bool empty() const { return vertices_.empty(); }

  int degree(int id) const;
  // neighbor ids, ascending
  std::vector<int> neighbors(int id) const;

  // canonical JSON: vertices sorted by id, edges smaller-id-first, sorted
  std::string to_json() const;
  static BoundaryGraph from_json(const std::string& text);
  void save(const std::string& path) const;
  static BoundaryGraph load(const std::string& path);

 private:
  std::vector<GraphVertex> vertices_;
  std::vector<std::pair<int, int>> edges_;
  std::unordered_map<int, size_t> index_;
  std::unordered_set<std::uint64_t> edge_keys_;
  int next_id_ = 0;
};

// Maximal open chains and pure cycles of the graph, split at vertices of
// degree != 2. Deterministic: walks start from ascending vertex ids.
struct Polyline {
  std::vector<Point> pts;
  bool closed = false;
  double length() const;
};
std::vector<Polyline> decompose_polylines(const BoundaryGraph& graph);

class PatchFrame;  // tiling.hpp

// Binary raster of all edge segments clipped to the rect: pixel (x,y) is set
// iff the frame point it samples lies within thickness/2 of some segment.
RasterMap rasterize_graph(const BoundaryGraph& graph, const Rect& rect, double thickness);
RasterMap rasterize_graph(const BoundaryGraph& graph, const PatchFrame& frame, double thickness);

// Sum of Euclidean edge lengths along the minimal path; nullopt if
// disconnected. Throws on unknown ids.
std::optional<double> shortest_path_length(const BoundaryGraph& graph, int a, int b);

// Nearest vertex within radius; ties by smallest id; nullopt if none.
std::optional<int> snap_vertex(const BoundaryGraph& graph, Point p, double radius);

// Keep the part of the graph inside rect, inserting vertices where edges
// cross the rect boundary.
BoundaryGraph clip_graph(const BoundaryGraph& graph, const Rect& rect);

// Repeated-source shortest paths over one graph; caches the adjacency.
class ShortestPathEngine {
 public:
  explicit ShortestPathEngine(const BoundaryGraph& graph);
  std::optional<double> distance(int a, int b) const;
  // component label per vertex index, and the id list per component
  const std::vector<int>& component_of() const { return component_; }
  const std::vector<std::vector<int>>& components() const { return component_ids_; }
  int index_of(int id) const;

 private:
  const BoundaryGraph& graph_;
  std::unordered_map<int, int> id_to_index_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
  std::vector<int> component_;
  std::vector<std::vector<int>> component_ids_;
};

}  // namespace curbgraph
