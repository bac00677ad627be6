#include "curbgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "curbgraph/tiling.hpp"

namespace curbgraph {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(b));
}

}  // namespace

int BoundaryGraph::add_vertex(double x, double y) {
  int id = next_id_++;
  add_vertex_with_id(id, x, y);
  return id;
}

void BoundaryGraph::add_vertex_with_id(int id, double x, double y) {
  if (index_.count(id)) throw std::invalid_argument("graph: duplicate vertex id");
  index_[id] = vertices_.size();
  vertices_.push_back({id, x, y});
  if (id >= next_id_) next_id_ = id + 1;
}

bool BoundaryGraph::add_edge(int a, int b) {
  if (!has_vertex(a) || !has_vertex(b))
    throw std::invalid_argument("graph: edge endpoint does not exist");
  if (a == b) return false;
  if (a > b) std::swap(a, b);
  if (!edge_keys_.insert(edge_key(a, b)).second) return false;
  edges_.emplace_back(a, b);
  return true;
}

const GraphVertex& BoundaryGraph::vertex(int id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::invalid_argument("graph: unknown vertex id");
  return vertices_[it->second];
}

int BoundaryGraph::degree(int id) const {
  int d = 0;
  for (const auto& [a, b] : edges_)
    if (a == id || b == id) ++d;
  return d;
}

std::vector<int> BoundaryGraph::neighbors(int id) const {
  std::vector<int> out;
  for (const auto& [a, b] : edges_) {
    if (a == id) out.push_back(b);
    if (b == id) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string BoundaryGraph::to_json() const {
  nlohmann::ordered_json doc;
  auto verts = vertices_;
  std::sort(verts.begin(), verts.end(),
            [](const GraphVertex& a, const GraphVertex& b) { return a.id < b.id; });
  doc["vertices"] = nlohmann::ordered_json::array();
  for (const auto& v : verts)
    doc["vertices"].push_back({{"id", v.id}, {"x", v.x}, {"y", v.y}});
  auto edges = edges_;
  std::sort(edges.begin(), edges.end());
  doc["edges"] = nlohmann::ordered_json::array();
  for (const auto& [a, b] : edges) doc["edges"].push_back({a, b});
  return doc.dump();
}

BoundaryGraph BoundaryGraph::from_json(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text);
  BoundaryGraph g;
  for (const auto& v : doc.at("vertices"))
    g.add_vertex_with_id(v.at("id").get<int>(), v.at("x").get<double>(),
                         v.at("y").get<double>());
  for (const auto& e : doc.at("edges")) g.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
  return g;
}

void BoundaryGraph::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("graph: cannot open " + path);
  os << to_json() << "\n";
}

BoundaryGraph BoundaryGraph::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("graph: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return from_json(ss.str());
}

double Polyline::length() const {
  double len = 0.0;
  for (size_t i = 1; i < pts.size(); ++i) len += dist(pts[i - 1], pts[i]);
  if (closed && pts.size() > 2) len += dist(pts.back(), pts.front());
  return len;
}

std::vector<Polyline> decompose_polylines(const BoundaryGraph& graph) {
  // index-based adjacency for the walk
  std::unordered_map<int, std::vector<int>> adj;
  for (const auto& [a, b] : graph.edges()) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& [id, nbrs] : adj) std::sort(nbrs.begin(), nbrs.end());

  std::unordered_set<std::uint64_t> used;
  auto take = [&](int a, int b) { return used.insert(edge_key(a, b)).second; };

  std::vector<int> ids;
  ids.reserve(graph.vertices().size());
  for (const auto& v : graph.vertices()) ids.push_back(v.id);
  std::sort(ids.begin(), ids.end());

  std::vector<Polyline> out;
  auto walk = [&](int start, int first) {
    Polyline pl;
    pl.pts.push_back(graph.vertex(start).pos());
    int prev = start, cur = first;
    while (true) {
      pl.pts.push_back(graph.vertex(cur).pos());
      if (adj[cur].size() != 2) break;  // junction or endpoint terminates the chain
      int next = adj[cur][0] == prev ? adj[cur][1] : adj[cur][0];
      if (!take(cur, next)) break;
      prev = cur;
      cur = next;
    }
    return pl;
  };

  // open chains start at vertices of degree != 2
  for (int id : ids) {
    auto it = adj.find(id);
    if (it == adj.end() || it->second.size() == 2) continue;
    for (int nbr : it->second) {
      if (!take(id, nbr)) continue;
      out.push_back(walk(id, nbr));
    }
  }
  // remaining edges belong to pure cycles
  for (int id : ids) {
    auto it = adj.find(id);
    if (it == adj.end()) continue;
    for (int nbr : it->second) {
      if (!take(id, nbr)) continue;
      Polyline pl = walk(id, nbr);
      // the walk returns to the start; drop the duplicate closing point
      if (pl.pts.size() > 1) pl.pts.pop_back();
      pl.closed = true;
      out.push_back(pl);
    }
  }
  return out;
}

RasterMap rasterize_graph(const BoundaryGraph& graph, const Rect& rect, double thickness) {
  if (thickness < 1.0) throw std::invalid_argument("rasterize: thickness must be >= 1");
  if (rect.empty()) throw std::invalid_argument("rasterize: frame must have positive area");
  int w = static_cast<int>(std::lround(rect.width()));
  int h = static_cast<int>(std::lround(rect.height()));
  RasterMap map(w, h, 1);
  double r = thickness / 2.0;
  for (const auto& [ia, ib] : graph.edges()) {
    Point a = graph.vertex(ia).pos() - Point{rect.x0, rect.y0};
    Point b = graph.vertex(ib).pos() - Point{rect.x0, rect.y0};
    int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - r)));
    int x1 = std::min(w - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + r)));
    int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - r)));
    int y1 = std::min(h - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + r)));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x)
        if (dist_point_segment({static_cast<double>(x), static_cast<double>(y)}, a, b) <= r)
          map.at(x, y) = 1.0f;
  }
  return map;
}

RasterMap rasterize_graph(const BoundaryGraph& graph, const PatchFrame& frame,
                          double thickness) {
  return rasterize_graph(graph, frame.expanded_rect(), thickness);
}

ShortestPathEngine::ShortestPathEngine(const BoundaryGraph& graph) : graph_(graph) {
  const auto& verts = graph.vertices();
  adj_.resize(verts.size());
  for (size_t i = 0; i < verts.size(); ++i) id_to_index_[verts[i].id] = static_cast<int>(i);
  for (const auto& [a, b] : graph.edges()) {
    int ia = id_to_index_.at(a), ib = id_to_index_.at(b);
    double len = dist(verts[ia].pos(), verts[ib].pos());
    adj_[ia].emplace_back(ib, len);
    adj_[ib].emplace_back(ia, len);
  }
  component_.assign(verts.size(), -1);
  for (size_t i = 0; i < verts.size(); ++i) {
    if (component_[i] != -1) continue;
    int label = static_cast<int>(component_ids_.size());
    component_ids_.emplace_back();
    std::vector<int> stack{static_cast<int>(i)};
    component_[i] = label;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      component_ids_[label].push_back(verts[u].id);
      for (const auto& [v, w] : adj_[u]) {
        if (component_[v] == -1) {
          component_[v] = label;
          stack.push_back(v);
        }
      }
    }
  }
  for (auto& ids : component_ids_) std::sort(ids.begin(), ids.end());
}

int ShortestPathEngine::index_of(int id) const {
  auto it = id_to_index_.find(id);
  if (it == id_to_index_.end()) throw std::invalid_argument("graph: unknown vertex id");
  return it->second;
}

std::optional<double> ShortestPathEngine::distance(int a, int b) const {
  int src = index_of(a), dst = index_of(b);
  if (src == dst) return 0.0;
  if (component_[src] != component_[dst]) return std::nullopt;
  std::vector<double> d(adj_.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  d[src] = 0.0;
  heap.emplace(0.0, src);
  while (!heap.empty()) {
    auto [du, u] = heap.top();
    heap.pop();
    if (du > d[u]) continue;
    if (u == dst) return du;
    for (const auto& [v, w] : adj_[u]) {
      double nd = du + w;
      if (nd < d[v]) {
        d[v] = nd;
        heap.emplace(nd, v);
      }
    }
  }
  return std::nullopt;  // unreachable given the component check
}

std::optional<double> shortest_path_length(const BoundaryGraph& graph, int a, int b) {
  ShortestPathEngine engine(graph);
  return engine.distance(a, b);
}

std::optional<int> snap_vertex(const BoundaryGraph& graph, Point p, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("snap_vertex: radius must be positive");
  std::optional<int> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& v : graph.vertices()) {
    double d = dist(v.pos(), p);
    if (d > radius) continue;
    if (d < best_d || (d == best_d && best && v.id < *best)) {
      best_d = d;
      best = v.id;
    }
  }
  return best;
}

BoundaryGraph clip_graph(const BoundaryGraph& graph, const Rect& rect) {
  BoundaryGraph out;
  std::unordered_map<int, int> id_map;
  auto get_vertex = [&](Point p, int src_id) {
    if (src_id >= 0) {
      auto it = id_map.find(src_id);
      if (it != id_map.end()) return it->second;
      int nid = out.add_vertex(p.x, p.y);
      id_map[src_id] = nid;
      return nid;
    }
    return out.add_vertex(p.x, p.y);
  };
  for (const auto& [ia, ib] : graph.edges()) {
    Point a = graph.vertex(ia).pos();
    Point b = graph.vertex(ib).pos();
    bool a_in = rect.contains(a), b_in = rect.contains(b);
    if (a_in && b_in) {
      out.add_edge(get_vertex(a, ia), get_vertex(b, ib));
      continue;
    }
    // Liang-Barsky clip of the segment against the rect
    double t0 = 0.0, t1 = 1.0;
    double dx = b.x - a.x, dy = b.y - a.y;
    auto clip = [&](double p, double q) {
      if (p == 0.0) return q >= 0.0;
      double t = q / p;
      if (p < 0.0) {
        if (t > t1) return false;
        if (t > t0) t0 = t;
      } else {
        if (t < t0) return false;
        if (t < t1) t1 = t;
      }
      return true;
    };
    if (!clip(-dx, a.x - rect.x0) || !clip(dx, rect.x1 - a.x) ||
        !clip(-dy, a.y - rect.y0) || !clip(dy, rect.y1 - a.y))
      continue;
    if (t0 >= t1) continue;
    Point ca{a.x + t0 * dx, a.y + t0 * dy};
    Point cb{a.x + t1 * dx, a.y + t1 * dy};
    int va = t0 == 0.0 && a_in ? get_vertex(a, ia) : get_vertex(ca, -1);
    int vb = t1 == 1.0 && b_in ? get_vertex(b, ib) : get_vertex(cb, -1);
    if (va != vb) out.add_edge(va, vb);
  }
  return out;
}

}  // namespace curbgraph
