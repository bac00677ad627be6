#include "curbgraph/vertex_extract.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "curbgraph/raster_ops.hpp"

namespace curbgraph {

namespace {

struct PixelLess {
  bool operator()(PixelCoord a, PixelCoord b) const {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  }
};

using PixelKey = std::int64_t;
PixelKey key_of(PixelCoord p) {
  return (static_cast<std::int64_t>(p.y) << 32) | static_cast<std::uint32_t>(p.x);
}
PixelCoord coord_of(PixelKey k) {
  return {static_cast<int>(k & 0xffffffff), static_cast<int>(k >> 32)};
}

std::vector<PixelCoord> neighbors_in(const PixelCoord& p,
                                     const std::map<PixelKey, int>& pixset) {
  std::vector<PixelCoord> out;
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      PixelCoord q{p.x + dx, p.y + dy};
      if (pixset.count(key_of(q))) out.push_back(q);
    }
  return out;
}

// 0->1 transitions around the 8-ring. Grazing staircase corners have 3 raw
// neighbors but crossing number 2; only crossing number >= 3 is a real
// junction of the skeleton.
int crossing_number(const PixelCoord& p, const std::map<PixelKey, int>& pixset) {
  static constexpr int ring_dx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
  static constexpr int ring_dy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
  int a = 0;
  for (int k = 0; k < 8; ++k) {
    bool cur = pixset.count(key_of({p.x + ring_dx[k], p.y + ring_dy[k]})) != 0;
    bool nxt = pixset.count(
                   key_of({p.x + ring_dx[(k + 1) % 8], p.y + ring_dy[(k + 1) % 8]})) != 0;
    if (!cur && nxt) ++a;
  }
  return a;
}

// walk a simple arc (every pixel has <= 2 neighbors in pixset) from `start`
std::vector<PixelCoord> trace_arc(PixelCoord start, const std::map<PixelKey, int>& pixset) {
  std::vector<PixelCoord> path;
  std::map<PixelKey, int> visited;
  PixelCoord cur = start;
  visited[key_of(cur)] = 1;
  while (true) {
    path.push_back(cur);
    bool found = false;
    for (const auto& q : neighbors_in(cur, pixset)) {
      if (visited.count(key_of(q))) continue;
      visited[key_of(q)] = 1;
      cur = q;
      found = true;
      break;
    }
    if (!found) break;
  }
  return path;
}

}  // namespace

ExtractedVertices extract_vertices(const RasterMap& keypoint_map,
                                   const ExtractParams& params, const PatchFrame& frame) {
  if (keypoint_map.channels != 1)
    throw std::invalid_argument("extract_vertices: single channel expected");
  RasterMap skel = skeletonize(binarize(keypoint_map, params.binarize_threshold));
  auto components = connected_components(skel, 8);

  Point origin = frame.expanded_origin();
  auto to_global = [&](PixelCoord p) {
    return Point{origin.x + p.x, origin.y + p.y};
  };

  struct RawConnector {
    int a = 0, b = 0;  // indices into raw_vertices
    std::vector<Point> polyline;
  };
  std::vector<Point> raw_vertices;
  std::vector<RawConnector> raw_connectors;
  int branch_splits = 0;

  auto emit_isolated = [&](const PixelSet& comp) {
    double cx = 0.0, cy = 0.0;
    for (const auto& p : comp) {
      cx += p.x;
      cy += p.y;
    }
    cx /= static_cast<double>(comp.size());
    cy /= static_cast<double>(comp.size());
    PixelCoord best = comp.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& p : comp) {
      double d = (p.x - cx) * (p.x - cx) + (p.y - cy) * (p.y - cy);
      if (d < best_d) {
        best_d = d;
        best = p;
      }
    }
    raw_vertices.push_back(to_global(best));
  };

  auto emit_arc = [&](const std::vector<PixelCoord>& path) {
    if (path.size() < 2) {
      if (!path.empty()) raw_vertices.push_back(to_global(path.front()));
      return;
    }
    RawConnector rc;
    rc.a = static_cast<int>(raw_vertices.size());
    raw_vertices.push_back(to_global(path.front()));
    rc.b = static_cast<int>(raw_vertices.size());
    raw_vertices.push_back(to_global(path.back()));
    rc.polyline.reserve(path.size());
    for (const auto& p : path) rc.polyline.push_back(to_global(p));
    raw_connectors.push_back(std::move(rc));
  };

  for (const auto& comp : components) {
    if (static_cast<int>(comp.size()) <= params.short_skeleton_len) {
      emit_isolated(comp);
      continue;
    }
    std::map<PixelKey, int> pixset;
    for (const auto& p : comp) pixset[key_of(p)] = 1;

    std::vector<PixelCoord> endpoints, branches;
    for (const auto& p : comp) {
      size_t n = neighbors_in(p, pixset).size();
      if (n <= 1) endpoints.push_back(p);
      if (n >= 3) branches.push_back(p);
    }

    if (endpoints.size() == 2 && branches.empty()) {
      emit_arc(trace_arc(endpoints.front(), pixset));
      continue;
    }

    ++branch_splits;
    if (!branches.empty()) {
      for (const auto& p : branches) pixset.erase(key_of(p));
    } else {
      // a pure ring: cut it at its smallest (y,x) pixel
      pixset.erase(key_of(comp.front()));
    }
    // regroup the remaining pixels into simple arcs and trace each
    std::map<PixelKey, int> remaining = pixset;
    while (!remaining.empty()) {
      PixelCoord seed = coord_of(remaining.begin()->first);
      std::vector<PixelCoord> stack{seed}, arc;
      std::map<PixelKey, int> arcset;
      remaining.erase(key_of(seed));
      arcset[key_of(seed)] = 1;
      while (!stack.empty()) {
        PixelCoord p = stack.back();
        stack.pop_back();
        arc.push_back(p);
        for (const auto& q : neighbors_in(p, pixset)) {
          if (!remaining.count(key_of(q))) continue;
          remaining.erase(key_of(q));
          arcset[key_of(q)] = 1;
          stack.push_back(q);
        }
      }
      std::sort(arc.begin(), arc.end(), PixelLess{});
      PixelCoord start = arc.front();
      for (const auto& p : arc)
        if (neighbors_in(p, arcset).size() <= 1) {
          start = p;
          break;
        }
      emit_arc(trace_arc(start, arcset));
    }
  }

  // dedup within 1 px; (y,x) order decides which representative survives and
  // fixes the final vertex ordering
  std::vector<size_t> order(raw_vertices.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const Point& pa = raw_vertices[a];
    const Point& pb = raw_vertices[b];
    if (pa.y != pb.y) return pa.y < pb.y;
    if (pa.x != pb.x) return pa.x < pb.x;
    return a < b;
  });

  ExtractedVertices out;
  out.branch_splits = branch_splits;
  std::vector<int> remap(raw_vertices.size(), -1);
  for (size_t oi : order) {
    const Point& p = raw_vertices[oi];
    int found = -1;
    for (size_t j = 0; j < out.vertices.size(); ++j)
      if (dist(out.vertices[j], p) < 1.0) {
        found = static_cast<int>(j);
        break;
      }
    if (found < 0) {
      found = static_cast<int>(out.vertices.size());
      out.vertices.push_back(p);
    }
    remap[oi] = found;
  }

  for (auto& rc : raw_connectors) {
    ExtractedVertices::Connector c;
    c.a = remap[rc.a];
    c.b = remap[rc.b];
    c.polyline = std::move(rc.polyline);
    out.connectors.push_back(std::move(c));
  }
  return out;
}

std::string extraction_to_json(const ExtractedVertices& ev) {
  nlohmann::ordered_json doc;
  doc["vertices"] = nlohmann::ordered_json::array();
  for (const auto& v : ev.vertices) doc["vertices"].push_back({v.x, v.y});
  doc["connectors"] = nlohmann::ordered_json::array();
  for (const auto& c : ev.connectors) {
    nlohmann::ordered_json jc;
    jc["a"] = c.a;
    jc["b"] = c.b;
    jc["polyline"] = nlohmann::ordered_json::array();
    for (const auto& p : c.polyline) jc["polyline"].push_back({p.x, p.y});
    doc["connectors"].push_back(std::move(jc));
  }
  doc["branch_splits"] = ev.branch_splits;
  return doc.dump();
}

ExtractedVertices extraction_from_json(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text);
  ExtractedVertices ev;
  for (const auto& v : doc.at("vertices"))
    ev.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
  for (const auto& c : doc.at("connectors")) {
    ExtractedVertices::Connector conn;
    conn.a = c.at("a").get<int>();
    conn.b = c.at("b").get<int>();
    for (const auto& p : c.at("polyline"))
      conn.polyline.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    ev.connectors.push_back(std::move(conn));
  }
  ev.branch_splits = doc.value("branch_splits", 0);
  return ev;
}

}  // namespace curbgraph
