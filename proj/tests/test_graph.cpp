#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "curbgraph/graph.hpp"
#include "curbgraph/rng.hpp"
#include "curbgraph/tiling.hpp"
#include "oracles.hpp"

using namespace curbgraph;

namespace {

BoundaryGraph random_graph(Rng& rng, int n_vertices, double edge_prob, double extent) {
  BoundaryGraph g;
  for (int i = 0; i < n_vertices; ++i)
    g.add_vertex(rng.uniform(0.0, extent), rng.uniform(0.0, extent));
  for (int a = 0; a < n_vertices; ++a)
    for (int b = a + 1; b < n_vertices; ++b)
      if (rng.bernoulli(edge_prob)) g.add_edge(a, b);
  return g;
}

oracle::SimpleGraph to_oracle(const BoundaryGraph& g) {
  oracle::SimpleGraph og;
  for (const auto& v : g.vertices()) og.pos.emplace_back(v.x, v.y);
  og.edges = g.edges();
  return og;
}

}  // namespace

TEST_CASE("graph invariants") {
  BoundaryGraph g;
  int a = g.add_vertex(0, 0);
  int b = g.add_vertex(3, 4);
  CHECK(g.add_edge(a, b));
  CHECK_FALSE(g.add_edge(b, a));    // duplicate, unordered
  CHECK_FALSE(g.add_edge(a, a));    // self loop ignored
  CHECK(g.edge_count() == 1);
  CHECK_THROWS(g.add_edge(a, 99));
  CHECK_THROWS(g.add_vertex_with_id(a, 1, 1));
}

TEST_CASE("graph json round trip is canonical") {
  BoundaryGraph g;
  g.add_vertex_with_id(5, 1.5, 2.5);
  g.add_vertex_with_id(1, 0.0, 0.0);
  g.add_vertex_with_id(3, 7.0, 1.0);
  g.add_edge(5, 1);
  g.add_edge(3, 5);
  std::string text = g.to_json();
  // vertices ascending by id, edges smaller-first and sorted
  CHECK(text.find("\"id\":1") < text.find("\"id\":3"));
  CHECK(text.find("\"id\":3") < text.find("\"id\":5"));
  CHECK(text.find("[1,5]") != std::string::npos);
  CHECK(text.find("[3,5]") != std::string::npos);
  BoundaryGraph g2 = BoundaryGraph::from_json(text);
  CHECK(g2.to_json() == text);
}

TEST_CASE("rasterize axis-aligned segment") {
  BoundaryGraph g;
  int a = g.add_vertex(0, 5), b = g.add_vertex(10, 5);
  g.add_edge(a, b);
  RasterMap m = rasterize_graph(g, Rect{0, 0, 11, 11}, 1.0);
  for (int y = 0; y < 11; ++y)
    for (int x = 0; x < 11; ++x) CHECK(m.at(x, y) == (y == 5 ? 1.0f : 0.0f));
}

TEST_CASE("rasterize empty graph") {
  RasterMap m = rasterize_graph(BoundaryGraph{}, Rect{0, 0, 16, 16}, 3.0);
  for (float v : m.data) CHECK(v == 0.0f);
}

TEST_CASE("rasterize diagonal matches brute-force distance oracle") {
  BoundaryGraph g;
  int a = g.add_vertex(0, 0), b = g.add_vertex(10, 10);
  g.add_edge(a, b);
  RasterMap m = rasterize_graph(g, Rect{0, 0, 12, 12}, 1.0);
  oracle::Grid ref = oracle::rasterize({{0, 0, 10, 10}}, 0, 0, 12, 12, 1.0);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 12; ++x) CHECK(m.at(x, y) == ref.at(x, y));
}

TEST_CASE("rasterize random graphs match the oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    BoundaryGraph g = random_graph(rng, 8, 0.3, 40.0);
    std::vector<oracle::Seg> segs;
    for (auto [a, b] : g.edges())
      segs.push_back({g.vertex(a).x, g.vertex(a).y, g.vertex(b).x, g.vertex(b).y});
    double thickness = 1.0 + 2.0 * rng.uniform();
    RasterMap m = rasterize_graph(g, Rect{0, 0, 48, 48}, thickness);
    oracle::Grid ref = oracle::rasterize(segs, 0, 0, 48, 48, thickness);
    for (int y = 0; y < 48; ++y)
      for (int x = 0; x < 48; ++x) REQUIRE(m.at(x, y) == ref.at(x, y));
  }
}

TEST_CASE("rasterize is translation equivariant") {
  Rng rng(7);
  BoundaryGraph g = random_graph(rng, 6, 0.4, 30.0);
  RasterMap m1 = rasterize_graph(g, Rect{0, 0, 40, 40}, 2.0);
  BoundaryGraph shifted;
  for (const auto& v : g.vertices()) shifted.add_vertex_with_id(v.id, v.x + 17, v.y - 9);
  for (auto [a, b] : g.edges()) shifted.add_edge(a, b);
  RasterMap m2 = rasterize_graph(shifted, Rect{17, -9, 57, 31}, 2.0);
  CHECK(m1.data == m2.data);
}

TEST_CASE("shortest path basics") {
  BoundaryGraph g;
  int a = g.add_vertex(0, 0), b = g.add_vertex(3, 4), c = g.add_vertex(3, 10);
  g.add_edge(a, b);
  g.add_edge(b, c);
  CHECK(*shortest_path_length(g, a, a) == 0.0);
  CHECK(*shortest_path_length(g, a, c) == doctest::Approx(11.0));
  int d = g.add_vertex(100, 100);
  CHECK_FALSE(shortest_path_length(g, a, d).has_value());
  CHECK_THROWS(shortest_path_length(g, a, 12345));
}

TEST_CASE("shortest path matches path enumeration oracle on random graphs") {
  Rng rng(23);
  for (int trial = 0; trial < 8; ++trial) {
    BoundaryGraph g = random_graph(rng, 10, 0.25, 100.0);
    oracle::SimpleGraph og = to_oracle(g);
    for (int q = 0; q < 10; ++q) {
      int a = static_cast<int>(rng.uniform_int(0, 9));
      int b = static_cast<int>(rng.uniform_int(0, 9));
      auto got = shortest_path_length(g, a, b);
      auto want = oracle::shortest_path_enumerate(og, a, b);
      REQUIRE(got.has_value() == want.has_value());
      if (got) REQUIRE(*got == doctest::Approx(*want).epsilon(1e-12));
    }
  }
}

TEST_CASE("shortest path symmetry and triangle inequality") {
  Rng rng(31);
  BoundaryGraph g = random_graph(rng, 12, 0.3, 50.0);
  for (int q = 0; q < 30; ++q) {
    int a = static_cast<int>(rng.uniform_int(0, 11));
    int b = static_cast<int>(rng.uniform_int(0, 11));
    int c = static_cast<int>(rng.uniform_int(0, 11));
    auto ab = shortest_path_length(g, a, b);
    auto ba = shortest_path_length(g, b, a);
    REQUIRE(ab.has_value() == ba.has_value());
    if (ab) CHECK(*ab == doctest::Approx(*ba));
    auto ac = shortest_path_length(g, a, c);
    auto cb = shortest_path_length(g, c, b);
    if (ab && ac && cb) CHECK(*ab <= *ac + *cb + 1e-9);
  }
}

TEST_CASE("snap vertex") {
  BoundaryGraph g;
  int a = g.add_vertex(10, 10);
  g.add_vertex(20, 10);
  CHECK(*snap_vertex(g, {10, 10}, 5.0) == a);
  CHECK_FALSE(snap_vertex(g, {100, 100}, 5.0).has_value());
  // equidistant pair: smaller id wins
  CHECK(*snap_vertex(g, {15, 10}, 10.0) == a);
  CHECK_THROWS(snap_vertex(g, {0, 0}, 0.0));
}

TEST_CASE("snap vertex agrees with linear scan on random input") {
  Rng rng(41);
  BoundaryGraph g = random_graph(rng, 25, 0.0, 60.0);
  for (int q = 0; q < 50; ++q) {
    curbgraph::Point p{rng.uniform(0.0, 60.0), rng.uniform(0.0, 60.0)};
    auto got = snap_vertex(g, p, 15.0);
    if (!got) continue;
    double got_d = dist(g.vertex(*got).pos(), p);
    for (const auto& v : g.vertices())
      CHECK(got_d <= dist(v.pos(), p) + 1e-12);
  }
}

TEST_CASE("polyline decomposition walks chains and cycles") {
  BoundaryGraph g;
  // open chain 0-1-2 and a 4-cycle 3-4-5-6
  g.add_vertex(0, 0);
  g.add_vertex(1, 0);
  g.add_vertex(2, 0);
  g.add_vertex(10, 10);
  g.add_vertex(12, 10);
  g.add_vertex(12, 12);
  g.add_vertex(10, 12);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(3, 4);
  g.add_edge(4, 5);
  g.add_edge(5, 6);
  g.add_edge(6, 3);
  auto lines = decompose_polylines(g);
  REQUIRE(lines.size() == 2);
  CHECK_FALSE(lines[0].closed);
  CHECK(lines[0].pts.size() == 3);
  CHECK(lines[1].closed);
  CHECK(lines[1].pts.size() == 4);
  CHECK(lines[1].length() == doctest::Approx(8.0));
}

TEST_CASE("clip graph inserts boundary crossings") {
  BoundaryGraph g;
  int a = g.add_vertex(-5, 5), b = g.add_vertex(15, 5);
  g.add_edge(a, b);
  BoundaryGraph c = clip_graph(g, Rect{0, 0, 10, 10});
  REQUIRE(c.vertex_count() == 2);
  REQUIRE(c.edge_count() == 1);
  auto verts = c.vertices();
  CHECK(verts[0].x == doctest::Approx(0.0));
  CHECK(verts[1].x == doctest::Approx(10.0));
}
