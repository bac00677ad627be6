#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "curbgraph/keypoints.hpp"
#include "curbgraph/raster_ops.hpp"
#include "curbgraph/rng.hpp"
#include "curbgraph/vertex_extract.hpp"

using namespace curbgraph;

namespace {

PatchFrame unit_frame(int size) { return PatchFrame(0, 0, 0, 0, Point{0, 0}, size, 0); }

}  // namespace

TEST_CASE("single gaussian becomes one vertex at its center") {
  PatchFrame f = unit_frame(64);
  RasterMap m = render_gaussian_points({{31, 30}}, 3.0, 64, 64);
  auto ev = extract_vertices(m, ExtractParams{}, f);
  REQUIRE(ev.vertices.size() == 1);
  CHECK(ev.connectors.empty());
  CHECK(dist(ev.vertices[0], {31, 30}) <= 1.0);
}

TEST_CASE("all-zero map extracts nothing") {
  auto ev = extract_vertices(RasterMap(32, 32, 1), ExtractParams{}, unit_frame(32));
  CHECK(ev.vertices.empty());
  CHECK(ev.connectors.empty());
}

TEST_CASE("rounded corner arc becomes two endpoints plus a connector") {
  PatchFrame f = unit_frame(128);
  // 40 px quarter-circle of rounded-corner keypoints at 1 px spacing
  double radius = 40.0;
  Point center{60.0, 60.0};
  std::vector<Point> run;
  double arc_len = radius * M_PI / 2.0;
  int n = static_cast<int>(arc_len);
  for (int i = 0; i <= n; ++i) {
    double a = -M_PI / 2.0 + (M_PI / 2.0) * i / n;
    run.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  }
  RasterMap m = render_gaussian_points(run, 3.0, 128, 128);
  auto ev = extract_vertices(m, ExtractParams{}, f);
  REQUIRE(ev.vertices.size() == 2);
  REQUIRE(ev.connectors.size() == 1);
  // endpoints near the arc ends
  Point end_a{center.x, center.y - radius};
  Point end_b{center.x + radius, center.y};
  double d0a = dist(ev.vertices[0], end_a);
  double d0b = dist(ev.vertices[0], end_b);
  CHECK(std::min(d0a, d0b) < 6.0);
  // polyline length close to the arc length
  const auto& pl = ev.connectors[0].polyline;
  double len = 0.0;
  for (size_t i = 1; i < pl.size(); ++i) len += dist(pl[i - 1], pl[i]);
  CHECK(len == doctest::Approx(arc_len).epsilon(0.15));
  CHECK(ev.connectors[0].a != ev.connectors[0].b);
}

TEST_CASE("well separated keypoints are recovered exactly") {
  PatchFrame f(0, 0, 0, 0, Point{200, 100}, 200, 10);
  std::vector<Keypoint> kps;
  std::vector<Point> gens{{230, 130}, {300, 140}, {360, 180}, {250, 250}, {330, 260}};
  for (const auto& p : gens) kps.push_back({p, KeypointKind::corner_isolated});
  RasterMap m = keypoint_label_map(kps, f, 3.0);
  auto ev = extract_vertices(m, ExtractParams{}, f);
  REQUIRE(ev.vertices.size() == gens.size());
  for (const auto& g : gens) {
    double best = 1e9;
    for (const auto& v : ev.vertices) best = std::min(best, dist(v, g));
    CHECK(best <= 2.0);
  }
}

TEST_CASE("vertices are sorted by (y,x) and deduplicated") {
  PatchFrame f = unit_frame(96);
  RasterMap m = render_gaussian_points({{70, 20}, {20, 20}, {45, 60}}, 3.0, 96, 96);
  auto ev = extract_vertices(m, ExtractParams{}, f);
  REQUIRE(ev.vertices.size() == 3);
  for (size_t i = 1; i < ev.vertices.size(); ++i) {
    const Point& a = ev.vertices[i - 1];
    const Point& b = ev.vertices[i];
    CHECK((a.y < b.y || (a.y == b.y && a.x < b.x)));
  }
  for (size_t i = 0; i < ev.vertices.size(); ++i)
    for (size_t j = i + 1; j < ev.vertices.size(); ++j)
      CHECK(dist(ev.vertices[i], ev.vertices[j]) >= 1.0);
}

TEST_CASE("branching skeleton splits into simple arcs") {
  PatchFrame f = unit_frame(96);
  // a T shape: three line segments of gaussians meeting at (48,48)
  std::vector<Point> pts;
  for (int i = 0; i <= 30; ++i) {
    pts.push_back({18.0 + i, 48.0});            // west arm
    pts.push_back({48.0 + i, 48.0});            // east arm
    pts.push_back({48.0, 48.0 + i});            // south arm
  }
  RasterMap m = render_gaussian_points(pts, 2.0, 96, 96);
  auto ev = extract_vertices(m, ExtractParams{0.3f, 5}, f);
  CHECK(ev.branch_splits >= 1);
  CHECK(ev.vertices.size() >= 3);
  // every connector endpoint is a valid vertex index
  for (const auto& c : ev.connectors) {
    CHECK(c.a >= 0);
    CHECK(c.b >= 0);
    CHECK(c.a < static_cast<int>(ev.vertices.size()));
    CHECK(c.b < static_cast<int>(ev.vertices.size()));
  }
}

TEST_CASE("M counts isolated plus twice rounded components") {
  PatchFrame f = unit_frame(140);
  std::vector<Point> pts{{20, 20}, {120, 18}};  // two isolated
  // one rounded run
  for (int i = 0; i <= 40; ++i) pts.push_back({40.0 + i, 90.0});
  RasterMap m = render_gaussian_points(pts, 3.0, 140, 140);
  auto ev = extract_vertices(m, ExtractParams{}, f);
  CHECK(ev.connectors.size() == 1);
  CHECK(ev.vertices.size() == 2 + 2 * ev.connectors.size());
}

TEST_CASE("extraction json round trip") {
  ExtractedVertices ev;
  ev.vertices = {{1, 2}, {3, 4}};
  ev.connectors.push_back({0, 1, {{1, 2}, {2, 3}, {3, 4}}});
  ev.branch_splits = 2;
  auto back = extraction_from_json(extraction_to_json(ev));
  CHECK(back.vertices.size() == 2);
  REQUIRE(back.connectors.size() == 1);
  CHECK(back.connectors[0].polyline.size() == 3);
  CHECK(back.branch_splits == 2);
}

TEST_CASE("multi channel input is rejected") {
  CHECK_THROWS(extract_vertices(RasterMap(8, 8, 2), ExtractParams{}, unit_frame(8)));
}
