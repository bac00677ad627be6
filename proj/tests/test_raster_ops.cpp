#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "curbgraph/raster_ops.hpp"
#include "curbgraph/rng.hpp"
#include "curbgraph/tiling.hpp"
#include "oracles.hpp"

using namespace curbgraph;

namespace {

oracle::Grid to_oracle(const RasterMap& m) {
  return {m.width, m.height, m.data};
}

RasterMap random_blobs(Rng& rng, int w, int h, int n_blobs) {
  std::vector<Point> centers;
  for (int i = 0; i < n_blobs; ++i)
    centers.push_back({rng.uniform(2.0, w - 2.0), rng.uniform(2.0, h - 2.0)});
  RasterMap m = render_gaussian_points(centers, 1.5 + rng.uniform(), w, h);
  return binarize(m, 0.35f);
}

int foreground_count(const RasterMap& m) {
  int n = 0;
  for (float v : m.data) n += v != 0.0f ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("skeletonize trivial inputs") {
  RasterMap zero(9, 9, 1);
  CHECK(skeletonize(zero).data == zero.data);

  RasterMap single(9, 9, 1);
  single.at(4, 4) = 1.0f;
  CHECK(skeletonize(single).data == single.data);

  RasterMap multi(4, 4, 2);
  CHECK_THROWS(skeletonize(multi));
  RasterMap gray(4, 4, 1, 0.5f);
  CHECK_THROWS(skeletonize(gray));
}

TEST_CASE("skeleton of a 3x9 bar is its middle row") {
  RasterMap bar(9, 3, 1);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 9; ++x) bar.at(x, y) = 1.0f;
  RasterMap skel = skeletonize(bar);
  oracle::Grid ref = oracle::thin(to_oracle(bar));

  // both must be thin, middle-row shaped, and topology preserving
  for (int x = 0; x < 9; ++x) {
    CHECK(skel.at(x, 0) == 0.0f);
    CHECK(skel.at(x, 2) == 0.0f);
  }
  int count = foreground_count(skel);
  CHECK(count >= 5);
  CHECK(oracle::component_count(to_oracle(skel), 8) == 1);
  CHECK(oracle::component_count(ref, 8) == 1);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 9; ++x)
      if (skel.at(x, y) != 0.0f) CHECK(bar.at(x, y) == 1.0f);  // subset of input
  // within 1 px of the independent thinning oracle in both directions
  auto near_any = [](const oracle::Grid& a, int x, int y) {
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        int nx = x + dx, ny = y + dy;
        if (nx >= 0 && nx < a.w && ny >= 0 && ny < a.h && a.at(nx, ny) != 0.0f) return true;
      }
    return false;
  };
  oracle::Grid mine = to_oracle(skel);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 9; ++x) {
      if (skel.at(x, y) != 0.0f) CHECK(near_any(ref, x, y));
      if (ref.at(x, y) != 0.0f) CHECK(near_any(mine, x, y));
    }
}

TEST_CASE("skeletonize is idempotent and preserves components on random blobs") {
  Rng rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    RasterMap blobs = random_blobs(rng, 32, 32, 1 + trial % 5);
    RasterMap s1 = skeletonize(blobs);
    RasterMap s2 = skeletonize(s1);
    CHECK(s1.data == s2.data);
    CHECK(oracle::component_count(to_oracle(blobs), 8) ==
          oracle::component_count(to_oracle(s1), 8));
    for (size_t i = 0; i < s1.data.size(); ++i)
      if (s1.data[i] != 0.0f) CHECK(blobs.data[i] != 0.0f);
  }
}

TEST_CASE("connected components basics and flood-fill oracle") {
  RasterMap m(8, 8, 1);
  CHECK(connected_components(m, 8).empty());
  m.at(1, 1) = 1.0f;
  m.at(6, 6) = 1.0f;
  auto comps = connected_components(m, 8);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].front() == PixelCoord{1, 1});  // ordered by smallest (y,x)
  CHECK(comps[1].front() == PixelCoord{6, 6});

  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    RasterMap blobs = random_blobs(rng, 32, 32, 4);
    for (int connectivity : {4, 8}) {
      auto got = connected_components(blobs, connectivity);
      auto want = oracle::components(to_oracle(blobs), connectivity);
      REQUIRE(got.size() == want.size());
      size_t total = 0;
      for (const auto& c : got) total += c.size();
      size_t want_total = 0;
      for (const auto& c : want) want_total += c.size();
      CHECK(total == want_total);
    }
  }
}

TEST_CASE("diagonal pixels: connectivity 4 vs 8") {
  RasterMap m(4, 4, 1);
  m.at(1, 1) = 1.0f;
  m.at(2, 2) = 1.0f;
  CHECK(connected_components(m, 8).size() == 1);
  CHECK(connected_components(m, 4).size() == 2);
}

TEST_CASE("local peaks on gaussian bumps") {
  RasterMap one = render_gaussian_points({{10, 12}}, 2.0, 24, 24);
  for (auto& v : one.data) v *= 0.9f;
  auto peaks = local_peaks(one, 0.3f, 5);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0] == PixelCoord{10, 12});

  RasterMap flat(16, 16, 1, 0.1f);
  CHECK(local_peaks(flat, 0.3f, 3).empty());
}

TEST_CASE("two close bumps: only the higher survives nms") {
  RasterMap a = render_gaussian_points({{10, 10}}, 1.5, 24, 24);
  RasterMap b = render_gaussian_points({{13, 10}}, 1.5, 24, 24);
  RasterMap m(24, 24, 1);
  for (size_t i = 0; i < m.data.size(); ++i)
    m.data[i] = std::max(a.data[i] * 1.0f, b.data[i] * 0.7f);
  auto peaks = local_peaks(m, 0.2f, 5);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0] == PixelCoord{10, 10});
}

TEST_CASE("local peaks match greedy oracle on random maps") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    RasterMap m(20, 20, 1);
    for (auto& v : m.data) v = static_cast<float>(rng.uniform());
    auto got = local_peaks(m, 0.4f, 2);
    auto want = oracle::greedy_nms(to_oracle(m), 0.4f, 2);
    REQUIRE(got.size() == want.size());
    for (size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].x == want[i].first);
      CHECK(got[i].y == want[i].second);
    }
    // pairwise separation in Chebyshev distance
    for (size_t i = 0; i < got.size(); ++i)
      for (size_t j = i + 1; j < got.size(); ++j)
        CHECK(std::max(std::abs(got[i].x - got[j].x), std::abs(got[i].y - got[j].y)) > 2);
  }
}

TEST_CASE("gaussian point rendering values") {
  RasterMap m = render_gaussian_points({{8, 8}}, 3.0, 17, 17);
  CHECK(m.at(8, 8) == doctest::Approx(1.0));
  CHECK(m.at(11, 8) == doctest::Approx(std::exp(-0.5)).epsilon(1e-6));  // d = sigma
  RasterMap empty = render_gaussian_points({}, 3.0, 8, 8);
  for (float v : empty.data) CHECK(v == 0.0f);
}

TEST_CASE("gaussian rendering is order invariant") {
  std::vector<Point> pts{{3, 3}, {10, 4}, {7, 7}, {4, 10}};
  std::vector<Point> rev(pts.rbegin(), pts.rend());
  RasterMap a = render_gaussian_points(pts, 2.5, 16, 16);
  RasterMap b = render_gaussian_points(rev, 2.5, 16, 16);
  CHECK(a.data == b.data);
}

TEST_CASE("orientation map encodes canonical tangents") {
  PatchFrame frame(0, 0, 0, 0, Point{0, 0}, 16, 0);

  BoundaryGraph horizontal;
  int a = horizontal.add_vertex(2, 8), b = horizontal.add_vertex(13, 8);
  horizontal.add_edge(a, b);
  RasterMap m = orientation_map(horizontal, frame, 1.0);
  REQUIRE(m.channels == 2);
  CHECK(m.at(7, 8, 0) == doctest::Approx(1.0));
  CHECK(m.at(7, 8, 1) == doctest::Approx(0.5));
  CHECK(m.at(0, 0, 0) == doctest::Approx(0.5));  // background
  CHECK(m.at(0, 0, 1) == doctest::Approx(0.5));

  BoundaryGraph diagonal;
  a = diagonal.add_vertex(2, 2);
  b = diagonal.add_vertex(13, 13);
  diagonal.add_edge(a, b);
  RasterMap d = orientation_map(diagonal, frame, 1.0);
  double want = (std::sqrt(0.5) + 1.0) / 2.0;
  CHECK(d.at(7, 7, 0) == doctest::Approx(want).epsilon(1e-6));
  CHECK(d.at(7, 7, 1) == doctest::Approx(want).epsilon(1e-6));

  RasterMap e = orientation_map(BoundaryGraph{}, frame, 1.0);
  for (float v : e.data) CHECK(v == 0.5f);
}
