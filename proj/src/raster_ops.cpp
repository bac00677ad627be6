#include "curbgraph/raster_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "curbgraph/tiling.hpp"

namespace curbgraph {

namespace {

// Zhang-Suen neighbor order: p2=N, p3=NE, p4=E, p5=SE, p6=S, p7=SW, p8=W, p9=NW
constexpr int kNbrDx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kNbrDy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

struct BinaryGrid {
  int w, h;
  std::vector<std::uint8_t> v;
  explicit BinaryGrid(const RasterMap& m) : w(m.width), h(m.height), v(m.data.size()) {
    for (size_t i = 0; i < m.data.size(); ++i) v[i] = m.data[i] != 0.0f ? 1 : 0;
  }
  std::uint8_t at(int x, int y) const {
    return (x < 0 || x >= w || y < 0 || y >= h) ? 0 : v[static_cast<size_t>(y) * w + x];
  }
  void clear(int x, int y) { v[static_cast<size_t>(y) * w + x] = 0; }
};

}  // namespace

RasterMap skeletonize(const RasterMap& map) {
  if (map.channels != 1) throw std::invalid_argument("skeletonize: single channel expected");
  for (float f : map.data)
    if (f != 0.0f && f != 1.0f)
      throw std::invalid_argument("skeletonize: binary map expected");
  BinaryGrid g(map);

  auto neighborhood = [&](int x, int y, std::uint8_t p[8]) {
    for (int k = 0; k < 8; ++k) p[k] = g.at(x + kNbrDx[k], y + kNbrDy[k]);
  };
  auto crossing_ok = [](const std::uint8_t p[8]) {
    int b = 0;
    for (int k = 0; k < 8; ++k) b += p[k];
    if (b < 2 || b > 6) return false;  // keep endpoints and isolated pixels
    int a = 0;
    for (int k = 0; k < 8; ++k) a += (p[k] == 0 && p[(k + 1) % 8] == 1) ? 1 : 0;
    return a == 1;  // crossing number 1 keeps local connectivity
  };
  // p2=p[0], p4=p[2], p6=p[4], p8=p[6]
  auto directional_ok = [](const std::uint8_t p[8], int sub) {
    if (sub == 0) return !(p[0] && p[2] && p[4]) && !(p[2] && p[4] && p[6]);
    return !(p[0] && p[2] && p[6]) && !(p[0] && p[4] && p[6]);
  };

  // Candidates are taken from a per-subcycle snapshot so opposite borders
  // peel symmetrically; the actual deletion re-checks the crossing number on
  // the current image, which keeps component counts exact.
  std::vector<std::pair<int, int>> candidates;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int sub = 0; sub < 2; ++sub) {
      candidates.clear();
      for (int y = 0; y < g.h; ++y)
        for (int x = 0; x < g.w; ++x) {
          if (!g.at(x, y)) continue;
          std::uint8_t p[8];
          neighborhood(x, y, p);
          if (crossing_ok(p) && directional_ok(p, sub)) candidates.emplace_back(x, y);
        }
      for (const auto& [x, y] : candidates) {
        std::uint8_t p[8];
        neighborhood(x, y, p);
        if (!crossing_ok(p)) continue;
        g.clear(x, y);
        changed = true;
      }
    }
  }

  RasterMap out(map.width, map.height, 1);
  for (size_t i = 0; i < g.v.size(); ++i) out.data[i] = g.v[i] ? 1.0f : 0.0f;
  return out;
}

std::vector<PixelSet> connected_components(const RasterMap& map, int connectivity) {
  if (map.channels != 1)
    throw std::invalid_argument("connected_components: single channel expected");
  if (connectivity != 4 && connectivity != 8)
    throw std::invalid_argument("connected_components: connectivity must be 4 or 8");
  const int n_dirs = connectivity;
  static constexpr int dx8[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int dy8[8] = {0, 0, 1, -1, 1, -1, 1, -1};

  std::vector<std::uint8_t> seen(map.data.size(), 0);
  std::vector<PixelSet> out;
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      size_t idx = static_cast<size_t>(y) * map.width + x;
      if (seen[idx] || map.data[idx] == 0.0f) continue;
      PixelSet comp;
      std::vector<PixelCoord> stack{{x, y}};
      seen[idx] = 1;
      while (!stack.empty()) {
        PixelCoord p = stack.back();
        stack.pop_back();
        comp.push_back(p);
        for (int k = 0; k < n_dirs; ++k) {
          int nx = p.x + dx8[k], ny = p.y + dy8[k];
          if (nx < 0 || nx >= map.width || ny < 0 || ny >= map.height) continue;
          size_t nidx = static_cast<size_t>(ny) * map.width + nx;
          if (seen[nidx] || map.data[nidx] == 0.0f) continue;
          seen[nidx] = 1;
          stack.push_back({nx, ny});
        }
      }
      std::sort(comp.begin(), comp.end(), [](PixelCoord a, PixelCoord b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
      });
      out.push_back(std::move(comp));
    }
  }
  // scan order already yields components ordered by smallest (y,x) member
  return out;
}

std::vector<PixelCoord> local_peaks(const RasterMap& map, float threshold, int nms_radius) {
  if (map.channels != 1) throw std::invalid_argument("local_peaks: single channel expected");
  if (nms_radius < 1) throw std::invalid_argument("local_peaks: nms_radius must be >= 1");
  struct Candidate {
    float value;
    PixelCoord p;
  };
  std::vector<Candidate> cands;
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x) {
      float v = map.at(x, y);
      if (v >= threshold) cands.push_back({v, {x, y}});
    }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.p.y != b.p.y ? a.p.y < b.p.y : a.p.x < b.p.x;
  });
  std::vector<PixelCoord> peaks;
  for (const auto& c : cands) {
    bool suppressed = false;
    for (const auto& p : peaks) {
      if (std::max(std::abs(p.x - c.p.x), std::abs(p.y - c.p.y)) <= nms_radius) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) peaks.push_back(c.p);
  }
  return peaks;
}

RasterMap render_gaussian_points(const std::vector<Point>& points, double sigma,
                                 int width, int height) {
  if (sigma <= 0.0) throw std::invalid_argument("render_gaussian_points: sigma must be > 0");
  RasterMap out(width, height, 1);
  double inv = 1.0 / (2.0 * sigma * sigma);
  int radius = static_cast<int>(std::ceil(sigma * std::sqrt(32.0)));  // exp(-16) tail cut
  for (const auto& pt : points) {
    int x0 = std::max(0, static_cast<int>(std::floor(pt.x)) - radius);
    int x1 = std::min(width - 1, static_cast<int>(std::ceil(pt.x)) + radius);
    int y0 = std::max(0, static_cast<int>(std::floor(pt.y)) - radius);
    int y1 = std::min(height - 1, static_cast<int>(std::ceil(pt.y)) + radius);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        double dx = x - pt.x, dy = y - pt.y;
        double e = (dx * dx + dy * dy) * inv;
        if (e > 16.0) continue;
        float v = static_cast<float>(std::exp(-e));
        float& cell = out.at(x, y);
        if (v > cell) cell = v;  // max-composition keeps values in [0,1]
      }
    }
  }
  return out;
}

RasterMap orientation_map(const BoundaryGraph& graph, const PatchFrame& frame,
                          double thickness) {
  if (thickness < 1.0) throw std::invalid_argument("orientation_map: thickness must be >= 1");
  Rect rect = frame.expanded_rect();
  int w = static_cast<int>(std::lround(rect.width()));
  int h = static_cast<int>(std::lround(rect.height()));
  RasterMap out(w, h, 2, 0.5f);
  std::vector<double> best(static_cast<size_t>(w) * h,
                           std::numeric_limits<double>::infinity());
  double r = thickness / 2.0;
  for (const auto& [ia, ib] : graph.edges()) {
    Point a = graph.vertex(ia).pos() - Point{rect.x0, rect.y0};
    Point b = graph.vertex(ib).pos() - Point{rect.x0, rect.y0};
    Point t = b - a;
    double len = norm(t);
    if (len == 0.0) continue;
    t = t * (1.0 / len);
    // undirected edges: canonical sign dx >= 0, dy >= 0 when dx == 0
    if (t.x < 0.0 || (t.x == 0.0 && t.y < 0.0)) t = t * -1.0;
    int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - r)));
    int x1 = std::min(w - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + r)));
    int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - r)));
    int y1 = std::min(h - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + r)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        double d =
            dist_point_segment({static_cast<double>(x), static_cast<double>(y)}, a, b);
        if (d > r) continue;
        size_t idx = static_cast<size_t>(y) * w + x;
        if (d < best[idx]) {
          best[idx] = d;
          out.at(x, y, 0) = static_cast<float>((t.x + 1.0) / 2.0);
          out.at(x, y, 1) = static_cast<float>((t.y + 1.0) / 2.0);
        }
      }
    }
  }
  return out;
}

RasterMap gaussian_blur(const RasterMap& map, double sigma) {
  if (sigma <= 0.0) return map;
  int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += kernel[i + radius];
  }
  for (auto& k : kernel) k /= sum;

  RasterMap tmp(map.width, map.height, map.channels);
  RasterMap out(map.width, map.height, map.channels);
  for (int c = 0; c < map.channels; ++c) {
    for (int y = 0; y < map.height; ++y)
      for (int x = 0; x < map.width; ++x) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          int xx = x + i;
          if (xx < 0 || xx >= map.width) continue;
          acc += kernel[i + radius] * map.at(xx, y, c);
        }
        tmp.at(x, y, c) = static_cast<float>(acc);
      }
    for (int y = 0; y < map.height; ++y)
      for (int x = 0; x < map.width; ++x) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          int yy = y + i;
          if (yy < 0 || yy >= map.height) continue;
          acc += kernel[i + radius] * tmp.at(x, yy, c);
        }
        out.at(x, y, c) = static_cast<float>(acc);
      }
  }
  return out;
}

}  // namespace curbgraph
