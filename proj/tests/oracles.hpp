// Independent reference implementations used only by the test suites. These
// deliberately avoid the library's code paths: plain loops, brute force, no
// Eigen, no shared helpers.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace oracle {

// ---- raster helpers -------------------------------------------------------

struct Grid {
  int w = 0, h = 0;
  std::vector<float> v;  // single channel
  float at(int x, int y) const { return v[static_cast<size_t>(y) * w + x]; }
  float& at(int x, int y) { return v[static_cast<size_t>(y) * w + x]; }
};

struct Seg {
  double ax, ay, bx, by;
};

// point-to-segment distance written from the projection formula directly
inline double point_segment_distance(double px, double py, const Seg& s) {
  double vx = s.bx - s.ax, vy = s.by - s.ay;
  double len2 = vx * vx + vy * vy;
  double t = 0.0;
  if (len2 > 0.0) t = ((px - s.ax) * vx + (py - s.ay) * vy) / len2;
  if (t < 0.0) t = 0.0;
  if (t > 1.0) t = 1.0;
  double dx = px - (s.ax + t * vx), dy = py - (s.ay + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

// every-pixel scan rasterization
inline Grid rasterize(const std::vector<Seg>& segs, double ox, double oy, int w, int h,
                      double thickness) {
  Grid g{w, h, std::vector<float>(static_cast<size_t>(w) * h, 0.0f)};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double gx = ox + x, gy = oy + y;
      for (const auto& s : segs)
        if (point_segment_distance(gx, gy, s) <= thickness / 2.0) {
          g.at(x, y) = 1.0f;
          break;
        }
    }
  return g;
}

// ---- connected components (recursive flood fill) ---------------------------

inline void flood(const Grid& g, std::vector<int>& labels, int x, int y, int label,
                  int connectivity) {
  std::vector<std::pair<int, int>> stack{{x, y}};
  labels[static_cast<size_t>(y) * g.w + x] = label;
  while (!stack.empty()) {
    auto [cx, cy] = stack.back();
    stack.pop_back();
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        if (connectivity == 4 && dx != 0 && dy != 0) continue;
        int nx = cx + dx, ny = cy + dy;
        if (nx < 0 || nx >= g.w || ny < 0 || ny >= g.h) continue;
        size_t idx = static_cast<size_t>(ny) * g.w + nx;
        if (g.v[idx] == 0.0f || labels[idx] >= 0) continue;
        labels[idx] = label;
        stack.emplace_back(nx, ny);
      }
  }
}

inline int component_count(const Grid& g, int connectivity) {
  std::vector<int> labels(g.v.size(), -1);
  int next = 0;
  for (int y = 0; y < g.h; ++y)
    for (int x = 0; x < g.w; ++x)
      if (g.at(x, y) != 0.0f && labels[static_cast<size_t>(y) * g.w + x] < 0)
        flood(g, labels, x, y, next++, connectivity);
  return next;
}

inline std::vector<std::vector<std::pair<int, int>>> components(const Grid& g,
                                                                int connectivity) {
  std::vector<int> labels(g.v.size(), -1);
  int next = 0;
  for (int y = 0; y < g.h; ++y)
    for (int x = 0; x < g.w; ++x)
      if (g.at(x, y) != 0.0f && labels[static_cast<size_t>(y) * g.w + x] < 0)
        flood(g, labels, x, y, next++, connectivity);
  std::vector<std::vector<std::pair<int, int>>> out(next);
  for (int y = 0; y < g.h; ++y)
    for (int x = 0; x < g.w; ++x) {
      int l = labels[static_cast<size_t>(y) * g.w + x];
      if (l >= 0) out[l].emplace_back(x, y);
    }
  return out;
}

// ---- thinning (simple-point peeling with flood-fill topology test) ---------

// deletable iff removing the pixel keeps its 8-neighborhood foreground
// connected (checked by explicit flood fill on the 3x3 ring) and it is not an
// endpoint or isolated pixel
inline bool simple_point(const Grid& g, int x, int y) {
  int nbr_count = 0;
  bool fg[3][3] = {};
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) {
      int nx = x + dx, ny = y + dy;
      bool v = nx >= 0 && nx < g.w && ny >= 0 && ny < g.h && g.at(nx, ny) != 0.0f;
      fg[dy + 1][dx + 1] = v;
      if (v && !(dx == 0 && dy == 0)) ++nbr_count;
    }
  if (nbr_count < 2 || nbr_count > 6) return false;
  // count 0->1 transitions around the ring, clockwise from north
  static const int ring[8][2] = {{0, -1}, {1, -1}, {1, 0}, {1, 1},
                                 {0, 1},  {-1, 1}, {-1, 0}, {-1, -1}};
  int transitions = 0;
  for (int k = 0; k < 8; ++k) {
    bool a = fg[ring[k][1] + 1][ring[k][0] + 1];
    bool b = fg[ring[(k + 1) % 8][1] + 1][ring[(k + 1) % 8][0] + 1];
    if (!a && b) ++transitions;
  }
  return transitions == 1;
}

// directional two-subfield peeling to a fixpoint
inline Grid thin(Grid g) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (int sub = 0; sub < 2; ++sub) {
      for (int y = 0; y < g.h; ++y)
        for (int x = 0; x < g.w; ++x) {
          if (g.at(x, y) == 0.0f) continue;
          if (!simple_point(g, x, y)) continue;
          auto n = [&](int dx, int dy) {
            int nx = x + dx, ny = y + dy;
            return nx >= 0 && nx < g.w && ny >= 0 && ny < g.h && g.at(nx, ny) != 0.0f;
          };
          bool ok;
          if (sub == 0)
            ok = !(n(0, -1) && n(1, 0) && n(0, 1)) && !(n(1, 0) && n(0, 1) && n(-1, 0));
          else
            ok = !(n(0, -1) && n(1, 0) && n(-1, 0)) && !(n(0, -1) && n(0, 1) && n(-1, 0));
          if (ok) {
            g.at(x, y) = 0.0f;
            changed = true;
          }
        }
    }
  }
  return g;
}

// ---- greedy non-maximum suppression ----------------------------------------

inline std::vector<std::pair<int, int>> greedy_nms(const Grid& g, float threshold,
                                                   int radius) {
  struct C {
    float v;
    int x, y;
  };
  std::vector<C> cands;
  for (int y = 0; y < g.h; ++y)
    for (int x = 0; x < g.w; ++x)
      if (g.at(x, y) >= threshold) cands.push_back({g.at(x, y), x, y});
  std::sort(cands.begin(), cands.end(), [](const C& a, const C& b) {
    if (a.v != b.v) return a.v > b.v;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  });
  std::vector<std::pair<int, int>> kept;
  for (const auto& c : cands) {
    bool ok = true;
    for (const auto& [kx, ky] : kept)
      if (std::max(std::abs(kx - c.x), std::abs(ky - c.y)) <= radius) {
        ok = false;
        break;
      }
    if (ok) kept.emplace_back(c.x, c.y);
  }
  return kept;
}

// ---- graphs ----------------------------------------------------------------

struct SimpleGraph {
  std::vector<std::pair<double, double>> pos;  // index = vertex
  std::vector<std::pair<int, int>> edges;
};

// exhaustive simple-path enumeration; exponential, for tiny graphs only
inline std::optional<double> shortest_path_enumerate(const SimpleGraph& g, int a, int b) {
  if (a == b) return 0.0;
  std::vector<std::vector<int>> adj(g.pos.size());
  for (auto [u, v] : g.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  auto length = [&](int u, int v) {
    double dx = g.pos[u].first - g.pos[v].first;
    double dy = g.pos[u].second - g.pos[v].second;
    return std::sqrt(dx * dx + dy * dy);
  };
  std::optional<double> best;
  std::vector<char> visited(g.pos.size(), 0);
  std::vector<std::pair<int, double>> stack{{a, 0.0}};
  // explicit DFS with path state
  std::function<void(int, double)> dfs = [&](int u, double acc) {
    if (u == b) {
      if (!best || acc < *best) best = acc;
      return;
    }
    visited[u] = 1;
    for (int v : adj[u])
      if (!visited[v]) dfs(v, acc + length(u, v));
    visited[u] = 0;
  };
  dfs(a, 0.0);
  return best;
}

// Dijkstra written independently (array scan instead of a heap)
inline std::optional<double> shortest_path_scan(const SimpleGraph& g, int a, int b) {
  size_t n = g.pos.size();
  std::vector<double> d(n, std::numeric_limits<double>::infinity());
  std::vector<char> done(n, 0);
  auto length = [&](int u, int v) {
    double dx = g.pos[u].first - g.pos[v].first;
    double dy = g.pos[u].second - g.pos[v].second;
    return std::sqrt(dx * dx + dy * dy);
  };
  std::vector<std::vector<int>> adj(n);
  for (auto [u, v] : g.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  d[a] = 0.0;
  for (size_t it = 0; it < n; ++it) {
    int u = -1;
    double du = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n; ++i)
      if (!done[i] && d[i] < du) {
        du = d[i];
        u = static_cast<int>(i);
      }
    if (u < 0) break;
    done[u] = 1;
    for (int v : adj[u]) d[v] = std::min(d[v], d[u] + length(u, v));
  }
  if (std::isinf(d[b])) return std::nullopt;
  return d[b];
}

// ---- dense attention math (plain loops, no Eigen) ---------------------------

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;  // row major

inline Mat matmul(const Mat& a, const Mat& b) {
  size_t n = a.size(), k = b.size(), m = b[0].size();
  Mat out(n, Vec(m, 0.0));
  for (size_t i = 0; i < n; ++i)
    for (size_t l = 0; l < k; ++l)
      for (size_t j = 0; j < m; ++j) out[i][j] += a[i][l] * b[l][j];
  return out;
}

inline Mat transpose(const Mat& a) {
  Mat out(a[0].size(), Vec(a.size()));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[0].size(); ++j) out[j][i] = a[i][j];
  return out;
}

inline Mat l2_normalize_rows(const Mat& a) {
  Mat out = a;
  for (auto& row : out) {
    double s = 0.0;
    for (double v : row) s += v * v;
    double r = std::sqrt(s);
    if (r < 1e-12) r = 1e-12;
    for (double& v : row) v /= r;
  }
  return out;
}

inline Mat softmax_rows(const Mat& a) {
  Mat out = a;
  for (auto& row : out) {
    double mx = row[0];
    for (double v : row) mx = std::max(mx, v);
    double sum = 0.0;
    for (double& v : row) {
      v = std::exp(v - mx);
      sum += v;
    }
    for (double& v : row) v /= sum;
  }
  return out;
}

// softmax(norm(X Wq) norm(X Wk)^T) (X Wv)
inline Mat attention(const Mat& x, const Mat& wq, const Mat& wk, const Mat& wv) {
  Mat q = l2_normalize_rows(matmul(x, wq));
  Mat k = l2_normalize_rows(matmul(x, wk));
  Mat v = matmul(x, wv);
  return matmul(softmax_rows(matmul(q, transpose(k))), v);
}

// norm(X Wq) norm(X Wk)^T
inline Mat head_scores(const Mat& x, const Mat& wq, const Mat& wk) {
  Mat q = l2_normalize_rows(matmul(x, wq));
  Mat k = l2_normalize_rows(matmul(x, wk));
  return matmul(q, transpose(k));
}

// ---- averaging (global accumulator) ----------------------------------------

struct Cover {
  double ox, oy;
  int size;
  const std::vector<float>* data;  // size*size single channel
};

// mean per global pixel over all covering patches
inline std::map<std::pair<long, long>, double> accumulate_mean(const std::vector<Cover>& covers) {
  std::map<std::pair<long, long>, std::pair<double, int>> acc;
  for (const auto& c : covers)
    for (int y = 0; y < c.size; ++y)
      for (int x = 0; x < c.size; ++x) {
        auto key = std::make_pair(static_cast<long>(c.ox) + x, static_cast<long>(c.oy) + y);
        auto& slot = acc[key];
        slot.first += (*c.data)[static_cast<size_t>(y) * c.size + x];
        slot.second += 1;
      }
  std::map<std::pair<long, long>, double> out;
  for (const auto& [key, slot] : acc) out[key] = slot.first / slot.second;
  return out;
}

}  // namespace oracle
