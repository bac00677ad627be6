#include "curbgraph/keypoints.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "curbgraph/raster_ops.hpp"

namespace curbgraph {

const char* keypoint_kind_name(KeypointKind kind) {
  switch (kind) {
    case KeypointKind::corner_isolated: return "corner_isolated";
    case KeypointKind::corner_rounded: return "corner_rounded";
    case KeypointKind::intersect_core_edge: return "intersect_core_edge";
    case KeypointKind::intersect_neighbor_edge: return "intersect_neighbor_edge";
    case KeypointKind::intersect_aux_line: return "intersect_aux_line";
  }
  return "?";
}

KeypointKind keypoint_kind_from_name(const std::string& name) {
  for (auto k : {KeypointKind::corner_isolated, KeypointKind::corner_rounded,
                 KeypointKind::intersect_core_edge, KeypointKind::intersect_neighbor_edge,
                 KeypointKind::intersect_aux_line})
    if (name == keypoint_kind_name(k)) return k;
  throw std::invalid_argument("unknown keypoint kind: " + name);
}

namespace {

// merge priority: corners beat intersections, own edges beat neighbors' and aux
int kind_rank(KeypointKind k) {
  switch (k) {
    case KeypointKind::corner_isolated: return 0;
    case KeypointKind::corner_rounded: return 1;
    case KeypointKind::intersect_core_edge: return 2;
    case KeypointKind::intersect_neighbor_edge: return 3;
    case KeypointKind::intersect_aux_line: return 4;
  }
  return 5;
}

struct Resampled {
  std::vector<Point> pts;   // spacing <= 1 px, uniform
  double step = 1.0;
  bool closed = false;
};

Resampled resample(const Polyline& pl) {
  Resampled out;
  out.closed = pl.closed;
  double total = pl.length();
  if (pl.pts.size() < 2 || total <= 0.0) {
    out.pts = pl.pts;
    return out;
  }
  int n = std::max(1, static_cast<int>(std::ceil(total)));
  out.step = total / n;
  int count = pl.closed ? n : n + 1;
  out.pts.reserve(count);

  size_t seg = 0;
  double seg_start = 0.0;
  size_t npts = pl.pts.size();
  auto seg_a = [&](size_t i) { return pl.pts[i % npts]; };
  auto seg_b = [&](size_t i) { return pl.pts[(i + 1) % npts]; };
  size_t nsegs = pl.closed ? npts : npts - 1;
  double seg_len = dist(seg_a(0), seg_b(0));
  for (int i = 0; i < count; ++i) {
    double s = std::min(i * out.step, total);
    while (seg + 1 < nsegs && s > seg_start + seg_len) {
      seg_start += seg_len;
      ++seg;
      seg_len = dist(seg_a(seg), seg_b(seg));
    }
    double t = seg_len > 0.0 ? (s - seg_start) / seg_len : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    out.pts.push_back(seg_a(seg) + (seg_b(seg) - seg_a(seg)) * t);
  }
  return out;
}

// direction of the resampled curve at sample i (forward difference)
Point tangent_at(const Resampled& r, int i) {
  int n = static_cast<int>(r.pts.size());
  int a = i, b = i + 1;
  if (r.closed) {
    b = (i + 1) % n;
  } else if (b >= n) {
    a = n - 2;
    b = n - 1;
  }
  Point d = r.pts[b] - r.pts[a];
  double len = norm(d);
  return len > 0.0 ? d * (1.0 / len) : Point{1.0, 0.0};
}

double tangent_angle_change(const Resampled& r, int i, int offset) {
  int n = static_cast<int>(r.pts.size());
  int lo = i - offset, hi = i + offset;
  if (r.closed) {
    lo = ((lo % n) + n) % n;
    hi = ((hi % n) + n) % n;
  } else {
    lo = std::clamp(lo, 0, n - 1);
    hi = std::clamp(hi, 0, n - 1);
  }
  Point ta = tangent_at(r, lo);
  Point tb = tangent_at(r, hi);
  double c = std::clamp(dot(ta, tb), -1.0, 1.0);
  return std::acos(c) * 180.0 / M_PI;
}

}  // namespace

std::vector<Keypoint> corner_keypoints(const BoundaryGraph& graph, const CornerParams& params) {
  if (params.angle_threshold_deg <= 0.0 || params.angle_threshold_deg >= 180.0)
    throw std::invalid_argument("corner_keypoints: angle threshold must be in (0,180)");
  std::vector<Keypoint> out;
  for (const auto& pl : decompose_polylines(graph)) {
    Resampled r = resample(pl);
    int n = static_cast<int>(r.pts.size());
    if (n < 3) continue;
    int offset = std::max(1, static_cast<int>(std::lround(params.arc_window / r.step)));

    std::vector<std::uint8_t> qual(n, 0);
    for (int i = 0; i < n; ++i)
      qual[i] = tangent_angle_change(r, i, offset) >= params.angle_threshold_deg ? 1 : 0;

    // collect maximal runs; on closed loops runs may wrap around index 0
    std::vector<std::pair<int, int>> runs;  // [start, count]
    int start = 0;
    bool all = true;
    for (int i = 0; i < n; ++i)
      if (!qual[i]) {
        all = false;
        start = i;
        break;
      }
    if (all) {
      runs.emplace_back(0, n);
    } else {
      int i = start, remaining = n;
      while (remaining > 0) {
        while (remaining > 0 && !qual[i % n]) {
          ++i;
          --remaining;
        }
        if (remaining == 0) break;
        int run_start = i % n, count = 0;
        while (remaining > 0 && qual[i % n]) {
          ++i;
          --remaining;
          ++count;
        }
        if (!r.closed && run_start + count > n) {
          // open polylines cannot wrap; split defensively
          runs.emplace_back(run_start, n - run_start);
          runs.emplace_back(0, run_start + count - n);
        } else {
          runs.emplace_back(run_start, count);
        }
      }
    }

    // A point singularity qualifies a run of about the 2*window span; only
    // the arc length beyond that indicates distributed curvature.
    double window_span = 2.0 * offset * r.step;
    for (const auto& [rs, count] : runs) {
      double run_len = (count - 1) * r.step;
      if (run_len - window_span > params.gather_threshold || count == n) {
        for (int k = 0; k < count; ++k)
          out.push_back({r.pts[(rs + k) % n], KeypointKind::corner_rounded});
      } else {
        out.push_back({r.pts[(rs + count / 2) % n], KeypointKind::corner_isolated});
      }
    }
  }
  return out;
}

std::vector<Keypoint> intersection_keypoints(const BoundaryGraph& graph,
                                             const PatchFrame& frame, double aux_spacing) {
  struct Cut {
    Point a, b;
    KeypointKind kind;
  };
  std::vector<Cut> cuts;
  auto add_core_edges = [&](const PatchFrame& f, KeypointKind kind) {
    Rect c = f.core_rect();
    cuts.push_back({{c.x0, c.y0}, {c.x1, c.y0}, kind});
    cuts.push_back({{c.x0, c.y1}, {c.x1, c.y1}, kind});
    cuts.push_back({{c.x0, c.y0}, {c.x0, c.y1}, kind});
    cuts.push_back({{c.x1, c.y0}, {c.x1, c.y1}, kind});
  };
  add_core_edges(frame, KeypointKind::intersect_core_edge);
  add_core_edges(frame.shifted(-1, 0), KeypointKind::intersect_neighbor_edge);
  add_core_edges(frame.shifted(1, 0), KeypointKind::intersect_neighbor_edge);
  add_core_edges(frame.shifted(0, -1), KeypointKind::intersect_neighbor_edge);
  add_core_edges(frame.shifted(0, 1), KeypointKind::intersect_neighbor_edge);

  Rect ex = frame.expanded_rect();
  if (aux_spacing > 0.0) {
    // aux lines live on a global grid so adjacent patches agree exactly
    for (double x = std::ceil(ex.x0 / aux_spacing) * aux_spacing; x < ex.x1;
         x += aux_spacing)
      cuts.push_back({{x, ex.y0}, {x, ex.y1}, KeypointKind::intersect_aux_line});
    for (double y = std::ceil(ex.y0 / aux_spacing) * aux_spacing; y < ex.y1;
         y += aux_spacing)
      cuts.push_back({{ex.x0, y}, {ex.x1, y}, KeypointKind::intersect_aux_line});
  }

  std::vector<Keypoint> raw;
  for (const auto& [ia, ib] : graph.edges()) {
    Point a = graph.vertex(ia).pos();
    Point b = graph.vertex(ib).pos();
    for (const auto& cut : cuts) {
      auto p = segment_intersection(a, b, cut.a, cut.b);
      if (p && ex.contains(*p)) raw.push_back({*p, cut.kind});
    }
  }

  return merge_keypoints({}, raw, frame);
}

std::vector<Keypoint> merge_keypoints(const std::vector<Keypoint>& corners,
                                      const std::vector<Keypoint>& intersections,
                                      const PatchFrame& frame) {
  Rect ex = frame.expanded_rect();
  std::vector<Keypoint> all;
  for (const auto& kp : corners)
    if (ex.contains(kp.pos)) all.push_back(kp);
  for (const auto& kp : intersections)
    if (ex.contains(kp.pos)) all.push_back(kp);
  std::stable_sort(all.begin(), all.end(), [](const Keypoint& a, const Keypoint& b) {
    int ra = kind_rank(a.kind), rb = kind_rank(b.kind);
    if (ra != rb) return ra < rb;
    if (a.pos.y != b.pos.y) return a.pos.y < b.pos.y;
    return a.pos.x < b.pos.x;
  });
  std::vector<Keypoint> out;
  for (const auto& kp : all) {
    bool dup = false;
    for (const auto& kept : out)
      if (dist(kp.pos, kept.pos) < 0.5) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(kp);
  }
  std::sort(out.begin(), out.end(), [](const Keypoint& a, const Keypoint& b) {
    if (a.pos.y != b.pos.y) return a.pos.y < b.pos.y;
    return a.pos.x < b.pos.x;
  });
  return out;
}

std::vector<Keypoint> patch_keypoints(const BoundaryGraph& graph, const PatchFrame& frame,
                                      const CornerParams& corner_params, double aux_spacing) {
  return merge_keypoints(corner_keypoints(graph, corner_params),
                         intersection_keypoints(graph, frame, aux_spacing), frame);
}

RasterMap keypoint_label_map(const std::vector<Keypoint>& keypoints,
                             const PatchFrame& frame, double sigma) {
  std::vector<Point> local;
  local.reserve(keypoints.size());
  for (const auto& kp : keypoints) local.push_back(frame.to_local(kp.pos));
  return render_gaussian_points(local, sigma, frame.expanded_size(), frame.expanded_size());
}

std::string keypoints_to_json(const std::vector<Keypoint>& keypoints) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& kp : keypoints)
    doc.push_back({{"x", kp.pos.x}, {"y", kp.pos.y}, {"kind", keypoint_kind_name(kp.kind)}});
  return doc.dump();
}

std::vector<Keypoint> keypoints_from_json(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text);
  std::vector<Keypoint> out;
  for (const auto& item : doc)
    out.push_back({{item.at("x").get<double>(), item.at("y").get<double>()},
                   keypoint_kind_from_name(item.at("kind").get<std::string>())});
  return out;
}

}  // namespace curbgraph
