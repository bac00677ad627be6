#include "curbgraph/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "curbgraph/rng.hpp"

namespace curbgraph {

namespace {

std::vector<std::pair<int, int>> foreground_pixels(const RasterMap& map) {
  std::vector<std::pair<int, int>> out;
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x)
      if (map.at(x, y) != 0.0f) out.emplace_back(x, y);
  return out;
}

// count of pixels in `from` with Euclidean distance < tau to some pixel of
// the mask; exact integer arithmetic
long count_matched(const std::vector<std::pair<int, int>>& from, const RasterMap& mask,
                   double tau) {
  int r = static_cast<int>(std::ceil(tau));
  std::vector<std::pair<int, int>> offsets;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      if (static_cast<double>(dx) * dx + static_cast<double>(dy) * dy < tau * tau)
        offsets.emplace_back(dx, dy);
  std::sort(offsets.begin(), offsets.end(), [](const auto& a, const auto& b) {
    return a.first * a.first + a.second * a.second <
           b.first * b.first + b.second * b.second;
  });
  long matched = 0;
  for (const auto& [x, y] : from) {
    for (const auto& [dx, dy] : offsets) {
      int nx = x + dx, ny = y + dy;
      if (nx < 0 || nx >= mask.width || ny < 0 || ny >= mask.height) continue;
      if (mask.at(nx, ny) != 0.0f) {
        ++matched;
        break;
      }
    }
  }
  return matched;
}

struct TopoScores {
  std::optional<double> apls;
  std::optional<double> tlts;
  int sampled = 0;
  int unmatched = 0;
};

TopoScores topo_metrics(const BoundaryGraph& gt, const BoundaryGraph& pred,
                        const MetricConfig& config) {
  TopoScores out;
  if (gt.empty()) return out;
  ShortestPathEngine gt_engine(gt);
  ShortestPathEngine pred_engine(pred);

  // connected pairs live inside components; enumerate component offsets
  const auto& components = gt_engine.components();
  std::vector<long> pair_base;
  long total_pairs = 0;
  for (const auto& ids : components) {
    pair_base.push_back(total_pairs);
    long n = static_cast<long>(ids.size());
    total_pairs += n * (n - 1) / 2;
  }
  if (total_pairs == 0) return out;

  auto pair_at = [&](long index) {
    // largest component whose pair range starts at or before index
    size_t c = 0;
    while (c + 1 < pair_base.size() && pair_base[c + 1] <= index) ++c;
    long k = index - pair_base[c];
    const auto& ids = components[c];
    long n = static_cast<long>(ids.size());
    // triangular decode: k = row offsets of i, then j
    long i = 0;
    long remaining = k;
    while (remaining >= n - 1 - i) {
      remaining -= n - 1 - i;
      ++i;
    }
    long j = i + 1 + remaining;
    return std::pair<int, int>(ids[i], ids[j]);
  };

  std::vector<std::pair<int, int>> pairs;
  if (total_pairs <= config.sample_pairs) {
    for (long k = 0; k < total_pairs; ++k) pairs.push_back(pair_at(k));
  } else {
    // Floyd's sampling without replacement, then a deterministic order
    Rng rng(config.seed);
    std::unordered_set<long> chosen;
    for (long j = total_pairs - config.sample_pairs; j < total_pairs; ++j) {
      long t = rng.uniform_int(0, j);
      if (!chosen.insert(t).second) chosen.insert(j);
    }
    std::vector<long> indices(chosen.begin(), chosen.end());
    std::sort(indices.begin(), indices.end());
    for (long k : indices) pairs.push_back(pair_at(k));
  }
  std::sort(pairs.begin(), pairs.end());

  double apls_sum = 0.0;
  long tlts_pass = 0;
  for (const auto& [g1, g2] : pairs) {
    double lg = *gt_engine.distance(g1, g2);
    auto p1 = snap_vertex(pred, gt.vertex(g1).pos(), config.snap_radius);
    auto p2 = snap_vertex(pred, gt.vertex(g2).pos(), config.snap_radius);
    std::optional<double> lp;
    if (p1 && p2) lp = pred_engine.distance(*p1, *p2);
    if (!lp) {
      ++out.unmatched;  // scores 0 for APLS, fails TLTS
      continue;
    }
    if (lg <= 0.0) {
      apls_sum += *lp == 0.0 ? 1.0 : 0.0;
      if (*lp == 0.0) ++tlts_pass;
      continue;
    }
    apls_sum += 1.0 - std::min(1.0, std::abs(lg - *lp) / lg);
    if (std::abs(lg - *lp) <= lg * config.tlts_phi) ++tlts_pass;
  }
  out.sampled = static_cast<int>(pairs.size());
  out.apls = apls_sum / static_cast<double>(pairs.size());
  out.tlts = static_cast<double>(tlts_pass) / static_cast<double>(pairs.size());
  return out;
}

}  // namespace

std::vector<PixelScore> pixel_metrics(const BoundaryGraph& pred, const BoundaryGraph& gt,
                                      const Rect& rect, const MetricConfig& config) {
  RasterMap pred_map = rasterize_graph(pred, rect, 1.0);
  RasterMap gt_map = rasterize_graph(gt, rect, 1.0);
  auto pred_px = foreground_pixels(pred_map);
  auto gt_px = foreground_pixels(gt_map);

  std::vector<PixelScore> out;
  for (double tau : config.relax_ratios) {
    PixelScore s;
    s.relax_ratio = tau;
    s.precision = pred_px.empty()
                      ? 0.0
                      : static_cast<double>(count_matched(pred_px, gt_map, tau)) /
                            static_cast<double>(pred_px.size());
    s.recall = gt_px.empty()
                   ? 0.0
                   : static_cast<double>(count_matched(gt_px, pred_map, tau)) /
                         static_cast<double>(gt_px.size());
    s.f1 = s.precision + s.recall > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    out.push_back(s);
  }
  return out;
}

std::optional<double> apls(const BoundaryGraph& gt, const BoundaryGraph& pred,
                           const MetricConfig& config, int* unmatched, int* sampled) {
  auto scores = topo_metrics(gt, pred, config);
  if (unmatched) *unmatched = scores.unmatched;
  if (sampled) *sampled = scores.sampled;
  return scores.apls;
}

std::optional<double> tlts(const BoundaryGraph& gt, const BoundaryGraph& pred,
                           const MetricConfig& config, int* unmatched, int* sampled) {
  auto scores = topo_metrics(gt, pred, config);
  if (unmatched) *unmatched = scores.unmatched;
  if (sampled) *sampled = scores.sampled;
  return scores.tlts;
}

MetricReport evaluate(const BoundaryGraph& pred, const BoundaryGraph& gt, const Rect& rect,
                      const MetricConfig& config) {
  MetricReport report;
  report.pixel = pixel_metrics(pred, gt, rect, config);
  auto scores = topo_metrics(gt, pred, config);
  report.apls = scores.apls;
  report.tlts = scores.tlts;
  report.sampled_pairs = scores.sampled;
  report.unmatched_pairs = scores.unmatched;
  return report;
}

std::string MetricReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["pixel"] = nlohmann::ordered_json::array();
  for (const auto& s : pixel)
    doc["pixel"].push_back({{"relax_ratio", s.relax_ratio},
                            {"precision", s.precision},
                            {"recall", s.recall},
                            {"f1", s.f1}});
  if (apls)
    doc["apls"] = *apls;
  else
    doc["apls"] = nullptr;
  if (tlts)
    doc["tlts"] = *tlts;
  else
    doc["tlts"] = nullptr;
  doc["sampled_pairs"] = sampled_pairs;
  doc["unmatched_pairs"] = unmatched_pairs;
  return doc.dump();
}

std::string MetricReport::to_table() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  auto col = [&](const std::string& s, int w) {
    os << std::setw(w) << s;
  };
  col("", 10);
  for (const auto& s : pixel) {
    std::ostringstream h;
    h << "P@" << std::setprecision(1) << std::fixed << s.relax_ratio;
    col(h.str(), 8);
  }
  for (const auto& s : pixel) {
    std::ostringstream h;
    h << "R@" << std::setprecision(1) << std::fixed << s.relax_ratio;
    col(h.str(), 8);
  }
  for (const auto& s : pixel) {
    std::ostringstream h;
    h << "F1@" << std::setprecision(1) << std::fixed << s.relax_ratio;
    col(h.str(), 8);
  }
  col("APLS", 8);
  col("TLTS", 8);
  os << "\n";
  col("scores", 10);
  os << std::setprecision(3);
  for (const auto& s : pixel) os << std::setw(8) << s.precision;
  for (const auto& s : pixel) os << std::setw(8) << s.recall;
  for (const auto& s : pixel) os << std::setw(8) << s.f1;
  if (apls)
    os << std::setw(8) << *apls;
  else
    col("n/a", 8);
  if (tlts)
    os << std::setw(8) << *tlts;
  else
    col("n/a", 8);
  os << "\n";
  return os.str();
}

}  // namespace curbgraph
