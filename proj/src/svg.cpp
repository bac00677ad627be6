#include "curbgraph/svg.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace curbgraph {

void render_svg(const std::string& path, const BoundaryGraph& graph,
                const std::vector<PatchFrame>& frames) {
  double x0 = 0.0, y0 = 0.0, x1 = 100.0, y1 = 100.0;
  bool any = false;
  auto grow = [&](double x, double y) {
    if (!any) {
      x0 = x1 = x;
      y0 = y1 = y;
      any = true;
    } else {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  };
  for (const auto& v : graph.vertices()) grow(v.x, v.y);
  for (const auto& f : frames) {
    Rect r = f.expanded_rect();
    grow(r.x0, r.y0);
    grow(r.x1, r.y1);
  }
  double pad = 10.0;
  x0 -= pad;
  y0 -= pad;
  x1 += pad;
  y1 += pad;

  std::ofstream os(path);
  if (!os) throw std::runtime_error("svg: cannot open " + path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << x0 << " " << y0 << " "
     << (x1 - x0) << " " << (y1 - y0) << "\">\n";
  os << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << (x1 - x0)
     << "\" height=\"" << (y1 - y0) << "\" fill=\"white\"/>\n";
  for (const auto& f : frames) {
    Rect r = f.core_rect();
    os << "<rect x=\"" << r.x0 << "\" y=\"" << r.y0 << "\" width=\"" << r.width()
       << "\" height=\"" << r.height()
       << "\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
  }
  for (const auto& [a, b] : graph.edges()) {
    Point pa = graph.vertex(a).pos();
    Point pb = graph.vertex(b).pos();
    os << "<line x1=\"" << pa.x << "\" y1=\"" << pa.y << "\" x2=\"" << pb.x << "\" y2=\""
       << pb.y << "\" stroke=\"#d2691e\" stroke-width=\"1.5\"/>\n";
  }
  for (const auto& v : graph.vertices())
    os << "<circle cx=\"" << v.x << "\" cy=\"" << v.y
       << "\" r=\"2\" fill=\"#ffcc00\" stroke=\"#333333\" stroke-width=\"0.5\"/>\n";
  os << "</svg>\n";
}

}  // namespace curbgraph
