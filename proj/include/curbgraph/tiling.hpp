#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curbgraph/geometry.hpp"

namespace curbgraph {

// Geometry of one image patch. The core rectangle is the exclusive area the
// patch is responsible for; the expanded rectangle adds a symmetric margin so
// adjacent patches overlap by 2*margin pixels.
class PatchFrame {
 public:
  PatchFrame() = default;
  PatchFrame(int tile_row, int tile_col, int patch_row, int patch_col,
             Point core_origin, int core_size, int margin);

  int tile_row() const { return tile_row_; }
  int tile_col() const { return tile_col_; }
  int patch_row() const { return patch_row_; }
  int patch_col() const { return patch_col_; }
  int core_size() const { return core_size_; }
  int expanded_size() const { return core_size_ + 2 * margin_; }
  int margin() const { return margin_; }
  Point core_origin() const { return core_origin_; }
  Point expanded_origin() const {
    return {core_origin_.x - margin_, core_origin_.y - margin_};
  }
  Rect core_rect() const {
    return {core_origin_.x, core_origin_.y, core_origin_.x + core_size_,
            core_origin_.y + core_size_};
  }
  Rect expanded_rect() const {
    Point o = expanded_origin();
    return {o.x, o.y, o.x + expanded_size(), o.y + expanded_size()};
  }

  Point to_local(Point global) const { return global - expanded_origin(); }
  Point to_global(Point local) const { return local + expanded_origin(); }

  // tile_R_C__patch_r_c, used to key every per-patch artifact
  std::string name() const;

  // frame of the edge-adjacent patch shifted by (drow, dcol) core steps
  PatchFrame shifted(int drow, int dcol) const;

 private:
  int tile_row_ = 0, tile_col_ = 0;
  int patch_row_ = 0, patch_col_ = 0;
  Point core_origin_{0, 0};
  int core_size_ = 1000;
  int margin_ = 50;
};

// Row-major patch frames of one tile. tile_size must be a multiple of
// core_size; expansion is not clamped at tile or city bounds.
std::vector<PatchFrame> split_tile(int tile_row, int tile_col, int tile_size,
                                   int core_size, int margin);

// Intersection of the two expanded rectangles, if any.
std::optional<Rect> overlap_region(const PatchFrame& a, const PatchFrame& b);

}  // namespace curbgraph
