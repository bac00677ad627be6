#include "curbgraph/tiling.hpp"

#include <stdexcept>

namespace curbgraph {

PatchFrame::PatchFrame(int tile_row, int tile_col, int patch_row, int patch_col,
                       Point core_origin, int core_size, int margin)
    : tile_row_(tile_row), tile_col_(tile_col), patch_row_(patch_row),
      patch_col_(patch_col), core_origin_(core_origin), core_size_(core_size),
      margin_(margin) {
  if (core_size <= 0) throw std::invalid_argument("frame: core_size must be positive");
  if (margin < 0) throw std::invalid_argument("frame: margin must be >= 0");
}

std::string PatchFrame::name() const {
  return "tile_" + std::to_string(tile_row_) + "_" + std::to_string(tile_col_) +
         "__patch_" + std::to_string(patch_row_) + "_" + std::to_string(patch_col_);
}

PatchFrame PatchFrame::shifted(int drow, int dcol) const {
  PatchFrame f = *this;
  f.patch_row_ += drow;
  f.patch_col_ += dcol;
  f.core_origin_.x += dcol * core_size_;
  f.core_origin_.y += drow * core_size_;
  // patch indices may leave the tile; only the geometry matters for neighbors
  return f;
}

std::vector<PatchFrame> split_tile(int tile_row, int tile_col, int tile_size,
                                   int core_size, int margin) {
  if (core_size <= 0 || tile_size <= 0)
    throw std::invalid_argument("split_tile: sizes must be positive");
  if (margin < 0) throw std::invalid_argument("split_tile: margin must be >= 0");
  if (tile_size % core_size != 0)
    throw std::invalid_argument("split_tile: tile_size must be divisible by core_size");
  int n = tile_size / core_size;
  std::vector<PatchFrame> frames;
  frames.reserve(static_cast<size_t>(n) * n);
  double tx = static_cast<double>(tile_col) * tile_size;
  double ty = static_cast<double>(tile_row) * tile_size;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      frames.emplace_back(tile_row, tile_col, r, c,
                          Point{tx + c * core_size, ty + r * core_size}, core_size,
                          margin);
  return frames;
}

std::optional<Rect> overlap_region(const PatchFrame& a, const PatchFrame& b) {
  return intersect(a.expanded_rect(), b.expanded_rect());
}

}  // namespace curbgraph
