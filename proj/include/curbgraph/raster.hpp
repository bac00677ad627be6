#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace curbgraph {

// Dense float grid, row-major with interleaved channels: index(x,y,c) =
// (y*width + x)*channels + c. Pixel (x,y) samples the continuous point (x,y)
// of the frame it was rendered in. Values are expected to stay in [0,1].
struct RasterMap {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<float> data;

  RasterMap() = default;
  RasterMap(int w, int h, int c = 1, float fill = 0.0f)
      : width(w), height(h), channels(c),
        data(static_cast<size_t>(w) * h * c, fill) {}

  float at(int x, int y, int c = 0) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  float& at(int x, int y, int c = 0) {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  size_t size() const { return data.size(); }

  // single-channel view of channel c
  RasterMap channel(int c) const;

  bool is_binary() const;
};

RasterMap binarize(const RasterMap& map, float threshold);

// CSBT tensor container: magic "CSBT", u32le rank, rank u32le dims
// (height, width, channels for rank 3), f32le row-major payload.
void write_csbt(const std::string& path, const RasterMap& map);
RasterMap read_csbt(const std::string& path);

// Multi-record variant used by parameter checkpoints: a sequence of CSBT
// records in one file, arbitrary rank per record.
struct CsbtRecord {
  std::vector<std::uint32_t> dims;
  std::vector<float> data;
};
void write_csbt_records(const std::string& path, const std::vector<CsbtRecord>& records);
std::vector<CsbtRecord> read_csbt_records(const std::string& path);

// 8-bit PGM (P5) export of one channel, for quick visual checks.
void write_pgm(const std::string& path, const RasterMap& map, int channel = 0);

}  // namespace curbgraph
