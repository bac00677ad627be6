#include "curbgraph/raster.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace curbgraph {

namespace {

constexpr char kMagic[4] = {'C', 'S', 'B', 'T'};

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw std::runtime_error("csbt: truncated header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f32_array(std::ostream& os, const std::vector<float>& data) {
  static_assert(sizeof(float) == 4);
  // f32 little-endian; all supported targets are little-endian
  os.write(reinterpret_cast<const char*>(data.data()),
           static_cast<std::streamsize>(data.size() * 4));
}

void write_record(std::ostream& os, const std::vector<std::uint32_t>& dims,
                  const std::vector<float>& data) {
  os.write(kMagic, 4);
  put_u32(os, static_cast<std::uint32_t>(dims.size()));
  std::size_t n = 1;
  for (auto d : dims) {
    put_u32(os, d);
    n *= d;
  }
  if (n != data.size()) throw std::runtime_error("csbt: dims do not match payload");
  put_f32_array(os, data);
}

bool read_record(std::istream& is, CsbtRecord& rec) {
  char magic[4];
  is.read(magic, 4);
  if (is.gcount() == 0) return false;  // clean EOF
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("csbt: bad magic");
  std::uint32_t rank = get_u32(is);
  if (rank == 0 || rank > 8) throw std::runtime_error("csbt: bad rank");
  rec.dims.resize(rank);
  std::size_t n = 1;
  for (auto& d : rec.dims) {
    d = get_u32(is);
    n *= d;
  }
  rec.data.resize(n);
  is.read(reinterpret_cast<char*>(rec.data.data()), static_cast<std::streamsize>(n * 4));
  if (!is) throw std::runtime_error("csbt: truncated payload");
  return true;
}

}  // namespace

RasterMap RasterMap::channel(int c) const {
  RasterMap out(width, height, 1);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) out.at(x, y) = at(x, y, c);
  return out;
}

bool RasterMap::is_binary() const {
  for (float v : data)
    if (v != 0.0f && v != 1.0f) return false;
  return true;
}

RasterMap binarize(const RasterMap& map, float threshold) {
  if (map.channels != 1) throw std::invalid_argument("binarize: single channel expected");
  RasterMap out(map.width, map.height, 1);
  for (size_t i = 0; i < map.data.size(); ++i)
    out.data[i] = map.data[i] >= threshold ? 1.0f : 0.0f;
  return out;
}

void write_csbt(const std::string& path, const RasterMap& map) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("csbt: cannot open " + path);
  write_record(os,
               {static_cast<std::uint32_t>(map.height), static_cast<std::uint32_t>(map.width),
                static_cast<std::uint32_t>(map.channels)},
               map.data);
}

RasterMap read_csbt(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("csbt: cannot open " + path);
  CsbtRecord rec;
  if (!read_record(is, rec)) throw std::runtime_error("csbt: empty file " + path);
  if (rec.dims.size() != 3) throw std::runtime_error("csbt: raster rank must be 3: " + path);
  RasterMap map(static_cast<int>(rec.dims[1]), static_cast<int>(rec.dims[0]),
                static_cast<int>(rec.dims[2]));
  map.data = std::move(rec.data);
  return map;
}

void write_csbt_records(const std::string& path, const std::vector<CsbtRecord>& records) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("csbt: cannot open " + path);
  for (const auto& rec : records) write_record(os, rec.dims, rec.data);
}

std::vector<CsbtRecord> read_csbt_records(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("csbt: cannot open " + path);
  std::vector<CsbtRecord> out;
  CsbtRecord rec;
  while (read_record(is, rec)) out.push_back(std::move(rec));
  return out;
}

void write_pgm(const std::string& path, const RasterMap& map, int channel) {
  if (channel < 0 || channel >= map.channels)
    throw std::invalid_argument("pgm: bad channel");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("pgm: cannot open " + path);
  os << "P5\n" << map.width << " " << map.height << "\n255\n";
  std::vector<unsigned char> row(map.width);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      float v = map.at(x, y, channel);
      v = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
      row[x] = static_cast<unsigned char>(v * 255.0f + 0.5f);
    }
    os.write(reinterpret_cast<const char*>(row.data()), map.width);
  }
}

}  // namespace curbgraph
