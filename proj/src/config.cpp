#include "curbgraph/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace curbgraph {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

std::string format_list(const std::vector<double>& v) {
  std::ostringstream os;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) os << ",";
    os << v[i];
  }
  return os.str();
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(lineno) +
                               " is not key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::runtime_error("config: empty key on line " + std::to_string(lineno));
    out[key] = value;
  }
  return out;
}

PipelineConfig PipelineConfig::from_text(const std::string& text) {
  PipelineConfig cfg;
  auto kv = parse_key_values(text);
  auto take = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto geti = [&](const char* key, int& dst) {
    if (auto v = take(key)) dst = std::stoi(*v);
  };
  auto getd = [&](const char* key, double& dst) {
    if (auto v = take(key)) dst = std::stod(*v);
  };
  auto getu = [&](const char* key, std::uint64_t& dst) {
    if (auto v = take(key)) dst = std::stoull(*v);
  };
  auto getf = [&](const char* key, float& dst) {
    if (auto v = take(key)) dst = std::stof(*v);
  };

  geti("tile_size", cfg.tile_size);
  geti("core_size", cfg.core_size);
  geti("margin", cfg.margin);
  geti("tile_rows", cfg.tile_rows);
  geti("tile_cols", cfg.tile_cols);
  getd("sigma", cfg.sigma);
  getd("peak_threshold", cfg.peak_threshold);
  geti("nms_radius", cfg.nms_radius);
  getd("angle_threshold", cfg.corner.angle_threshold_deg);
  getd("arc_window", cfg.corner.arc_window);
  getd("gather_threshold", cfg.corner.gather_threshold);
  getd("aux_spacing", cfg.aux_spacing);
  getf("binarize_threshold", cfg.extract.binarize_threshold);
  geti("short_skeleton_len", cfg.extract.short_skeleton_len);
  geti("roi_size", cfg.roi_size);
  geti("d_model", cfg.d_model);
  geti("attn_layers", cfg.attn_layers);
  getd("learning_rate", cfg.learning_rate);
  geti("train_steps", cfg.train_steps);
  geti("train_instances", cfg.train_instances);
  getd("afa_threshold", cfg.afa_threshold);
  getd("adjacency_snap_radius", cfg.adjacency_snap_radius);
  getd("merge_radius", cfg.merge_radius);
  getd("connector_spacing", cfg.connector_spacing);
  if (auto v = take("relax_ratios")) cfg.metrics.relax_ratios = parse_list(*v);
  getd("tlts_phi", cfg.metrics.tlts_phi);
  geti("sample_pairs", cfg.metrics.sample_pairs);
  getd("snap_radius", cfg.metrics.snap_radius);
  getu("seed", cfg.seed);
  geti("workers", cfg.workers);
  getd("jitter_sigma", cfg.noise.jitter_sigma);
  getd("fp_per_kilopixel", cfg.noise.fp_per_kilopixel);
  getd("dropout", cfg.noise.dropout);
  getd("spacing_min", cfg.spacing_min);
  getd("spacing_max", cfg.spacing_max);
  getd("rounding_min", cfg.rounding_min);
  getd("rounding_max", cfg.rounding_max);

  if (!kv.empty())
    throw std::runtime_error("config: unknown key '" + kv.begin()->first + "'");
  cfg.metrics.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return from_text(ss.str());
}

void PipelineConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::runtime_error("config: " + what); };
  if (core_size <= 0) fail("core_size must be positive");
  if (margin < 0) fail("margin must be >= 0");
  if (margin > core_size / 2) fail("margin must be <= core_size/2");
  if (tile_size <= 0 || tile_size % core_size != 0)
    fail("tile_size must be a positive multiple of core_size");
  if (tile_rows < 1 || tile_cols < 1) fail("tile grid must be at least 1x1");
  if (sigma <= 0.0) fail("sigma must be positive");
  if (peak_threshold < 0.0 || peak_threshold > 1.0) fail("peak_threshold must be in [0,1]");
  if (nms_radius < 1) fail("nms_radius must be >= 1");
  if (corner.angle_threshold_deg <= 0.0 || corner.angle_threshold_deg >= 180.0)
    fail("angle_threshold must be in (0,180)");
  if (corner.arc_window <= 0.0) fail("arc_window must be positive");
  if (corner.gather_threshold < 0.0) fail("gather_threshold must be >= 0");
  if (extract.binarize_threshold <= 0.0f || extract.binarize_threshold >= 1.0f)
    fail("binarize_threshold must be in (0,1)");
  if (extract.short_skeleton_len < 1) fail("short_skeleton_len must be >= 1");
  if (roi_size <= 0 || roi_size % 2 != 0) fail("roi_size must be positive and even");
  if (d_model < 1) fail("d_model must be >= 1");
  if (attn_layers < 0) fail("attn_layers must be >= 0");
  if (learning_rate <= 0.0) fail("learning_rate must be positive");
  if (train_steps < 1) fail("train_steps must be >= 1");
  if (train_instances < 1) fail("train_instances must be >= 1");
  if (adjacency_snap_radius <= 0.0) fail("adjacency_snap_radius must be positive");
  if (merge_radius <= 0.0) fail("merge_radius must be positive");
  if (connector_spacing <= 0.0) fail("connector_spacing must be positive");
  if (metrics.relax_ratios.empty()) fail("relax_ratios must not be empty");
  for (double r : metrics.relax_ratios)
    if (r <= 0.0) fail("relax_ratios must be positive");
  if (metrics.tlts_phi <= 0.0 || metrics.tlts_phi >= 1.0) fail("tlts_phi must be in (0,1)");
  if (metrics.sample_pairs < 1) fail("sample_pairs must be >= 1");
  if (metrics.snap_radius <= 0.0) fail("snap_radius must be positive");
  if (workers < 1) fail("workers must be >= 1");
  if (noise.jitter_sigma < 0.0) fail("jitter_sigma must be >= 0");
  if (noise.fp_per_kilopixel < 0.0) fail("fp_per_kilopixel must be >= 0");
  if (noise.dropout < 0.0 || noise.dropout > 1.0) fail("dropout must be in [0,1]");
  if (spacing_min <= 0.0 || spacing_max < spacing_min) fail("bad spacing range");
  if (rounding_min < 0.0 || rounding_max < rounding_min) fail("bad rounding range");
}

CitySpec PipelineConfig::city_spec() const {
  CitySpec spec;
  spec.seed = seed;
  spec.tile_rows = tile_rows;
  spec.tile_cols = tile_cols;
  spec.tile_size = tile_size;
  spec.spacing_min = spacing_min;
  spec.spacing_max = spacing_max;
  spec.rounding_min = rounding_min;
  spec.rounding_max = rounding_max;
  spec.noise = noise;
  return spec;
}

std::string PipelineConfig::to_text() const {
  std::ostringstream os;
  os << "tile_size = " << tile_size << "\n";
  os << "core_size = " << core_size << "\n";
  os << "margin = " << margin << "\n";
  os << "tile_rows = " << tile_rows << "\n";
  os << "tile_cols = " << tile_cols << "\n";
  os << "sigma = " << sigma << "\n";
  os << "peak_threshold = " << peak_threshold << "\n";
  os << "nms_radius = " << nms_radius << "\n";
  os << "angle_threshold = " << corner.angle_threshold_deg << "\n";
  os << "arc_window = " << corner.arc_window << "\n";
  os << "gather_threshold = " << corner.gather_threshold << "\n";
  os << "aux_spacing = " << aux_spacing << "\n";
  os << "binarize_threshold = " << extract.binarize_threshold << "\n";
  os << "short_skeleton_len = " << extract.short_skeleton_len << "\n";
  os << "roi_size = " << roi_size << "\n";
  os << "d_model = " << d_model << "\n";
  os << "attn_layers = " << attn_layers << "\n";
  os << "learning_rate = " << learning_rate << "\n";
  os << "train_steps = " << train_steps << "\n";
  os << "train_instances = " << train_instances << "\n";
  os << "afa_threshold = " << afa_threshold << "\n";
  os << "adjacency_snap_radius = " << adjacency_snap_radius << "\n";
  os << "merge_radius = " << merge_radius << "\n";
  os << "connector_spacing = " << connector_spacing << "\n";
  os << "relax_ratios = " << format_list(metrics.relax_ratios) << "\n";
  os << "tlts_phi = " << metrics.tlts_phi << "\n";
  os << "sample_pairs = " << metrics.sample_pairs << "\n";
  os << "snap_radius = " << metrics.snap_radius << "\n";
  os << "seed = " << seed << "\n";
  os << "workers = " << workers << "\n";
  os << "jitter_sigma = " << noise.jitter_sigma << "\n";
  os << "fp_per_kilopixel = " << noise.fp_per_kilopixel << "\n";
  os << "dropout = " << noise.dropout << "\n";
  os << "spacing_min = " << spacing_min << "\n";
  os << "spacing_max = " << spacing_max << "\n";
  os << "rounding_min = " << rounding_min << "\n";
  os << "rounding_max = " << rounding_max << "\n";
  return os.str();
}

}  // namespace curbgraph
