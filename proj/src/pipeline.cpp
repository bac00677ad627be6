#include "curbgraph/pipeline.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "curbgraph/keypoints.hpp"
#include "curbgraph/raster_ops.hpp"
#include "curbgraph/svg.hpp"
#include "curbgraph/synth.hpp"
#include "curbgraph/vertex_extract.hpp"

namespace fs = std::filesystem;

namespace curbgraph {

namespace {

void ensure_dir(const std::string& path) { fs::create_directories(fs::path(path).parent_path()); }

void require_file(const std::string& path, const char* stage) {
  if (!fs::exists(path))
    throw std::runtime_error(std::string(stage) + ": missing input file " + path);
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  ensure_dir(path);
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << text;
}

Rect city_rect(const PipelineConfig& config) {
  return {0.0, 0.0, static_cast<double>(config.tile_cols) * config.tile_size,
          static_cast<double>(config.tile_rows) * config.tile_size};
}

}  // namespace

std::string PipelineIO::gt_graph_path() const { return out + "/gt_graph.json"; }
std::string PipelineIO::frames_path() const { return out + "/frames.json"; }
std::string PipelineIO::keypoints_path(const PatchFrame& f) const {
  return out + "/labels/" + f.name() + ".keypoints.json";
}
std::string PipelineIO::label_map_path(const PatchFrame& f) const {
  return out + "/labels/" + f.name() + ".kp.csbt";
}
std::string PipelineIO::infer_kp_path(const PatchFrame& f) const {
  return out + "/infer/" + f.name() + ".kp.csbt";
}
std::string PipelineIO::infer_seg_path(const PatchFrame& f) const {
  return out + "/infer/" + f.name() + ".seg.csbt";
}
std::string PipelineIO::averaged_kp_path(const PatchFrame& f) const {
  return out + "/averaged/" + f.name() + ".kp.csbt";
}
std::string PipelineIO::extraction_path(const PatchFrame& f) const {
  return out + "/extract/" + f.name() + ".vertices.json";
}
std::string PipelineIO::patch_graph_path(const PatchFrame& f) const {
  return out + "/graphs/" + f.name() + ".graph.json";
}
std::string PipelineIO::stitched_graph_path() const { return out + "/city_graph.json"; }
std::string PipelineIO::checkpoint_path() const { return out + "/afa_checkpoint.csbt"; }
std::string PipelineIO::report_path() const { return out + "/metrics.json"; }
std::string PipelineIO::svg_path() const { return out + "/city_graph.svg"; }

std::vector<PatchFrame> city_frames(const PipelineConfig& config) {
  std::vector<PatchFrame> frames;
  for (int tr = 0; tr < config.tile_rows; ++tr)
    for (int tc = 0; tc < config.tile_cols; ++tc) {
      auto tile = split_tile(tr, tc, config.tile_size, config.core_size, config.margin);
      frames.insert(frames.end(), tile.begin(), tile.end());
    }
  return frames;
}

void save_frames(const std::string& path, const std::vector<PatchFrame>& frames) {
  nlohmann::ordered_json doc;
  doc["frames"] = nlohmann::ordered_json::array();
  for (const auto& f : frames) {
    doc["frames"].push_back({{"tile", {f.tile_row(), f.tile_col()}},
                             {"patch", {f.patch_row(), f.patch_col()}},
                             {"core_origin", {f.core_origin().x, f.core_origin().y}},
                             {"core_size", f.core_size()},
                             {"margin", f.margin()}});
  }
  spit(path, doc.dump() + "\n");
}

std::vector<PatchFrame> load_frames(const std::string& path) {
  nlohmann::json doc = nlohmann::json::parse(slurp(path));
  std::vector<PatchFrame> frames;
  for (const auto& jf : doc.at("frames")) {
    frames.emplace_back(jf.at("tile").at(0).get<int>(), jf.at("tile").at(1).get<int>(),
                        jf.at("patch").at(0).get<int>(), jf.at("patch").at(1).get<int>(),
                        Point{jf.at("core_origin").at(0).get<double>(),
                              jf.at("core_origin").at(1).get<double>()},
                        jf.at("core_size").get<int>(), jf.at("margin").get<int>());
  }
  return frames;
}

std::uint64_t patch_seed(const PipelineConfig& config, const PatchFrame& frame) {
  int n = config.tile_size / config.core_size;
  std::uint64_t grow = static_cast<std::uint64_t>(frame.tile_row()) * n + frame.patch_row();
  std::uint64_t gcol = static_cast<std::uint64_t>(frame.tile_col()) * n + frame.patch_col();
  std::uint64_t flat = grow * (static_cast<std::uint64_t>(config.tile_cols) * n) + gcol;
  return Rng::derive(config.seed, 0x9a7c0000ULL + flat).next_u64();
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> threads;
  std::mutex err_mutex;
  std::exception_ptr first_error;
  for (int t = 0; t < workers; ++t) {
    threads.emplace_back([&]() {
      while (true) {
        int i = next.fetch_add(1);
        if (i >= n) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

void stage_synth(const PipelineConfig& config, const PipelineIO& io) {
  BoundaryGraph gt = generate_city(config.city_spec());
  ensure_dir(io.gt_graph_path());
  gt.save(io.gt_graph_path());
}

void stage_split(const PipelineConfig& config, const PipelineIO& io) {
  save_frames(io.frames_path(), city_frames(config));
}

void stage_labels(const PipelineConfig& config, const PipelineIO& io) {
  require_file(io.gt_graph_path(), "labels");
  require_file(io.frames_path(), "labels");
  BoundaryGraph gt = BoundaryGraph::load(io.gt_graph_path());
  auto frames = load_frames(io.frames_path());
  auto corners = corner_keypoints(gt, config.corner);
  parallel_for(static_cast<int>(frames.size()), config.workers, [&](int i) {
    const PatchFrame& f = frames[i];
    auto kps = merge_keypoints(corners, intersection_keypoints(gt, f, config.aux_spacing), f);
    spit(io.keypoints_path(f), keypoints_to_json(kps) + "\n");
    ensure_dir(io.label_map_path(f));
    write_csbt(io.label_map_path(f), keypoint_label_map(kps, f, config.sigma));
  });
}

void stage_infer_sim(const PipelineConfig& config, const PipelineIO& io) {
  require_file(io.gt_graph_path(), "infer-sim");
  require_file(io.frames_path(), "infer-sim");
  BoundaryGraph gt = BoundaryGraph::load(io.gt_graph_path());
  auto frames = load_frames(io.frames_path());
  parallel_for(static_cast<int>(frames.size()), config.workers, [&](int i) {
    const PatchFrame& f = frames[i];
    auto [kp, seg] = simulate_inference(gt, f, config.noise, config.corner,
                                        config.aux_spacing, config.sigma,
                                        patch_seed(config, f));
    ensure_dir(io.infer_kp_path(f));
    write_csbt(io.infer_kp_path(f), kp);
    write_csbt(io.infer_seg_path(f), seg);
  });
}

void stage_average_maps(const PipelineConfig& config, const PipelineIO& io) {
  require_file(io.frames_path(), "stitch");
  auto frames = load_frames(io.frames_path());
  std::vector<PatchResult> results(frames.size());
  parallel_for(static_cast<int>(frames.size()), config.workers, [&](int i) {
    require_file(io.infer_kp_path(frames[i]), "stitch");
    results[i].frame = frames[i];
    results[i].keypoint_map = read_csbt(io.infer_kp_path(frames[i]));
  });
  auto averaged = average_overlaps(results);
  parallel_for(static_cast<int>(frames.size()), config.workers, [&](int i) {
    ensure_dir(io.averaged_kp_path(frames[i]));
    write_csbt(io.averaged_kp_path(frames[i]), averaged[i].keypoint_map);
  });
}

void stage_extract(const PipelineConfig& config, const PipelineIO& io) {
  require_file(io.frames_path(), "extract");
  auto frames = load_frames(io.frames_path());
  parallel_for(static_cast<int>(frames.size()), config.workers, [&](int i) {
    const PatchFrame& f = frames[i];
    require_file(io.averaged_kp_path(f), "extract");
    RasterMap kp = read_csbt(io.averaged_kp_path(f));
    auto extraction = extract_vertices(kp, config.extract, f);
    spit(io.extraction_path(f), extraction_to_json(extraction) + "\n");
  });
}

std::optional<TrainInstance> make_training_instance(const PipelineConfig& config,
                                                    std::uint64_t scene_seed,
                                                    bool noiseless) {
  CitySpec spec = config.city_spec();
  spec.seed = scene_seed;
  spec.tile_rows = 1;
  spec.tile_cols = 1;
  spec.tile_size = config.core_size;
  BoundaryGraph gt = generate_city(spec);
  if (gt.empty()) return std::nullopt;
  PatchFrame frame = split_tile(0, 0, spec.tile_size, config.core_size, config.margin)[0];
  NoiseSpec noise = noiseless ? NoiseSpec{} : config.noise;
  auto [kp, seg] = simulate_inference(gt, frame, noise, config.corner, config.aux_spacing,
                                      config.sigma, Rng::derive(scene_seed, 7).next_u64());
  auto extraction = extract_vertices(kp, config.extract, frame);
  if (extraction.vertices.size() < 2) return std::nullopt;
  RasterMap tensor = make_feature_tensor(kp, seg, scene_seed);
  TrainInstance inst;
  inst.emb = assemble_embeddings(tensor, extraction, frame, config.roi_size);
  inst.label = oracle_adjacency(extraction, gt, config.adjacency_snap_radius);
  return inst;
}

std::vector<TrainInstance> make_training_instances(const PipelineConfig& config,
                                                   std::uint64_t first_seed, int count,
                                                   bool noiseless) {
  std::vector<TrainInstance> out;
  std::uint64_t seed = first_seed;
  int attempts = 0;
  while (static_cast<int>(out.size()) < count && attempts < count * 20) {
    if (auto inst = make_training_instance(config, seed, noiseless))
      out.push_back(std::move(*inst));
    ++seed;
    ++attempts;
  }
  if (static_cast<int>(out.size()) < count)
    throw std::runtime_error("train: could not build enough training instances");
  return out;
}

void stage_train_afa(const PipelineConfig& config, const PipelineIO& io) {
  auto instances =
      make_training_instances(config, Rng::derive(config.seed, 0x7a11).next_u64() | 1,
                              config.train_instances, true);
  AfaParams params = AfaParams::init(kEmbeddingLen, config.d_model, config.attn_layers,
                                     Rng::derive(config.seed, 0xaf0).next_u64());
  auto pool_loss = [&]() {
    double total = 0.0;
    for (const auto& inst : instances)
      total += adjacency_loss_value(decoder_forward(inst.emb, params), inst.label);
    return total / static_cast<double>(instances.size());
  };
  double initial = pool_loss();
  std::cout << "initial loss " << initial << "\n";
  // one epoch is a full pass over the instance pool
  int per_epoch = static_cast<int>(instances.size());
  int done = 0, epoch = 0;
  while (done < config.train_steps) {
    int steps = std::min(per_epoch, config.train_steps - done);
    double epoch_loss = 0.0;
    for (int s = 0; s < steps; ++s) {
      const auto& inst = instances[(done + s) % instances.size()];
      LossAndGrads lg = adjacency_loss(inst.emb, params, inst.label);
      sgd_step(params, lg.grads, config.learning_rate);
      epoch_loss += lg.loss;
    }
    done += steps;
    std::cout << "epoch " << ++epoch << " steps " << done << " mean loss "
              << epoch_loss / steps << "\n";
  }
  std::cout << "final loss " << pool_loss() << " (initial " << initial << ")\n";
  ensure_dir(io.checkpoint_path());
  save_afa_params(io.checkpoint_path(), params);
}

void stage_adjacency(const PipelineConfig& config, const PipelineIO& io,
                     const std::string& mode, const std::string& checkpoint) {
  require_file(io.frames_path(), "adjacency");
  auto frames = load_frames(io.frames_path());

  BoundaryGraph gt;
  AfaParams params;
  if (mode == "oracle") {
    require_file(io.gt_graph_path(), "adjacency");
    gt = BoundaryGraph::load(io.gt_graph_path());
  } else if (mode == "afa") {
    std::string ckpt = checkpoint.empty() ? io.checkpoint_path() : checkpoint;
    require_file(ckpt, "adjacency");
    params = load_afa_params(ckpt);
  } else {
    throw std::runtime_error("adjacency: unknown mode '" + mode + "'");
  }

  parallel_for(static_cast<int>(frames.size()), config.workers, [&](int i) {
    const PatchFrame& f = frames[i];
    require_file(io.extraction_path(f), "adjacency");
    auto extraction = extraction_from_json(slurp(io.extraction_path(f)));
    Eigen::Index m = static_cast<Eigen::Index>(extraction.vertices.size());
    BoolMat adjacency = BoolMat::Zero(m, m);
    if (m > 0) {
      if (mode == "oracle") {
        adjacency = oracle_adjacency(extraction, gt, config.adjacency_snap_radius);
      } else {
        require_file(io.averaged_kp_path(f), "adjacency");
        require_file(io.infer_seg_path(f), "adjacency");
        RasterMap kp = read_csbt(io.averaged_kp_path(f));
        RasterMap seg = read_csbt(io.infer_seg_path(f));
        RasterMap tensor = make_feature_tensor(kp, seg, patch_seed(config, f));
        Mat emb = assemble_embeddings(tensor, extraction, f, config.roi_size);
        Mat scores = decoder_forward(emb, params);
        adjacency = binarize_adjacency(scores, config.afa_threshold);
      }
    }
    BoundaryGraph graph = assemble_patch_graph(extraction, adjacency, config.connector_spacing);
    ensure_dir(io.patch_graph_path(f));
    graph.save(io.patch_graph_path(f));
  });
}

void stage_stitch_graphs(const PipelineConfig& config, const PipelineIO& io) {
  require_file(io.frames_path(), "stitch");
  auto frames = load_frames(io.frames_path());
  std::vector<PatchResult> results(frames.size());
  parallel_for(static_cast<int>(frames.size()), config.workers, [&](int i) {
    require_file(io.patch_graph_path(frames[i]), "stitch");
    results[i].frame = frames[i];
    results[i].graph = BoundaryGraph::load(io.patch_graph_path(frames[i]));
  });
  BoundaryGraph city = stitch_graphs(results, config.merge_radius);
  ensure_dir(io.stitched_graph_path());
  city.save(io.stitched_graph_path());
}

MetricReport stage_eval(const PipelineConfig& config, const PipelineIO& io,
                        const std::string& pred_path, const std::string& gt_path,
                        const std::string& scale) {
  std::string gt_file = gt_path.empty() ? io.gt_graph_path() : gt_path;
  require_file(gt_file, "eval");
  BoundaryGraph gt = BoundaryGraph::load(gt_file);

  if (scale == "city") {
    std::string pred_file = pred_path.empty() ? io.stitched_graph_path() : pred_path;
    require_file(pred_file, "eval");
    BoundaryGraph pred = BoundaryGraph::load(pred_file);
    return evaluate(pred, gt, city_rect(config), config.metrics);
  }
  if (scale != "patch") throw std::runtime_error("eval: unknown scale '" + scale + "'");

  require_file(io.frames_path(), "eval");
  auto frames = load_frames(io.frames_path());
  MetricReport total;
  total.pixel.resize(config.metrics.relax_ratios.size());
  for (size_t t = 0; t < total.pixel.size(); ++t)
    total.pixel[t].relax_ratio = config.metrics.relax_ratios[t];
  int n_pixel = 0, n_topo = 0;
  double apls_sum = 0.0, tlts_sum = 0.0;
  for (size_t i = 0; i < frames.size(); ++i) {
    const PatchFrame& f = frames[i];
    require_file(io.patch_graph_path(f), "eval");
    BoundaryGraph pred = BoundaryGraph::load(io.patch_graph_path(f));
    Rect core = f.core_rect();
    BoundaryGraph gt_clip = clip_graph(gt, core);
    BoundaryGraph pred_clip = clip_graph(pred, core);
    if (gt_clip.empty() && pred_clip.empty()) continue;
    MetricConfig mc = config.metrics;
    mc.seed = Rng::derive(config.metrics.seed, i).next_u64();
    MetricReport r = evaluate(pred_clip, gt_clip, core, mc);
    for (size_t t = 0; t < total.pixel.size(); ++t) {
      total.pixel[t].precision += r.pixel[t].precision;
      total.pixel[t].recall += r.pixel[t].recall;
      total.pixel[t].f1 += r.pixel[t].f1;
    }
    ++n_pixel;
    if (r.apls) {
      apls_sum += *r.apls;
      tlts_sum += *r.tlts;
      ++n_topo;
    }
    total.sampled_pairs += r.sampled_pairs;
    total.unmatched_pairs += r.unmatched_pairs;
  }
  if (n_pixel > 0)
    for (auto& s : total.pixel) {
      s.precision /= n_pixel;
      s.recall /= n_pixel;
      s.f1 /= n_pixel;
    }
  if (n_topo > 0) {
    total.apls = apls_sum / n_topo;
    total.tlts = tlts_sum / n_topo;
  }
  return total;
}

void stage_render(const PipelineConfig& config, const PipelineIO& io,
                  const std::string& graph_path) {
  std::string path = graph_path.empty() ? io.stitched_graph_path() : graph_path;
  require_file(path, "render");
  BoundaryGraph graph = BoundaryGraph::load(path);
  std::vector<PatchFrame> frames;
  if (fs::exists(io.frames_path())) frames = load_frames(io.frames_path());
  ensure_dir(io.svg_path());
  render_svg(io.svg_path(), graph, frames);
  (void)config;
}

MetricReport run_all(const PipelineConfig& config, const PipelineIO& io,
                     const std::string& mode) {
  stage_synth(config, io);
  stage_split(config, io);
  stage_labels(config, io);
  stage_infer_sim(config, io);
  stage_average_maps(config, io);
  stage_extract(config, io);
  if (mode == "afa" && !fs::exists(io.checkpoint_path())) stage_train_afa(config, io);
  stage_adjacency(config, io, mode, "");
  stage_stitch_graphs(config, io);
  MetricReport report = stage_eval(config, io, "", "", "city");
  spit(io.report_path(), report.to_json() + "\n");
  return report;
}

}  // namespace curbgraph
