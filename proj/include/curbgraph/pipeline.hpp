#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "curbgraph/config.hpp"
#include "curbgraph/graph.hpp"
#include "curbgraph/metrics.hpp"
#include "curbgraph/stitch.hpp"
#include "curbgraph/tiling.hpp"

namespace curbgraph {

// File-based pipeline stages. Every stage reads its inputs from and writes
// its outputs under `out`, keyed by frame names, so any stage can be replaced
// by an external producer of the same files.
struct PipelineIO {
  std::string out;  // output directory

  std::string gt_graph_path() const;
  std::string frames_path() const;
  std::string keypoints_path(const PatchFrame& f) const;
  std::string label_map_path(const PatchFrame& f) const;
  std::string infer_kp_path(const PatchFrame& f) const;
  std::string infer_seg_path(const PatchFrame& f) const;
  std::string averaged_kp_path(const PatchFrame& f) const;
  std::string extraction_path(const PatchFrame& f) const;
  std::string patch_graph_path(const PatchFrame& f) const;
  std::string stitched_graph_path() const;
  std::string checkpoint_path() const;
  std::string report_path() const;
  std::string svg_path() const;
};

std::vector<PatchFrame> city_frames(const PipelineConfig& config);
void save_frames(const std::string& path, const std::vector<PatchFrame>& frames);
std::vector<PatchFrame> load_frames(const std::string& path);

// Deterministic per-patch seed, independent of worker scheduling.
std::uint64_t patch_seed(const PipelineConfig& config, const PatchFrame& frame);

// Run fn(i) for i in [0,n) on `workers` threads. Results must only depend on i.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

// Stage drivers, shared by the CLI subcommands and run-all.
void stage_synth(const PipelineConfig& config, const PipelineIO& io);
void stage_split(const PipelineConfig& config, const PipelineIO& io);
void stage_labels(const PipelineConfig& config, const PipelineIO& io);
void stage_infer_sim(const PipelineConfig& config, const PipelineIO& io);
void stage_average_maps(const PipelineConfig& config, const PipelineIO& io);
void stage_extract(const PipelineConfig& config, const PipelineIO& io);
void stage_train_afa(const PipelineConfig& config, const PipelineIO& io);
// mode: "oracle" or "afa"; afa reads the checkpoint written by stage_train_afa
void stage_adjacency(const PipelineConfig& config, const PipelineIO& io,
                     const std::string& mode, const std::string& checkpoint);
void stage_stitch_graphs(const PipelineConfig& config, const PipelineIO& io);
// scale: "city" or "patch"
MetricReport stage_eval(const PipelineConfig& config, const PipelineIO& io,
                        const std::string& pred_path, const std::string& gt_path,
                        const std::string& scale);
void stage_render(const PipelineConfig& config, const PipelineIO& io,
                  const std::string& graph_path);

MetricReport run_all(const PipelineConfig& config, const PipelineIO& io,
                     const std::string& mode);

// Training-instance construction used by stage_train_afa and the tests:
// small scenes whose embeddings come from the real pipeline and whose labels
// come from the geometric oracle. Returns nothing when the scene yields
// fewer than two vertices.
std::optional<TrainInstance> make_training_instance(const PipelineConfig& config,
                                                    std::uint64_t scene_seed,
                                                    bool noiseless = true);

// Collect `count` usable instances from consecutive scene seeds.
std::vector<TrainInstance> make_training_instances(const PipelineConfig& config,
                                                   std::uint64_t first_seed, int count,
                                                   bool noiseless = true);

}  // namespace curbgraph
