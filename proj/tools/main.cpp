#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>

#include "curbgraph/config.hpp"
#include "curbgraph/pipeline.hpp"

using namespace curbgraph;

int main(int argc, char** argv) {
  CLI::App app{"city-scale road-boundary graph extraction pipeline"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::optional<std::uint64_t> seed_override;
  std::optional<int> workers_override;
  app.add_option("--config", config_path, "pipeline config file (key = value)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed_override, "override the config seed");
  app.add_option("--workers", workers_override, "override the worker count");

  auto* cmd_synth = app.add_subcommand("synth", "generate the synthetic ground-truth city");
  auto* cmd_split = app.add_subcommand("split", "write the tile/patch frame manifest");
  auto* cmd_labels = app.add_subcommand("labels", "keypoints and label maps per patch");
  auto* cmd_infer = app.add_subcommand("infer-sim", "simulated keypoint/segmentation maps");
  auto* cmd_extract = app.add_subcommand("extract", "graph vertices from averaged maps");

  auto* cmd_adj = app.add_subcommand("adjacency", "per-patch graphs from vertex adjacency");
  std::string adj_mode = "oracle", checkpoint;
  bool adj_train = false;
  cmd_adj->add_option("--mode", adj_mode, "oracle | afa")->check(CLI::IsMember({"oracle", "afa"}));
  cmd_adj->add_flag("--train", adj_train, "train the afa decoder first");
  cmd_adj->add_option("--checkpoint", checkpoint, "afa parameter checkpoint");

  auto* cmd_stitch = app.add_subcommand("stitch", "average maps or merge patch graphs");
  std::string stitch_what = "graphs";
  cmd_stitch->add_option("--what", stitch_what, "maps | graphs")
      ->check(CLI::IsMember({"maps", "graphs"}));

  auto* cmd_eval = app.add_subcommand("eval", "score a predicted graph against ground truth");
  std::string eval_pred, eval_gt, eval_scale = "city";
  cmd_eval->add_option("--pred", eval_pred, "predicted graph json (default: stitched output)");
  cmd_eval->add_option("--gt", eval_gt, "ground-truth graph json (default: synth output)");
  cmd_eval->add_option("--scale", eval_scale, "city | patch")
      ->check(CLI::IsMember({"city", "patch"}));

  auto* cmd_render = app.add_subcommand("render", "svg rendering of a graph");
  std::string render_graph;
  cmd_render->add_option("--graph", render_graph, "graph json (default: stitched output)");

  auto* cmd_all = app.add_subcommand("run-all", "run every stage end to end");
  std::string all_mode = "oracle";
  cmd_all->add_option("--mode", all_mode, "oracle | afa")->check(CLI::IsMember({"oracle", "afa"}));

  CLI11_PARSE(app, argc, argv);

  try {
    PipelineConfig config =
        config_path.empty() ? PipelineConfig{} : PipelineConfig::load(config_path);
    if (seed_override) {
      config.seed = *seed_override;
      config.metrics.seed = *seed_override;
    }
    if (workers_override) config.workers = *workers_override;
    config.validate();
    PipelineIO io{out_dir};

    if (cmd_synth->parsed()) stage_synth(config, io);
    if (cmd_split->parsed()) stage_split(config, io);
    if (cmd_labels->parsed()) stage_labels(config, io);
    if (cmd_infer->parsed()) stage_infer_sim(config, io);
    if (cmd_extract->parsed()) stage_extract(config, io);
    if (cmd_adj->parsed()) {
      if (adj_train) stage_train_afa(config, io);
      if (adj_mode == "afa" && checkpoint.empty() && adj_train) checkpoint = io.checkpoint_path();
      stage_adjacency(config, io, adj_mode, checkpoint);
    }
    if (cmd_stitch->parsed()) {
      if (stitch_what == "maps")
        stage_average_maps(config, io);
      else
        stage_stitch_graphs(config, io);
    }
    if (cmd_eval->parsed()) {
      MetricReport report = stage_eval(config, io, eval_pred, eval_gt, eval_scale);
      std::cout << report.to_table();
      std::ofstream os(io.report_path());
      os << report.to_json() << "\n";
    }
    if (cmd_render->parsed()) stage_render(config, io, render_graph);
    if (cmd_all->parsed()) {
      MetricReport report = run_all(config, io, all_mode);
      std::cout << report.to_table();
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
