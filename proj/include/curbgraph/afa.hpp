#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "curbgraph/graph.hpp"
#include "curbgraph/raster.hpp"
#include "curbgraph/rng.hpp"
#include "curbgraph/tiling.hpp"
#include "curbgraph/vertex_extract.hpp"

namespace curbgraph {

using Mat = Eigen::MatrixXd;
using BoolMat = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr int kDescriptorLen = 1024;
inline constexpr int kEmbeddingLen = 2 * kDescriptorLen + 2;  // 2050
inline constexpr int kDescriptorGrid = 4;
inline constexpr int kDescriptorBins = 8;

// Deterministic stand-in for the learned ROI encoder: per-channel mean, std,
// min, max over a 4x4 spatial grid (384 values) followed by per-cell 8-bin
// value histograms, truncated to 1024. Requires a 6-channel tensor.
std::vector<double> encode_features(const RasterMap& tensor);

// One row per vertex: [local descriptor of the LxL crop | shared global
// descriptor | normalized local coordinates]. Crops are zero-padded at the
// tensor border. Returns a 0x2050 matrix for zero vertices.
Mat assemble_embeddings(const RasterMap& tensor, const ExtractedVertices& vertices,
                        const PatchFrame& frame, int roi_size);

struct AttentionLayerParams {
  Mat w_q, w_k, w_v;  // d_in x d_model
};

struct AfaParams {
  std::vector<AttentionLayerParams> layers;
  Mat head_w_q, head_w_k;  // d_model x d_model

  int input_dim() const {
    return layers.empty() ? static_cast<int>(head_w_q.rows())
                          : static_cast<int>(layers.front().w_q.rows());
  }
  int model_dim() const { return static_cast<int>(head_w_q.cols()); }

  static AfaParams init(int d_in, int d_model, int num_layers, std::uint64_t seed);
};

// softmax(norm(Q) norm(K)^T) V with row-wise L2 normalization.
Mat attention_layer(const Mat& x, const AttentionLayerParams& params);

// norm(X Wq) norm(X Wk)^T; entries are cosine similarities in [-1,1].
Mat afa_head(const Mat& x, const Mat& w_q, const Mat& w_k);

// The attention stack followed by the head. With no layers the head is
// applied to the embeddings directly.
Mat decoder_forward(const Mat& emb, const AfaParams& params);

// Mean binary cross-entropy over off-diagonal entries after mapping scores
// from [-1,1] to probabilities p = clamp((s+1)/2, eps, 1-eps).
// Throws if the label is asymmetric or has a true diagonal.
double adjacency_loss_value(const Mat& scores, const BoolMat& label);

struct LossAndGrads {
  double loss = 0.0;
  AfaParams grads;  // same shapes as the parameters
};

// Forward pass plus reverse-mode gradients of the loss w.r.t. every
// parameter tensor.
LossAndGrads adjacency_loss(const Mat& emb, const AfaParams& params, const BoolMat& label);

// A[i][j] = scores[i][j] > t || scores[j][i] > t, diagonal forced false.
// The threshold is in raw score space; 0.0 corresponds to 0.5 after the
// [-1,1] -> [0,1] probability mapping.
BoolMat binarize_adjacency(const Mat& scores, double threshold);

// Geometric labeler: snap each vertex to the nearest point of a ground-truth
// polyline (rows of vertices beyond snap_radius stay all-false); two vertices
// are adjacent iff they snap to the same polyline with no third vertex
// strictly between them along it. Cyclic betweenness on closed polylines.
BoolMat oracle_adjacency(const ExtractedVertices& vertices, const BoundaryGraph& gt,
                         double snap_radius);

// Fraction of off-diagonal entries on which the two matrices agree.
double adjacency_agreement(const BoolMat& a, const BoolMat& b);

struct TrainInstance {
  Mat emb;
  BoolMat label;
};

struct TrainConfig {
  double learning_rate = 1e-2;
  int steps = 200;  // one instance per step, cycling
  std::uint64_t seed = 0;
  bool verbose = false;
};

struct TrainReport {
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::vector<double> step_losses;
};

void sgd_step(AfaParams& params, const AfaParams& grads, double learning_rate);

TrainReport train_decoder(AfaParams& params, const std::vector<TrainInstance>& instances,
                          const TrainConfig& config);

// Checkpoints: one CSBT record per named tensor plus a JSON manifest
// (name -> shape, in record order) in a "<path>.json" sidecar.
void save_afa_params(const std::string& path, const AfaParams& params);
AfaParams load_afa_params(const std::string& path);

}  // namespace curbgraph
