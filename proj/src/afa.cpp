#include "curbgraph/afa.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

namespace curbgraph {

namespace {

constexpr double kNormEps = 1e-12;
constexpr double kProbEps = 1e-6;

void check_finite(const Mat& m, const char* what) {
  if (!m.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite values");
}

// row-wise L2 normalization; rows with norm < eps are scaled by 1/eps
Mat row_normalize(const Mat& m, Eigen::VectorXd* norms_out = nullptr) {
  Mat out(m.rows(), m.cols());
  Eigen::VectorXd norms(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double r = m.row(i).norm();
    double denom = std::max(r, kNormEps);
    norms(i) = denom;
    out.row(i) = m.row(i) / denom;
  }
  if (norms_out) *norms_out = norms;
  return out;
}

// gradient through u = x / max(||x||, eps), given du and the forward values
Mat row_normalize_backward(const Mat& du, const Mat& u, const Eigen::VectorXd& norms,
                           const Mat& x) {
  Mat dx(du.rows(), du.cols());
  for (Eigen::Index i = 0; i < du.rows(); ++i) {
    double r = norms(i);
    if (x.row(i).norm() < kNormEps) {
      dx.row(i) = du.row(i) / kNormEps;
    } else {
      double proj = u.row(i).dot(du.row(i));
      dx.row(i) = (du.row(i) - u.row(i) * proj) / r;
    }
  }
  return dx;
}

Mat softmax_rows(const Mat& s) {
  Mat out(s.rows(), s.cols());
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    double mx = s.row(i).maxCoeff();
    Eigen::VectorXd e = (s.row(i).array() - mx).exp();
    out.row(i) = e.transpose() / e.sum();
  }
  return out;
}

// dS from dA through the row softmax A
Mat softmax_rows_backward(const Mat& da, const Mat& a) {
  Mat ds(da.rows(), da.cols());
  for (Eigen::Index i = 0; i < da.rows(); ++i) {
    double inner = a.row(i).dot(da.row(i));
    ds.row(i) = a.row(i).array() * (da.row(i).array() - inner);
  }
  return ds;
}

struct LayerTrace {
  Mat x, q, k, v, qn, kn, a, y;
  Eigen::VectorXd qr, kr;
};

LayerTrace attention_forward(const Mat& x, const AttentionLayerParams& p) {
  LayerTrace t;
  t.x = x;
  t.q = x * p.w_q;
  t.k = x * p.w_k;
  t.v = x * p.w_v;
  t.qn = row_normalize(t.q, &t.qr);
  t.kn = row_normalize(t.k, &t.kr);
  t.a = softmax_rows(t.qn * t.kn.transpose());
  t.y = t.a * t.v;
  return t;
}

struct HeadTrace {
  Mat x, q, k, qn, kn, scores;
  Eigen::VectorXd qr, kr;
};

HeadTrace head_forward(const Mat& x, const Mat& w_q, const Mat& w_k) {
  HeadTrace t;
  t.x = x;
  t.q = x * w_q;
  t.k = x * w_k;
  t.qn = row_normalize(t.q, &t.qr);
  t.kn = row_normalize(t.k, &t.kr);
  t.scores = t.qn * t.kn.transpose();
  return t;
}

void check_label(const Mat& scores, const BoolMat& label) {
  if (scores.rows() != scores.cols()) throw std::invalid_argument("loss: scores not square");
  if (label.rows() != scores.rows() || label.cols() != scores.cols())
    throw std::invalid_argument("loss: label shape mismatch");
  for (Eigen::Index i = 0; i < label.rows(); ++i) {
    if (label(i, i)) throw std::invalid_argument("loss: label diagonal must be false");
    for (Eigen::Index j = i + 1; j < label.cols(); ++j)
      if (label(i, j) != label(j, i))
        throw std::invalid_argument("loss: label must be symmetric");
  }
}

// BCE on p = clamp((s+1)/2, eps, 1-eps), averaged over off-diagonal entries;
// optionally also emits dL/ds
double bce_scores(const Mat& scores, const BoolMat& label, Mat* dscores) {
  Eigen::Index m = scores.rows();
  double n_off = static_cast<double>(m) * (m - 1);
  if (dscores) *dscores = Mat::Zero(m, m);
  if (n_off == 0.0) return 0.0;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i == j) continue;
      double raw = (scores(i, j) + 1.0) / 2.0;
      double p = std::clamp(raw, kProbEps, 1.0 - kProbEps);
      double y = label(i, j) ? 1.0 : 0.0;
      loss += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
      if (dscores && raw > kProbEps && raw < 1.0 - kProbEps) {
        // d/ds of BCE((s+1)/2): (p - y) / (p (1-p)) * 1/2
        (*dscores)(i, j) = (p - y) / (p * (1.0 - p)) / 2.0 / n_off;
      }
    }
  }
  return loss / n_off;
}

}  // namespace

std::vector<double> encode_features(const RasterMap& tensor) {
  if (tensor.channels != 6)
    throw std::invalid_argument("encode_features: 6-channel tensor expected");
  const int g = kDescriptorGrid;
  const int bins = kDescriptorBins;
  std::vector<double> stats;
  stats.reserve(6 * g * g * 4);
  std::vector<double> hist;
  hist.reserve(6 * g * g * bins);

  for (int c = 0; c < 6; ++c) {
    for (int gy = 0; gy < g; ++gy) {
      for (int gx = 0; gx < g; ++gx) {
        int y0 = gy * tensor.height / g, y1 = (gy + 1) * tensor.height / g;
        int x0 = gx * tensor.width / g, x1 = (gx + 1) * tensor.width / g;
        long n = static_cast<long>(y1 - y0) * (x1 - x0);
        double sum = 0.0, sum2 = 0.0;
        double mn = n > 0 ? 1.0 : 0.0, mx = 0.0;
        std::array<long, kDescriptorBins> counts{};
        for (int y = y0; y < y1; ++y) {
          for (int x = x0; x < x1; ++x) {
            double v = tensor.at(x, y, c);
            sum += v;
            sum2 += v * v;
            mn = std::min(mn, v);
            mx = std::max(mx, v);
            int b = std::min(bins - 1, static_cast<int>(v * bins));
            ++counts[b];
          }
        }
        double mean = n > 0 ? sum / n : 0.0;
        double var = n > 0 ? std::max(0.0, sum2 / n - mean * mean) : 0.0;
        stats.push_back(mean);
        stats.push_back(std::sqrt(var));
        stats.push_back(mn);
        stats.push_back(mx);
        for (int b = 0; b < bins; ++b)
          hist.push_back(n > 0 ? static_cast<double>(counts[b]) / n : 0.0);
      }
    }
  }

  std::vector<double> out;
  out.reserve(kDescriptorLen);
  out.insert(out.end(), stats.begin(), stats.end());
  out.insert(out.end(), hist.begin(), hist.end());
  out.resize(kDescriptorLen, 0.0);  // truncate or zero-pad to exactly 1024
  return out;
}

namespace {

RasterMap crop_tensor(const RasterMap& tensor, int cx, int cy, int size) {
  RasterMap out(size, size, tensor.channels, 0.0f);
  int half = size / 2;
  for (int y = 0; y < size; ++y) {
    int sy = cy - half + y;
    if (sy < 0 || sy >= tensor.height) continue;
    for (int x = 0; x < size; ++x) {
      int sx = cx - half + x;
      if (sx < 0 || sx >= tensor.width) continue;
      for (int c = 0; c < tensor.channels; ++c) out.at(x, y, c) = tensor.at(sx, sy, c);
    }
  }
  return out;
}

}  // namespace

Mat assemble_embeddings(const RasterMap& tensor, const ExtractedVertices& vertices,
                        const PatchFrame& frame, int roi_size) {
  if (roi_size <= 0 || roi_size % 2 != 0)
    throw std::invalid_argument("assemble_embeddings: roi_size must be even and positive");
  Eigen::Index m = static_cast<Eigen::Index>(vertices.vertices.size());
  Mat emb(m, kEmbeddingLen);
  if (m == 0) return emb;

  std::vector<double> global = encode_features(tensor);
  double denom = static_cast<double>(frame.expanded_size());
  for (Eigen::Index i = 0; i < m; ++i) {
    Point local = frame.to_local(vertices.vertices[i]);
    int cx = static_cast<int>(std::lround(local.x));
    int cy = static_cast<int>(std::lround(local.y));
    std::vector<double> local_desc = encode_features(crop_tensor(tensor, cx, cy, roi_size));
    for (int k = 0; k < kDescriptorLen; ++k) emb(i, k) = global[k];
    for (int k = 0; k < kDescriptorLen; ++k) emb(i, kDescriptorLen + k) = local_desc[k];
    emb(i, 2 * kDescriptorLen) = std::clamp(local.x / denom, 0.0, 1.0);
    emb(i, 2 * kDescriptorLen + 1) = std::clamp(local.y / denom, 0.0, 1.0);
  }
  return emb;
}

AfaParams AfaParams::init(int d_in, int d_model, int num_layers, std::uint64_t seed) {
  Rng rng(seed);
  auto make = [&](int rows, int cols) {
    Mat m(rows, cols);
    double scale = 1.0 / std::sqrt(static_cast<double>(rows));
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = rng.normal(0.0, scale);
    return m;
  };
  AfaParams p;
  int d = d_in;
  for (int l = 0; l < num_layers; ++l) {
    p.layers.push_back({make(d, d_model), make(d, d_model), make(d, d_model)});
    d = d_model;
  }
  p.head_w_q = make(d, d);
  p.head_w_k = make(d, d);
  return p;
}

Mat attention_layer(const Mat& x, const AttentionLayerParams& params) {
  if (x.rows() < 1) throw std::invalid_argument("attention_layer: M must be >= 1");
  check_finite(x, "attention_layer");
  return attention_forward(x, params).y;
}

Mat afa_head(const Mat& x, const Mat& w_q, const Mat& w_k) {
  if (x.rows() < 1) throw std::invalid_argument("afa_head: M must be >= 1");
  check_finite(x, "afa_head");
  return head_forward(x, w_q, w_k).scores;
}

Mat decoder_forward(const Mat& emb, const AfaParams& params) {
  Mat x = emb;
  for (const auto& layer : params.layers) x = attention_layer(x, layer);
  return afa_head(x, params.head_w_q, params.head_w_k);
}

double adjacency_loss_value(const Mat& scores, const BoolMat& label) {
  check_label(scores, label);
  return bce_scores(scores, label, nullptr);
}

LossAndGrads adjacency_loss(const Mat& emb, const AfaParams& params, const BoolMat& label) {
  check_finite(emb, "adjacency_loss");

  std::vector<LayerTrace> traces;
  Mat x = emb;
  for (const auto& layer : params.layers) {
    traces.push_back(attention_forward(x, layer));
    x = traces.back().y;
  }
  HeadTrace head = head_forward(x, params.head_w_q, params.head_w_k);
  check_label(head.scores, label);

  LossAndGrads out;
  Mat dscores;
  out.loss = bce_scores(head.scores, label, &dscores);

  // head backward: scores = qn kn^T
  Mat dqn = dscores * head.kn;
  Mat dkn = dscores.transpose() * head.qn;
  Mat dq = row_normalize_backward(dqn, head.qn, head.qr, head.q);
  Mat dk = row_normalize_backward(dkn, head.kn, head.kr, head.k);
  out.grads.head_w_q = head.x.transpose() * dq;
  out.grads.head_w_k = head.x.transpose() * dk;
  Mat dx = dq * params.head_w_q.transpose() + dk * params.head_w_k.transpose();

  out.grads.layers.resize(params.layers.size());
  for (int l = static_cast<int>(params.layers.size()) - 1; l >= 0; --l) {
    const LayerTrace& t = traces[l];
    const AttentionLayerParams& p = params.layers[l];
    Mat dy = dx;
    Mat da = dy * t.v.transpose();
    Mat dv = t.a.transpose() * dy;
    Mat ds = softmax_rows_backward(da, t.a);
    Mat dqn_l = ds * t.kn;
    Mat dkn_l = ds.transpose() * t.qn;
    Mat dq_l = row_normalize_backward(dqn_l, t.qn, t.qr, t.q);
    Mat dk_l = row_normalize_backward(dkn_l, t.kn, t.kr, t.k);
    out.grads.layers[l].w_q = t.x.transpose() * dq_l;
    out.grads.layers[l].w_k = t.x.transpose() * dk_l;
    out.grads.layers[l].w_v = t.x.transpose() * dv;
    dx = dq_l * p.w_q.transpose() + dk_l * p.w_k.transpose() + dv * p.w_v.transpose();
  }
  return out;
}

BoolMat binarize_adjacency(const Mat& scores, double threshold) {
  if (scores.rows() != scores.cols())
    throw std::invalid_argument("binarize_adjacency: scores not square");
  Eigen::Index m = scores.rows();
  BoolMat out = BoolMat::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i == j) continue;
      if (scores(i, j) > threshold || scores(j, i) > threshold) out(i, j) = 1;
    }
  return out;
}

BoolMat oracle_adjacency(const ExtractedVertices& vertices, const BoundaryGraph& gt,
                         double snap_radius) {
  if (snap_radius <= 0.0)
    throw std::invalid_argument("oracle_adjacency: snap_radius must be positive");
  auto polylines = decompose_polylines(gt);
  Eigen::Index m = static_cast<Eigen::Index>(vertices.vertices.size());
  BoolMat out = BoolMat::Zero(m, m);

  struct Snap {
    int vertex = -1;
    double t = 0.0;  // arc-length position along the polyline
  };
  std::vector<std::vector<Snap>> per_line(polylines.size());

  for (Eigen::Index vi = 0; vi < m; ++vi) {
    Point p = vertices.vertices[vi];
    double best_d = std::numeric_limits<double>::infinity();
    int best_line = -1;
    double best_t = 0.0;
    for (size_t li = 0; li < polylines.size(); ++li) {
      const auto& pl = polylines[li];
      if (pl.pts.size() < 2) continue;
      size_t nseg = pl.closed ? pl.pts.size() : pl.pts.size() - 1;
      double arc = 0.0;
      for (size_t s = 0; s < nseg; ++s) {
        Point a = pl.pts[s];
        Point b = pl.pts[(s + 1) % pl.pts.size()];
        double tt;
        Point proj = project_point_segment(p, a, b, &tt);
        double d = dist(p, proj);
        if (d < best_d) {
          best_d = d;
          best_line = static_cast<int>(li);
          best_t = arc + tt * dist(a, b);
        }
        arc += dist(a, b);
      }
    }
    if (best_line >= 0 && best_d <= snap_radius)
      per_line[best_line].push_back({static_cast<int>(vi), best_t});
  }

  for (size_t li = 0; li < polylines.size(); ++li) {
    auto& snaps = per_line[li];
    if (snaps.size() < 2) continue;
    std::sort(snaps.begin(), snaps.end(), [](const Snap& a, const Snap& b) {
      if (a.t != b.t) return a.t < b.t;
      return a.vertex < b.vertex;
    });
    for (size_t k = 0; k + 1 < snaps.size(); ++k) {
      out(snaps[k].vertex, snaps[k + 1].vertex) = 1;
      out(snaps[k + 1].vertex, snaps[k].vertex) = 1;
    }
    if (polylines[li].closed && snaps.size() >= 3) {
      out(snaps.back().vertex, snaps.front().vertex) = 1;
      out(snaps.front().vertex, snaps.back().vertex) = 1;
    }
  }
  return out;
}

double adjacency_agreement(const BoolMat& a, const BoolMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("adjacency_agreement: shape mismatch");
  Eigen::Index m = a.rows();
  if (m <= 1) return 1.0;
  long agree = 0, total = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i == j) continue;
      ++total;
      if ((a(i, j) != 0) == (b(i, j) != 0)) ++agree;
    }
  return static_cast<double>(agree) / static_cast<double>(total);
}

void sgd_step(AfaParams& params, const AfaParams& grads, double learning_rate) {
  for (size_t l = 0; l < params.layers.size(); ++l) {
    params.layers[l].w_q -= learning_rate * grads.layers[l].w_q;
    params.layers[l].w_k -= learning_rate * grads.layers[l].w_k;
    params.layers[l].w_v -= learning_rate * grads.layers[l].w_v;
  }
  params.head_w_q -= learning_rate * grads.head_w_q;
  params.head_w_k -= learning_rate * grads.head_w_k;
}

TrainReport train_decoder(AfaParams& params, const std::vector<TrainInstance>& instances,
                          const TrainConfig& config) {
  if (instances.empty()) throw std::invalid_argument("train_decoder: no instances");
  TrainReport report;
  auto pool_loss = [&]() {
    double total = 0.0;
    for (const auto& inst : instances)
      total += adjacency_loss_value(decoder_forward(inst.emb, params), inst.label);
    return total / static_cast<double>(instances.size());
  };
  report.initial_loss = pool_loss();
  for (int step = 0; step < config.steps; ++step) {
    const auto& inst = instances[step % instances.size()];
    LossAndGrads lg = adjacency_loss(inst.emb, params, inst.label);
    sgd_step(params, lg.grads, config.learning_rate);
    report.step_losses.push_back(lg.loss);
  }
  report.final_loss = pool_loss();
  return report;
}

void save_afa_params(const std::string& path, const AfaParams& params) {
  std::vector<CsbtRecord> records;
  nlohmann::ordered_json manifest;
  manifest["tensors"] = nlohmann::ordered_json::array();
  auto add = [&](const std::string& name, const Mat& m) {
    CsbtRecord rec;
    rec.dims = {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())};
    rec.data.reserve(m.size());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        rec.data.push_back(static_cast<float>(m(i, j)));
    records.push_back(std::move(rec));
    manifest["tensors"].push_back({{"name", name}, {"shape", {m.rows(), m.cols()}}});
  };
  for (size_t l = 0; l < params.layers.size(); ++l) {
    std::string prefix = "layer" + std::to_string(l) + ".";
    add(prefix + "w_q", params.layers[l].w_q);
    add(prefix + "w_k", params.layers[l].w_k);
    add(prefix + "w_v", params.layers[l].w_v);
  }
  add("head.w_q", params.head_w_q);
  add("head.w_k", params.head_w_k);
  write_csbt_records(path, records);
  std::ofstream os(path + ".json");
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path + ".json");
  os << manifest.dump(2) << "\n";
}

AfaParams load_afa_params(const std::string& path) {
  auto records = read_csbt_records(path);
  std::ifstream is(path + ".json");
  if (!is) throw std::runtime_error("checkpoint: missing manifest " + path + ".json");
  nlohmann::json manifest = nlohmann::json::parse(is);
  const auto& tensors = manifest.at("tensors");
  if (tensors.size() != records.size())
    throw std::runtime_error("checkpoint: manifest/record count mismatch");

  auto to_mat = [](const CsbtRecord& rec) {
    if (rec.dims.size() != 2) throw std::runtime_error("checkpoint: rank-2 tensors expected");
    Mat m(rec.dims[0], rec.dims[1]);
    size_t idx = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rec.data[idx++];
    return m;
  };

  AfaParams params;
  size_t r = 0;
  while (r < records.size()) {
    std::string name = tensors.at(r).at("name").get<std::string>();
    if (name.rfind("layer", 0) == 0) {
      AttentionLayerParams layer;
      layer.w_q = to_mat(records[r++]);
      layer.w_k = to_mat(records[r++]);
      layer.w_v = to_mat(records[r++]);
      params.layers.push_back(std::move(layer));
    } else if (name == "head.w_q") {
      params.head_w_q = to_mat(records[r++]);
      params.head_w_k = to_mat(records[r++]);
    } else {
      throw std::runtime_error("checkpoint: unexpected tensor " + name);
    }
  }
  return params;
}

}  // namespace curbgraph
