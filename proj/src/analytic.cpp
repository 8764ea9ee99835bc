#include "decgan/analytic.hpp"

#include "decgan/errors.hpp"

#include <cmath>

namespace decgan {

Tensor hypergraph_feature_init(const std::vector<Tensor>& sparse_features) {
  if (sparse_features.empty()) throw UsageError("hypergraph_feature_init: no feature matrices");
  Tensor acc = sparse_features.front();
  for (std::size_t p = 1; p < sparse_features.size(); ++p) {
    if (sparse_features[p].rows() != acc.rows() || sparse_features[p].cols() != acc.cols()) {
      throw DimensionError("hypergraph_feature_init: feature shapes differ");
    }
    acc = add(acc, sparse_features[p]);
  }
  return scale(acc, 1.0 / static_cast<double>(sparse_features.size()));
}

HenLayerOutput hen_layer(const Tensor& x, const Tensor& incidence, const Tensor& w_edge,
                         const Tensor& b_edge, const Tensor& w_vertex, const Tensor& b_vertex,
                         Activation act) {
  if (incidence.rows() != x.rows()) {
    throw DimensionError("hen_layer: incidence rows differ from vertex count");
  }
  HenLayerOutput out;
  out.edge_features = activate(add(matmul(matmul(transpose(incidence), x), w_edge), b_edge), act);
  out.vertex_features =
      activate(add(matmul(matmul(incidence, out.edge_features), w_vertex), b_vertex), act);
  return out;
}

Tensor classify(const Tensor& x, const Tensor& w_out, const Tensor& b_out) {
  return softmax_rows(add(matmul(mean_rows(x), w_out), b_out));
}

Tensor analytic_loss(const Tensor& probs, int label) {
  if (probs.rows() != 1 || label < 0 || label >= probs.cols()) {
    throw UsageError("analytic_loss: label " + std::to_string(label) + " outside class range");
  }
  Matrix onehot = Matrix::Zero(1, probs.cols());
  onehot(0, label) = 1.0;
  Tensor picked = sum(mul(probs, probs.tape().constant(onehot)));
  return scale(log(maximum(picked, probs.tape().scalar(kLogClamp))), -1.0);
}

AnalyticModule::AnalyticModule(AnalyticConfig config, Index in_dim, Rng& rng) : config_(config) {
  if (config_.layers < 1) throw UsageError("analytic: need at least one layer");
  if (config_.n_classes < 2) throw UsageError("analytic: need at least two classes");
  const auto bound = uniform_bound;
  const Index h = config_.hidden;
  // small positive biases keep the ReLUs live when every circuit is empty
  const Matrix bias = Matrix::Constant(1, h, kHenBiasInit);
  Index width = in_dim;
  for (int l = 0; l < config_.layers; ++l) {
    const std::string prefix = "hen" + std::to_string(l) + ".";
    LayerParams lp{};
    lp.w_edge = params_.add(prefix + "w_edge", rng.uniform_matrix(width, h, relu_uniform_bound(width)));
    lp.b_edge = params_.add(prefix + "b_edge", bias);
    lp.w_vertex = params_.add(prefix + "w_vertex", rng.uniform_matrix(h, h, relu_uniform_bound(h)));
    lp.b_vertex = params_.add(prefix + "b_vertex", bias);
    layers_.push_back(lp);
    width = h;
  }
  w_out_ = params_.add("readout.w", rng.uniform_matrix(h, config_.n_classes, bound(h)));
  b_out_ = params_.add("readout.b", Matrix::Zero(1, config_.n_classes));
}

Tensor AnalyticModule::forward(const std::vector<Tensor>& p,
                               const std::vector<Tensor>& sparse_features,
                               const Tensor& incidence) const {
  Tensor x = hypergraph_feature_init(sparse_features);
  for (const LayerParams& lp : layers_) {
    x = hen_layer(x, incidence, p[lp.w_edge], p[lp.b_edge], p[lp.w_vertex], p[lp.b_vertex])
            .vertex_features;
  }
  return classify(x, p[w_out_], p[b_out_]);
}

Matrix AnalyticModule::probabilities(const std::vector<Matrix>& sparse_features,
                                     const Matrix& incidence) const {
  Tape tape;
  std::vector<Tensor> feats;
  for (const Matrix& f : sparse_features) feats.push_back(tape.constant(f));
  return forward(params_.bind(tape, false), feats, tape.constant(incidence)).value();
}

}  // namespace decgan
