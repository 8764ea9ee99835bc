#pragma once

// Analytic module: hyperedge-neuron message passing over the circuit
// hypergraph and a mean-pool softmax readout.

#include "decgan/decoupler.hpp"
#include "decgan/params.hpp"
#include "decgan/random.hpp"
#include "decgan/tensor.hpp"

#include <vector>

namespace decgan {

// Entrywise mean of the sparse-graph feature matrices.
Tensor hypergraph_feature_init(const std::vector<Tensor>& sparse_features);

struct HenLayerOutput {
  Tensor edge_features;    // X_E = act(H^T X W_E + b_E)
  Tensor vertex_features;  // X' = act(H X_E W_V + b_V)
};

HenLayerOutput hen_layer(const Tensor& x, const Tensor& incidence, const Tensor& w_edge,
                         const Tensor& b_edge, const Tensor& w_vertex, const Tensor& b_vertex,
                         Activation act = Activation::relu);

// softmax(mean_rows(x) W + b) as a 1 x n_classes row.
Tensor classify(const Tensor& x, const Tensor& w_out, const Tensor& b_out);

inline constexpr double kLogClamp = 1e-12;
inline constexpr double kHenBiasInit = 0.01;

// -log(probs[label] + 1e-12).
Tensor analytic_loss(const Tensor& probs, int label);

struct AnalyticConfig {
  int layers = 2;
  int hidden = 16;
  int n_classes = 2;
};

class AnalyticModule {
 public:
  struct LayerParams {
    std::size_t w_edge;
    std::size_t b_edge;
    std::size_t w_vertex;
    std::size_t b_vertex;
  };

  AnalyticModule(AnalyticConfig config, Index in_dim, Rng& rng);

  const AnalyticConfig& config() const { return config_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  // 1 x n_classes probabilities.
  Tensor forward(const std::vector<Tensor>& bound, const std::vector<Tensor>& sparse_features,
                 const Tensor& incidence) const;
  Matrix probabilities(const std::vector<Matrix>& sparse_features, const Matrix& incidence) const;

 private:
  AnalyticConfig config_;
  ParamStore params_;
  std::vector<LayerParams> layers_;
  std::size_t w_out_ = 0;
  std::size_t b_out_ = 0;
};

}  // namespace decgan
