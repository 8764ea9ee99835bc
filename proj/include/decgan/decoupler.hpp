#pragma once

// Decoupling module: alternating GCN feature extraction and top-k circuit
// selection over a shrinking residual graph.

#include "decgan/network.hpp"
#include "decgan/params.hpp"
#include "decgan/random.hpp"
#include "decgan/tensor.hpp"

#include <vector>

namespace decgan {

enum class Activation { identity, relu, sigmoid };

Tensor activate(const Tensor& x, Activation act);

// D^-1/2 (A + I) D^-1/2 with D the row sums of A + I.
Tensor normalized_adjacency(const Tensor& adjacency);
// act(a_hat X W) for an already normalized operator.
Tensor gcn_propagate(const Tensor& x, const Tensor& a_hat, const Tensor& w, Activation act);
// One GCN layer on a raw adjacency.
Tensor gcn_forward(const Tensor& x, const Tensor& adjacency, const Tensor& w, Activation act);
Matrix gcn_forward(const Matrix& x, const Matrix& adjacency, const Matrix& w, Activation act);

// Up to k non-excluded nodes with score >= threshold, highest score first,
// ties to the lower index. Returned sorted ascending by node index.
Circuit select_top_k(const Eigen::VectorXd& scores, double threshold, int k,
                     const std::vector<bool>& excluded);

struct SelectorConfig {
  int k = 5;
  double gamma_dec = 0.05;
  double tau = 0.1;
};

struct SelectorOutput {
  Circuit circuit;
  Tensor scores;     // n x 1, d . relu(W x_i + b)
  Tensor threshold;  // 1 x 1, gamma_dec * ||d||
  Tensor soft;       // n x 1, sigmoid((score - threshold) / tau), 0 when excluded
};

// x: n x h node features; w_sel: h x s; b_sel: 1 x s; d: s x 1.
SelectorOutput select_circuit(const Tensor& x, const Tensor& w_sel, const Tensor& b_sel,
                              const Tensor& d, const SelectorConfig& config,
                              const std::vector<bool>& excluded);

// Block structure induced by disjoint circuits on an adjacency matrix.
struct CircuitBlocks {
  std::vector<Matrix> sparse_adjacencies;  // A on N_p x N_p, zero elsewhere
  Circuit supplement;                      // V minus all circuits, ascending
  Matrix supplement_adjacency;             // A on S x S, zero elsewhere
  Matrix residual_adjacency;               // A minus every sparse adjacency
};

// Throws ValidationError when circuits overlap or index out of range.
CircuitBlocks decompose_blocks(const Matrix& adjacency, const CircuitCollection& circuits);

struct DecouplerConfig {
  int t = 2;
  int k = 5;
  int hidden = 16;
  int selector_dim = 16;
  double gamma_dec = 0.05;
  double tau = 0.1;
};

struct DecouplingOutput {
  CircuitCollection circuits;
  std::vector<Matrix> sparse_adjacencies;
  std::vector<Matrix> sparse_features;  // GCN features of stack p, rows outside N_p zeroed
  Circuit supplement;
  Matrix supplement_adjacency;
  Matrix supplement_features;           // last stack's features, rows outside S zeroed
  Matrix residual_adjacency;
  Matrix soft_membership;               // t x n
  Matrix scores;                        // t x n
  bool all_empty = false;
};

// Differentiable view of one decoupling pass. Hard quantities are in `output`.
struct DecouplingTrace {
  DecouplingOutput output;
  std::vector<Tensor> sparse_features;  // straight-through row masks
  Tensor supplement_features;
  Tensor soft_incidence;                // n x t soft memberships
  Tensor incidence;                     // n x t, hard forward / soft backward
};

class Decoupler {
 public:
  struct IterationParams {
    std::size_t gcn_w1;
    std::size_t gcn_w2;
    std::size_t sel_w;
    std::size_t sel_b;
    std::size_t sel_d;
  };

  Decoupler(DecouplerConfig config, Index n_features, Rng& rng);

  const DecouplerConfig& config() const { return config_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  const std::vector<IterationParams>& layout() const { return layout_; }

  // `bound` is params().bind(tape, ...).
  DecouplingTrace forward(const std::vector<Tensor>& bound, const Tensor& features,
                          const Matrix& adjacency) const;

  DecouplingOutput decouple(const Matrix& features, const Matrix& adjacency) const;
  DecouplingOutput decouple(const BrainNetwork& network) const {
    return decouple(network.features(), network.adjacency());
  }

 private:
  DecouplerConfig config_;
  ParamStore params_;
  std::vector<IterationParams> layout_;
};

}  // namespace decgan
