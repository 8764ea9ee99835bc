#include "decgan/decoupler.hpp"

#include "decgan/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace decgan {

Tensor activate(const Tensor& x, Activation act) {
  switch (act) {
    case Activation::relu:
      return relu(x);
    case Activation::sigmoid:
      return sigmoid(x);
    case Activation::identity:
      break;
  }
  return x;
}

Tensor normalized_adjacency(const Tensor& adjacency) {
  if (adjacency.rows() != adjacency.cols()) throw DimensionError("adjacency must be square");
  Tape& tape = adjacency.tape();
  const Index n = adjacency.rows();
  Tensor with_loops = add(adjacency, tape.constant(Matrix::Identity(n, n)));
  Tensor inv_sqrt_deg = pow_positive(sum_cols(with_loops), -0.5);  // n x 1
  return mul(mul(with_loops, inv_sqrt_deg), transpose(inv_sqrt_deg));
}

Tensor gcn_propagate(const Tensor& x, const Tensor& a_hat, const Tensor& w, Activation act) {
  if (x.rows() != a_hat.rows()) throw DimensionError("gcn: feature rows differ from node count");
  return activate(matmul(matmul(a_hat, x), w), act);
}

Tensor gcn_forward(const Tensor& x, const Tensor& adjacency, const Tensor& w, Activation act) {
  return gcn_propagate(x, normalized_adjacency(adjacency), w, act);
}

Matrix gcn_forward(const Matrix& x, const Matrix& adjacency, const Matrix& w, Activation act) {
  Tape tape;
  return gcn_forward(tape.constant(x), tape.constant(adjacency), tape.constant(w), act).value();
}

Circuit select_top_k(const Eigen::VectorXd& scores, double threshold, int k,
                     const std::vector<bool>& excluded) {
  const Index n = scores.size();
  if (static_cast<Index>(excluded.size()) != n) {
    throw DimensionError("select_top_k: excluded mask size differs from score count");
  }
  std::vector<Index> candidates;
  for (Index i = 0; i < n; ++i) {
    if (!excluded[i] && scores(i) >= threshold) candidates.push_back(i);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](Index a, Index b) { return scores(a) > scores(b); });
  if (static_cast<int>(candidates.size()) > k) candidates.resize(static_cast<std::size_t>(k));
  Circuit out(candidates.begin(), candidates.end());
  std::sort(out.begin(), out.end());
  return out;
}

SelectorOutput select_circuit(const Tensor& x, const Tensor& w_sel, const Tensor& b_sel,
                              const Tensor& d, const SelectorConfig& config,
                              const std::vector<bool>& excluded) {
  if (config.k < 1) throw UsageError("selector: k must be at least 1");
  if (!(config.tau > 0.0)) throw UsageError("selector: tau must be positive");
  Tape& tape = x.tape();
  const Index n = x.rows();

  SelectorOutput out;
  out.scores = matmul(relu(add(matmul(x, w_sel), b_sel)), d);
  out.threshold = scale(sqrt(sum(square(d))), config.gamma_dec);

  Eigen::VectorXd raw(n);
  for (Index i = 0; i < n; ++i) raw(i) = out.scores.value()(i, 0);
  out.circuit = select_top_k(raw, out.threshold.item(), config.k, excluded);

  Matrix keep(n, 1);
  for (Index i = 0; i < n; ++i) keep(i, 0) = excluded[i] ? 0.0 : 1.0;
  Tensor margin = scale(sub(out.scores, out.threshold), 1.0 / config.tau);
  out.soft = mul(sigmoid(margin), tape.constant(keep));
  return out;
}

CircuitBlocks decompose_blocks(const Matrix& adjacency, const CircuitCollection& circuits) {
  const Index n = adjacency.rows();
  std::vector<int> owner(static_cast<std::size_t>(n), -1);
  for (std::size_t p = 0; p < circuits.size(); ++p) {
    for (int v : circuits[p]) {
      if (v < 0 || v >= n) throw ValidationError("circuit node " + std::to_string(v) + " out of range");
      if (owner[v] != -1) throw ValidationError("circuits overlap at node " + std::to_string(v));
      owner[v] = static_cast<int>(p);
    }
  }
  CircuitBlocks out;
  out.residual_adjacency = adjacency;
  for (std::size_t p = 0; p < circuits.size(); ++p) {
    Matrix block = Matrix::Zero(n, n);
    for (int i : circuits[p]) {
      for (int j : circuits[p]) block(i, j) = adjacency(i, j);
    }
    out.residual_adjacency -= block;
    out.sparse_adjacencies.push_back(std::move(block));
  }
  for (Index v = 0; v < n; ++v) {
    if (owner[v] == -1) out.supplement.push_back(static_cast<int>(v));
  }
  out.supplement_adjacency = Matrix::Zero(n, n);
  for (int i : out.supplement) {
    for (int j : out.supplement) out.supplement_adjacency(i, j) = adjacency(i, j);
  }
  return out;
}

Decoupler::Decoupler(DecouplerConfig config, Index n_features, Rng& rng) : config_(config) {
  if (config_.t < 1) throw UsageError("decoupler: t must be at least 1");
  if (config_.k < 1) throw UsageError("decoupler: k must be at least 1");
  if (!(config_.tau > 0.0)) throw UsageError("decoupler: tau must be positive");
  const auto bound = uniform_bound;
  const Index h = config_.hidden;
  const Index s = config_.selector_dim;
  for (int p = 0; p < config_.t; ++p) {
    const std::string prefix = "iter" + std::to_string(p) + ".";
    IterationParams ip{};
    ip.gcn_w1 = params_.add(prefix + "gcn_w1", rng.uniform_matrix(n_features, h, relu_uniform_bound(n_features)));
    ip.gcn_w2 = params_.add(prefix + "gcn_w2", rng.uniform_matrix(h, h, relu_uniform_bound(h)));
    ip.sel_w = params_.add(prefix + "sel_w", rng.uniform_matrix(h, s, bound(h)));
    ip.sel_b = params_.add(prefix + "sel_b", rng.uniform_matrix(1, s, bound(h)));
    Matrix d = rng.uniform_matrix(s, 1, bound(s));
    if (d.norm() == 0.0) d(0, 0) = bound(s);
    ip.sel_d = params_.add(prefix + "sel_d", std::move(d));
    layout_.push_back(ip);
  }
}

DecouplingTrace Decoupler::forward(const std::vector<Tensor>& p, const Tensor& features,
                                   const Matrix& adjacency) const {
  Tape& tape = features.tape();
  const Index n = adjacency.rows();
  if (features.rows() != n) throw DimensionError("decouple: feature rows differ from node count");
  const SelectorConfig selector{config_.k, config_.gamma_dec, config_.tau};

  DecouplingTrace trace;
  DecouplingOutput& out = trace.output;
  out.soft_membership = Matrix::Zero(config_.t, n);
  out.scores = Matrix::Zero(config_.t, n);

  std::vector<bool> excluded(static_cast<std::size_t>(n), false);
  Matrix residual = adjacency;
  std::vector<Tensor> soft_columns;
  std::vector<Tensor> hard_columns;
  Tensor last_features;

  for (int it = 0; it < config_.t; ++it) {
    const IterationParams& ip = layout_[static_cast<std::size_t>(it)];
    Tensor a_hat = normalized_adjacency(tape.constant(residual));
    Tensor h1 = gcn_propagate(features, a_hat, p[ip.gcn_w1], Activation::relu);
    Tensor h2 = gcn_propagate(h1, a_hat, p[ip.gcn_w2], Activation::relu);
    last_features = h2;

    SelectorOutput sel = select_circuit(h2, p[ip.sel_w], p[ip.sel_b], p[ip.sel_d], selector, excluded);
    Matrix hard = Matrix::Zero(n, 1);
    for (int v : sel.circuit) {
      hard(v, 0) = 1.0;
      excluded[v] = true;
    }
    Tensor mask = straight_through(hard, sel.soft);
    trace.sparse_features.push_back(mul(h2, mask));
    out.sparse_features.push_back(trace.sparse_features.back().value());
    soft_columns.push_back(sel.soft);
    hard_columns.push_back(mask);
    for (Index i = 0; i < n; ++i) {
      out.soft_membership(it, i) = sel.soft.value()(i, 0);
      out.scores(it, i) = sel.scores.value()(i, 0);
    }

    for (int i : sel.circuit) {
      for (int j : sel.circuit) residual(i, j) -= adjacency(i, j);
    }
    out.circuits.push_back(std::move(sel.circuit));
  }

  CircuitBlocks blocks = decompose_blocks(adjacency, out.circuits);
  out.sparse_adjacencies = std::move(blocks.sparse_adjacencies);
  out.supplement = std::move(blocks.supplement);
  out.supplement_adjacency = std::move(blocks.supplement_adjacency);
  out.residual_adjacency = std::move(residual);
  out.all_empty = std::all_of(out.circuits.begin(), out.circuits.end(),
                              [](const Circuit& c) { return c.empty(); });

  Matrix supp_mask = Matrix::Zero(n, 1);
  for (int v : out.supplement) supp_mask(v, 0) = 1.0;
  trace.supplement_features = mul(last_features, tape.constant(supp_mask));
  out.supplement_features = trace.supplement_features.value();

  // n x t incidence assembled column by column
  auto assemble = [&](const std::vector<Tensor>& cols) {
    Tensor acc;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      Matrix unit = Matrix::Zero(1, static_cast<Index>(cols.size()));
      unit(0, static_cast<Index>(c)) = 1.0;
      Tensor placed = matmul(cols[c], tape.constant(unit));
      acc = acc.valid() ? add(acc, placed) : placed;
    }
    return acc;
  };
  trace.soft_incidence = assemble(soft_columns);
  trace.incidence = assemble(hard_columns);
  return trace;
}

DecouplingOutput Decoupler::decouple(const Matrix& features, const Matrix& adjacency) const {
  Tape tape;
  std::vector<Tensor> bound = params_.bind(tape, false);
  return forward(bound, tape.constant(features), adjacency).output;
}

}  // namespace decgan
