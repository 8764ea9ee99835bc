#include "decgan/adversarial.hpp"

#include "decgan/errors.hpp"

#include <cmath>

namespace decgan {

Matrix block_mask(const DecouplingOutput& d) {
  const Index n = d.supplement_adjacency.rows();
  Matrix mask = Matrix::Zero(n, n);
  auto mark = [&](const Circuit& nodes) {
    for (int i : nodes) {
      for (int j : nodes) mask(i, j) = 1.0;
    }
  };
  for (const Circuit& c : d.circuits) mark(c);
  mark(d.supplement);
  return mask;
}

namespace {

Matrix block_values(const DecouplingOutput& d) {
  Matrix v = d.supplement_adjacency;
  for (const Matrix& s : d.sparse_adjacencies) v += s;
  return v;
}

}  // namespace

Tensor stitch_adjacency(const Tensor& base, const DecouplingOutput& d) {
  const Matrix mask = block_mask(d);
  if (base.rows() != mask.rows() || base.cols() != mask.cols()) {
    throw DimensionError("stitch_adjacency: base shape differs from decoupled network");
  }
  Tape& tape = base.tape();
  const Matrix off_block = (1.0 - mask.array()).matrix();
  const Matrix on_block = block_values(d).cwiseProduct(mask);
  return add(mul(base, tape.constant(off_block)), tape.constant(on_block));
}

Matrix stitch_adjacency(const Matrix& base, const DecouplingOutput& d) {
  Tape tape;
  return stitch_adjacency(tape.constant(base), d).value();
}

Tensor mean_reconstruction_input(const std::vector<Tensor>& sparse_features,
                                 const Tensor& supplement_features) {
  Tensor acc = supplement_features;
  for (const Tensor& f : sparse_features) acc = add(acc, f);
  return scale(acc, 1.0 / static_cast<double>(sparse_features.size() + 1));
}

namespace {

Tensor clamp_prob(const Tensor& p) {
  Tape& tape = p.tape();
  return minimum(maximum(p, tape.scalar(kProbClamp)), tape.scalar(1.0 - kProbClamp));
}

Tensor mean_of(const std::vector<Tensor>& xs) {
  if (xs.empty()) throw UsageError("adversarial loss over an empty batch");
  Tensor acc = xs.front();
  for (std::size_t i = 1; i < xs.size(); ++i) acc = add(acc, xs[i]);
  return scale(acc, 1.0 / static_cast<double>(xs.size()));
}

}  // namespace

Tensor adv_loss_g(const std::vector<Tensor>& d_fake) {
  std::vector<Tensor> terms;
  for (const Tensor& p : d_fake) terms.push_back(scale(log(clamp_prob(p)), -1.0));
  return mean_of(terms);
}

Tensor adv_loss_d(const std::vector<Tensor>& d_real, const std::vector<Tensor>& d_fake) {
  std::vector<Tensor> real_terms;
  std::vector<Tensor> fake_terms;
  for (const Tensor& p : d_real) real_terms.push_back(log(clamp_prob(p)));
  for (const Tensor& p : d_fake) {
    fake_terms.push_back(log(add_scalar(scale(clamp_prob(p), -1.0), 1.0)));
  }
  return scale(add(mean_of(real_terms), mean_of(fake_terms)), -1.0);
}

Generator::Generator(GeneratorConfig config, Index n_nodes, Index in_features, Index out_features,
                     Rng& rng)
    : config_(config), n_nodes_(n_nodes) {
  if (config_.latent_dim < 1) throw UsageError("generator: latent_dim must be at least 1");
  const auto bound = [](Index d) { return 1.0 / std::sqrt(static_cast<double>(d)); };
  const Index upper = n_nodes * (n_nodes - 1) / 2;
  const Index l = config_.latent_dim;
  const Index h = config_.mlp_hidden;
  const Index g = config_.gcn_hidden;
  w1_ = params_.add("mlp.w1", rng.uniform_matrix(l, h, bound(l)));
  b1_ = params_.add("mlp.b1", Matrix::Zero(1, h));
  w2_ = params_.add("mlp.w2", rng.uniform_matrix(h, upper, bound(h)));
  b2_ = params_.add("mlp.b2", Matrix::Zero(1, upper));
  gcn_w1_ = params_.add("gcn.w1", rng.uniform_matrix(in_features, g, bound(in_features)));
  gcn_w2_ = params_.add("gcn.w2", rng.uniform_matrix(g, out_features, bound(g)));
}

Tensor Generator::generate_base(const std::vector<Tensor>& p, const Tensor& z) const {
  if (z.rows() != 1 || z.cols() != config_.latent_dim) {
    throw DimensionError("generate_base: latent must be 1x" + std::to_string(config_.latent_dim));
  }
  Tensor hidden = relu(add(matmul(z, p[w1_]), p[b1_]));
  Tensor upper = sigmoid(add(matmul(hidden, p[w2_]), p[b2_]));
  return symmetric_from_upper(upper, n_nodes_);
}

Matrix Generator::generate_base(const Matrix& z) const {
  Tape tape;
  return generate_base(params_.bind(tape, false), tape.constant(z)).value();
}

Tensor Generator::reconstruct_features(const std::vector<Tensor>& p, const Tensor& stitched,
                                       const Tensor& x_bar) const {
  Tensor a_hat = normalized_adjacency(stitched);
  Tensor h = gcn_propagate(x_bar, a_hat, p[gcn_w1_], Activation::relu);
  return gcn_propagate(h, a_hat, p[gcn_w2_], Activation::identity);
}

Discriminator::Discriminator(DiscriminatorConfig config, Index in_features, Rng& rng)
    : config_(config) {
  const auto bound = [](Index d) { return 1.0 / std::sqrt(static_cast<double>(d)); };
  const Index g = config_.gcn_hidden;
  gcn_w1_ = params_.add("gcn.w1", rng.uniform_matrix(in_features, g, bound(in_features)));
  gcn_w2_ = params_.add("gcn.w2", rng.uniform_matrix(g, g, bound(g)));
  fc_w_ = params_.add("fc.w", rng.uniform_matrix(g, 1, bound(g)));
  fc_b_ = params_.add("fc.b", Matrix::Zero(1, 1));
}

Tensor Discriminator::forward(const std::vector<Tensor>& p, const Tensor& features,
                              const Tensor& adjacency) const {
  Tensor a_hat = normalized_adjacency(adjacency);
  Tensor h = gcn_propagate(features, a_hat, p[gcn_w1_], Activation::relu);
  h = gcn_propagate(h, a_hat, p[gcn_w2_], Activation::relu);
  return sigmoid(add(matmul(mean_rows(h), p[fc_w_]), p[fc_b_]));
}

double Discriminator::discriminate(const Matrix& features, const Matrix& adjacency) const {
  Tape tape;
  return forward(params_.bind(tape, false), tape.constant(features), tape.constant(adjacency))
      .item();
}

}  // namespace decgan
