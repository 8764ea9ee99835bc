#pragma once

// Generator (latent -> base connectivity, stitched with the decoupled blocks,
// features rebuilt by a GCN) and discriminator (GCN + fully connected).

#include "decgan/decoupler.hpp"
#include "decgan/params.hpp"
#include "decgan/random.hpp"
#include "decgan/tensor.hpp"

#include <vector>

namespace decgan {

inline constexpr double kProbClamp = 1e-7;

// 1 on every (i, j) inside some N_p x N_p or S x S, 0 elsewhere.
Matrix block_mask(const DecouplingOutput& decoupled);

// Base entries off-block; A' + sum_p A^{s(p)} on blocks.
Tensor stitch_adjacency(const Tensor& base, const DecouplingOutput& decoupled);
Matrix stitch_adjacency(const Matrix& base, const DecouplingOutput& decoupled);

// (X_supp + sum_p X_sparse(p)) / (t + 1).
Tensor mean_reconstruction_input(const std::vector<Tensor>& sparse_features,
                                 const Tensor& supplement_features);

// Non-saturating generator loss: mean -log D(fake).
Tensor adv_loss_g(const std::vector<Tensor>& d_fake);
// -(mean log D(real) + mean log(1 - D(fake))).
Tensor adv_loss_d(const std::vector<Tensor>& d_real, const std::vector<Tensor>& d_fake);

struct GeneratorConfig {
  int latent_dim = 32;
  int mlp_hidden = 64;
  int gcn_hidden = 16;
};

class Generator {
 public:
  // in_features: width of the decoupled features; out_features: BOLD length.
  Generator(GeneratorConfig config, Index n_nodes, Index in_features, Index out_features,
            Rng& rng);

  const GeneratorConfig& config() const { return config_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  Index n_nodes() const { return n_nodes_; }

  // z: 1 x latent_dim. Symmetric n x n, entries in [0, 1], zero diagonal.
  Tensor generate_base(const std::vector<Tensor>& bound, const Tensor& z) const;
  Matrix generate_base(const Matrix& z) const;

  // Two GCN layers on (x_bar, a_hat); output width = out_features.
  Tensor reconstruct_features(const std::vector<Tensor>& bound, const Tensor& stitched,
                              const Tensor& x_bar) const;

  Matrix sample_latent(Rng& rng) const { return rng.normal_matrix(1, config_.latent_dim); }

 private:
  GeneratorConfig config_;
  Index n_nodes_;
  ParamStore params_;
  std::size_t w1_, b1_, w2_, b2_, gcn_w1_, gcn_w2_;
};

struct DiscriminatorConfig {
  int gcn_hidden = 16;
};

class Discriminator {
 public:
  Discriminator(DiscriminatorConfig config, Index in_features, Rng& rng);

  const DiscriminatorConfig& config() const { return config_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  // 1 x 1 probability that (features, adjacency) is real.
  Tensor forward(const std::vector<Tensor>& bound, const Tensor& features,
                 const Tensor& adjacency) const;
  double discriminate(const Matrix& features, const Matrix& adjacency) const;

 private:
  DiscriminatorConfig config_;
  ParamStore params_;
  std::size_t gcn_w1_, gcn_w2_, fc_w_, fc_b_;
};

}  // namespace decgan
