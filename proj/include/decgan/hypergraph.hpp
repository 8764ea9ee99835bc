#pragma once

// Hypergraph embedding of circuit collections and the spatial/spectral
// comparison of two collections.

#include "decgan/network.hpp"
#include "decgan/tensor.hpp"

#include <string>

namespace decgan {

struct Hypergraph {
  Index n_vertices = 0;
  CircuitCollection hyperedges;

  bool has_empty_hyperedge() const;
};

// Hyperedge p = circuits[p], order preserved. Throws ValidationError on
// out-of-range vertices.
Hypergraph embed_circuits(const CircuitCollection& circuits, Index n_vertices);

// n_vertices x n_edges, h(v, e) = 1 iff v in e.
Matrix incidence_matrix(const Hypergraph& h);
Eigen::VectorXd vertex_degrees(const Matrix& incidence);
Eigen::VectorXd edge_degrees(const Matrix& incidence);

// I - Dv^-1/2 H De^-1 H^T Dv^-1/2 over a (possibly soft) nonnegative
// incidence. Zero degrees invert to zero, so isolated vertices keep the
// identity row and empty hyperedges drop out. Symmetrized explicitly.
Tensor soft_laplacian(const Tensor& incidence);
Matrix laplacian_from_incidence(const Matrix& incidence);

// Throws ValidationError if every hyperedge is empty.
Matrix laplacian(const Hypergraph& h);

// (1/n) sum_i (lambda_i - lambda'_i)^2 over ascending spectra.
double spectral_similarity(const Hypergraph& a, const Hypergraph& b);
// Tolerates all-empty hypergraphs (identity Laplacian); used for logging.
double spectral_similarity_lenient(const Matrix& incidence_a, const Matrix& incidence_b);

// (1/t) sum_p |N_p ^ N'_p| / |N_p u N'_p|; two empty sets count as 1.
double spatial_similarity(const CircuitCollection& a, const CircuitCollection& b);

inline constexpr double kJaccardEps = 1e-8;

// Mean over columns of sum_i min(m, m') / max(sum_i max(m, m'), eps).
Tensor soft_jaccard(const Tensor& membership_a, const Tensor& membership_b);
// Spectral similarity of the soft-incidence Laplacians.
Tensor soft_spectral_similarity(const Tensor& membership_a, const Tensor& membership_b);

struct SparseCapacity {
  Tensor loss;              // (1 - soft Jaccard) + soft spectral similarity
  Tensor spatial_distance;  // 1 - soft Jaccard
  Tensor spectral;          // soft spectral similarity
  double hard_spatial_similarity = 0.0;
  double hard_spectral_similarity = 0.0;
};

// soft_* are n x t membership matrices (column p = circuit p). Throws
// DimensionError when t or n differ.
SparseCapacity sparse_capacity_loss(const CircuitCollection& circuits_a,
                                    const CircuitCollection& circuits_b, const Tensor& soft_a,
                                    const Tensor& soft_b);

// Ablation replacement: mean squared difference of the membership matrices.
Tensor membership_mse(const Tensor& soft_a, const Tensor& soft_b);

std::string hypergraph_to_json(const Hypergraph& h);

}  // namespace decgan
