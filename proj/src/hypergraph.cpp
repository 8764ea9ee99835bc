#include "decgan/hypergraph.hpp"

#include "decgan/eig.hpp"
#include "decgan/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

namespace decgan {

bool Hypergraph::has_empty_hyperedge() const {
  return std::any_of(hyperedges.begin(), hyperedges.end(),
                     [](const Circuit& e) { return e.empty(); });
}

Hypergraph embed_circuits(const CircuitCollection& circuits, Index n_vertices) {
  for (const Circuit& c : circuits) {
    for (int v : c) {
      if (v < 0 || v >= n_vertices) {
        throw ValidationError("hyperedge vertex " + std::to_string(v) + " out of range");
      }
    }
  }
  return Hypergraph{n_vertices, circuits};
}

Matrix incidence_matrix(const Hypergraph& h) {
  Matrix m = Matrix::Zero(h.n_vertices, static_cast<Index>(h.hyperedges.size()));
  for (std::size_t e = 0; e < h.hyperedges.size(); ++e) {
    for (int v : h.hyperedges[e]) m(v, static_cast<Index>(e)) = 1.0;
  }
  return m;
}

Eigen::VectorXd vertex_degrees(const Matrix& incidence) { return incidence.rowwise().sum(); }
Eigen::VectorXd edge_degrees(const Matrix& incidence) {
  return incidence.colwise().sum().transpose();
}

Tensor soft_laplacian(const Tensor& h) {
  Tape& tape = h.tape();
  const Index n = h.rows();
  Tensor dv_inv_sqrt = pow_positive(sum_cols(h), -0.5);  // n x 1
  Tensor de_inv = pow_positive(sum_rows(h), -1.0);       // 1 x t
  Tensor b = mul(h, dv_inv_sqrt);
  Tensor p = matmul(mul(b, de_inv), transpose(b));
  Tensor sym = scale(add(p, transpose(p)), 0.5);
  return sub(tape.constant(Matrix::Identity(n, n)), sym);
}

Matrix laplacian_from_incidence(const Matrix& incidence) {
  Tape tape;
  return soft_laplacian(tape.constant(incidence)).value();
}

Matrix laplacian(const Hypergraph& h) {
  const bool any_nonempty = std::any_of(h.hyperedges.begin(), h.hyperedges.end(),
                                        [](const Circuit& e) { return !e.empty(); });
  if (!any_nonempty) throw ValidationError("laplacian: hypergraph has no nonempty hyperedge");
  return laplacian_from_incidence(incidence_matrix(h));
}

namespace {

double spectrum_distance(const Matrix& la, const Matrix& lb) {
  const Eigen::VectorXd ea = sym_eig(la).values;
  const Eigen::VectorXd eb = sym_eig(lb).values;
  return (ea - eb).squaredNorm() / static_cast<double>(ea.size());
}

}  // namespace

double spectral_similarity(const Hypergraph& a, const Hypergraph& b) {
  if (a.n_vertices != b.n_vertices) {
    throw DimensionError("spectral_similarity: vertex counts differ");
  }
  return spectrum_distance(laplacian(a), laplacian(b));
}

double spectral_similarity_lenient(const Matrix& incidence_a, const Matrix& incidence_b) {
  if (incidence_a.rows() != incidence_b.rows()) {
    throw DimensionError("spectral_similarity: vertex counts differ");
  }
  return spectrum_distance(laplacian_from_incidence(incidence_a),
                           laplacian_from_incidence(incidence_b));
}

double spatial_similarity(const CircuitCollection& a, const CircuitCollection& b) {
  if (a.size() != b.size()) throw DimensionError("spatial_similarity: collection sizes differ");
  if (a.empty()) return 1.0;
  double total = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) {
    const std::set<int> sa(a[p].begin(), a[p].end());
    const std::set<int> sb(b[p].begin(), b[p].end());
    std::size_t inter = 0;
    for (int v : sa) inter += sb.count(v);
    const std::size_t uni = sa.size() + sb.size() - inter;
    total += uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
  }
  return total / static_cast<double>(a.size());
}

namespace {

void check_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": membership shapes differ");
  }
}

}  // namespace

Tensor soft_jaccard(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "soft_jaccard");
  Tape& tape = a.tape();
  Tensor inter = sum_rows(minimum(a, b));
  Tensor uni = sum_rows(maximum(a, b));
  Tensor ratio = div(inter, maximum(uni, tape.scalar(kJaccardEps)));
  // columns where both memberships vanish count as identical, as in the hard form
  Matrix vanished = (uni.value().array() < kJaccardEps).cast<double>().matrix();
  if (vanished.any()) {
    Matrix keep = (1.0 - vanished.array()).matrix();
    ratio = add(mul(ratio, tape.constant(keep)), tape.constant(vanished));
  }
  return mean(ratio);
}

Tensor soft_spectral_similarity(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "soft_spectral_similarity");
  Tensor ea = sym_eigvals(soft_laplacian(a));
  Tensor eb = sym_eigvals(soft_laplacian(b));
  return mean(square(sub(ea, eb)));
}

SparseCapacity sparse_capacity_loss(const CircuitCollection& circuits_a,
                                    const CircuitCollection& circuits_b, const Tensor& soft_a,
                                    const Tensor& soft_b) {
  if (circuits_a.size() != circuits_b.size()) {
    throw DimensionError("sparse_capacity_loss: circuit counts differ");
  }
  check_same_shape(soft_a, soft_b, "sparse_capacity_loss");
  if (soft_a.cols() != static_cast<Index>(circuits_a.size())) {
    throw DimensionError("sparse_capacity_loss: membership columns differ from circuit count");
  }
  SparseCapacity out;
  out.spatial_distance = add_scalar(scale(soft_jaccard(soft_a, soft_b), -1.0), 1.0);
  out.spectral = soft_spectral_similarity(soft_a, soft_b);
  out.loss = add(out.spatial_distance, out.spectral);

  const Index n = soft_a.rows();
  out.hard_spatial_similarity = spatial_similarity(circuits_a, circuits_b);
  out.hard_spectral_similarity =
      spectral_similarity_lenient(incidence_matrix(embed_circuits(circuits_a, n)),
                                  incidence_matrix(embed_circuits(circuits_b, n)));
  return out;
}

Tensor membership_mse(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "membership_mse");
  return mean(square(sub(a, b)));
}

std::string hypergraph_to_json(const Hypergraph& h) {
  nlohmann::json j = {{"n_vertices", h.n_vertices}, {"hyperedges", h.hyperedges}};
  return j.dump();
}

}  // namespace decgan
