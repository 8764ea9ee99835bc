#include "support.hpp"

#include "decgan/eig.hpp"
#include "decgan/errors.hpp"
#include "decgan/gradcheck.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

using namespace decgan;
using testing::random_matrix;

namespace {

Matrix random_symmetric(std::mt19937_64& gen, Index n) {
  Matrix m = random_matrix(gen, n, n);
  return (m + m.transpose()) / 2.0;
}

double min_gap(const Eigen::VectorXd& v) {
  double g = INFINITY;
  for (Index i = 1; i < v.size(); ++i) g = std::min(g, v(i) - v(i - 1));
  return g;
}

// Random symmetric matrix with all eigengaps above `gap`.
Matrix gapped_symmetric(std::mt19937_64& gen, Index n, double gap) {
  while (true) {
    Matrix m = random_symmetric(gen, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(m), Eigen::EigenvaluesOnly);
    if (min_gap(es.eigenvalues()) > gap) return m;
  }
}

}  // namespace

TEST_CASE("diagonal and closed-form spectra") {
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 3, 1, 2;
  EigPair e = sym_eig(d);
  CHECK(e.values(0) == doctest::Approx(1.0));
  CHECK(e.values(1) == doctest::Approx(2.0));
  CHECK(e.values(2) == doctest::Approx(3.0));

  Matrix s(2, 2);
  s << 0, 1, 1, 0;
  EigPair f = sym_eig(s);
  CHECK(f.values(0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(f.values(1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("agrees with a library eigensolver and satisfies the pair invariants") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 gen(seed);
    const Index n = 2 + static_cast<Index>(seed % 30);
    Matrix m = random_symmetric(gen, n);
    EigPair e = sym_eig(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref{Eigen::MatrixXd(m)};
    CHECK((e.values - ref.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
    for (Index i = 1; i < n; ++i) CHECK(e.values(i) >= e.values(i - 1));
    const Matrix vtv = e.vectors.transpose() * e.vectors;
    CHECK((vtv - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-8);
    const Matrix recon = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    CHECK((m - recon).norm() / m.norm() < 1e-8);
    CHECK((m * e.vectors - e.vectors * e.values.asDiagonal()).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(std::abs(m.trace() - e.values.sum()) < 1e-8);
  }
}

TEST_CASE("input checks") {
  Matrix asym(2, 2);
  asym << 0, 1, 2, 0;
  CHECK_THROWS(sym_eig(asym));
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(sym_eig(bad), DomainError);
  CHECK_THROWS(sym_eig(Matrix::Zero(2, 3)));
  CHECK_THROWS(sym_eig(Matrix::Zero(kMaxEigSize + 1, kMaxEigSize + 1)));
}

TEST_CASE("eigenvalue gradients against finite differences") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 gen(100 + seed);
    const Matrix m0 = gapped_symmetric(gen, 5, 0.1);
    const Matrix w = random_matrix(gen, 5, 1);
    ScalarFunction f = [w](Tape& tape, std::span<const Tensor> l) {
      Tensor sym = scale(add(l[0], transpose(l[0])), 0.5);
      return sum(mul(sym_eigvals(sym), tape.constant(w)));
    };
    CHECK(grad_check(f, {m0}, 1e-6) < 1e-4);

    ScalarFunction lmax = [](Tape& tape, std::span<const Tensor> l) {
      Tensor sym = scale(add(l[0], transpose(l[0])), 0.5);
      Tensor v = sym_eigvals(sym);
      Matrix pick = Matrix::Zero(5, 1);
      pick(4, 0) = 1.0;
      return sum(mul(v, tape.constant(pick)));
    };
    CHECK(grad_check(lmax, {m0}, 1e-6) < 1e-4);
  }
}

TEST_CASE("degenerate eigenvalues get no gradient") {
  Tape tape;
  Tensor m = tape.leaf(Matrix::Identity(3, 3));
  Tensor v = sym_eigvals(m);
  auto g = tape.gradient(sum(v), std::vector<Tensor>{m});
  CHECK(g[0].cwiseAbs().maxCoeff() == 0.0);
}
