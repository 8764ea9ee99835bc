#include "decgan/eig.hpp"

#include "decgan/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace decgan {

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

// Applies the rotation that annihilates a(p, q) to both a and v.
void rotate(Matrix& a, Matrix& v, Index p, Index q) {
  const double apq = a(p, q);
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const Index n = a.rows();

  for (Index k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (Index k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;

  for (Index k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

EigPair sym_eig(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("sym_eig: matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
  if (m.rows() > kMaxEigSize) {
    throw UsageError("sym_eig: size " + std::to_string(m.rows()) + " exceeds " +
                     std::to_string(kMaxEigSize));
  }
  require_finite(m, "sym_eig input");
  const Index n = m.rows();
  const double scale_ref = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale_ref) {
    throw DomainError("sym_eig: matrix is not symmetric");
  }

  Matrix a = 0.5 * (m + m.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double tol = kEigOffDiagTol * std::max(1.0, a.norm());

  bool converged = false;
  for (int sweep = 0; sweep < kEigMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) < tol) {
      converged = true;
      break;
    }
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (a(p, q) != 0.0) rotate(a, v, p, q);
      }
    }
  }
  if (!converged && off_diagonal_norm(a) >= tol) {
    throw NumericError("sym_eig: Jacobi iteration did not converge");
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return a(i, i) < a(j, j); });

  EigPair out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

Tensor sym_eigvals(const Tensor& x) {
  EigPair eig = sym_eig(x.value());
  const Index n = eig.values.size();
  Matrix out(n, 1);
  for (Index i = 0; i < n; ++i) out(i, 0) = eig.values(i);
  return x.tape().record(
      "sym_eigvals", std::move(out), {x},
      [eig = std::move(eig)](const Matrix& g, std::span<const bool>, std::span<Matrix> pg) {
        const Index n = eig.values.size();
        Eigen::VectorXd w(n);
        for (Index i = 0; i < n; ++i) {
          const bool close_below = i > 0 && eig.values(i) - eig.values(i - 1) < kEigGapStopGrad;
          const bool close_above =
              i + 1 < n && eig.values(i + 1) - eig.values(i) < kEigGapStopGrad;
          w(i) = (close_below || close_above) ? 0.0 : g(i, 0);
        }
        pg[0] = eig.vectors * w.asDiagonal() * eig.vectors.transpose();
      });
}

}  // namespace decgan
