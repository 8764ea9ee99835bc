#pragma once

#include "decgan/tensor.hpp"

namespace decgan {

// Eigen-decomposition of a real symmetric matrix.
// values ascending; column i of vectors pairs with values(i).
struct EigPair {
  Eigen::VectorXd values;
  Matrix vectors;
};

inline constexpr Index kMaxEigSize = 256;
inline constexpr double kEigOffDiagTol = 1e-10;
inline constexpr int kEigMaxSweeps = 100;
// Eigenvalues closer than this to a neighbour get a zero gradient.
inline constexpr double kEigGapStopGrad = 1e-6;

// Cyclic Jacobi rotations. The input is symmetrized as (M + M^T) / 2 after
// checking that it is symmetric within 1e-9 (relative to its largest entry).
EigPair sym_eig(const Matrix& m);

// Ascending eigenvalues of a symmetric tensor as an n x 1 column.
// Backward: d(lambda_i)/dM = u_i u_i^T, zeroed for near-degenerate eigenvalues.
Tensor sym_eigvals(const Tensor& m);

}  // namespace decgan
