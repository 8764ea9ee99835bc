#pragma once

// Dense matrices on a reverse-mode gradient tape.
//
// A Tape owns every value produced while evaluating an expression. Tensors
// are lightweight handles (tape pointer + node index). Nodes are appended in
// evaluation order, so the tape is acyclic by construction and reverse index
// order is a valid topological order for backpropagation.
//
// Gradients are requested functionally with Tape::gradient(root, wrt); the
// tape itself is never mutated by a backward pass, so several roots may be
// differentiated on the same tape.

#include <Eigen/Dense>

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace decgan {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

class Tape;

class Tensor {
 public:
  Tensor() = default;

  const Matrix& value() const;
  Index rows() const { return value().rows(); }
  Index cols() const { return value().cols(); }
  bool requires_grad() const;
  bool valid() const { return tape_ != nullptr; }

  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }

  // Scalar value of a 1x1 tensor.
  double item() const;

 private:
  friend class Tape;
  Tensor(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  // Fills parent_grads[i] with d(root)/d(parent i) given d(root)/d(output).
  // Entries for parents with needs[i] == false may be left empty.
  using Backward = std::function<void(const Matrix& grad_out, std::span<const bool> needs,
                                      std::span<Matrix> parent_grads)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Differentiable input. Throws DomainError on non-finite entries.
  Tensor leaf(Matrix value);
  // Non-differentiable input. Throws DomainError on non-finite entries.
  Tensor constant(Matrix value);
  Tensor scalar(double v);

  // Appends the result of a primitive. Used by operation implementations.
  Tensor record(std::string_view op, Matrix value, std::initializer_list<Tensor> parents,
                Backward backward);

  // d(root)/d(w) for every w in wrt. Root must be 1x1 (UsageError otherwise).
  // Leaves that do not influence root get a zero matrix.
  std::vector<Matrix> gradient(const Tensor& root, std::span<const Tensor> wrt) const;

  std::size_t size() const { return nodes_.size(); }

 private:
  friend class Tensor;
  struct Node {
    Matrix value;
    std::vector<std::size_t> parents;
    Backward backward;
    bool requires_grad = false;
  };
  std::deque<Node> nodes_;
};

// --- primitives ------------------------------------------------------------
//
// Binary elementwise operations accept equal shapes or matrix/scalar
// broadcasting: either operand may be 1x1, a 1xc row (repeated over rows) or
// an rx1 column (repeated over columns). Anything else is a DimensionError.

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // Hadamard
Tensor div(const Tensor& a, const Tensor& b);  // elementwise; DomainError on zero divisor
Tensor minimum(const Tensor& a, const Tensor& b);
Tensor maximum(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor add_scalar(const Tensor& a, double s);

Tensor sum(const Tensor& a);       // 1x1
Tensor sum_rows(const Tensor& a);  // 1 x cols, sums down each column
Tensor sum_cols(const Tensor& a);  // rows x 1, sums along each row
Tensor mean(const Tensor& a);      // 1x1
Tensor mean_rows(const Tensor& a); // 1 x cols

Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);       // DomainError on entries <= 0
Tensor square(const Tensor& a);
Tensor sqrt(const Tensor& a);      // DomainError on entries < 0
// x^p for x > 0; entries with x <= 0 map to 0 with zero gradient.
Tensor pow_positive(const Tensor& a, double p);
Tensor softmax_rows(const Tensor& a);

// Entries where mask is true, in row-major order, as an n x 1 column.
Tensor masked_select(const Tensor& a, const std::vector<std::vector<bool>>& mask);

// Forward value of a, no gradient flow.
Tensor stop_gradient(const Tensor& a);
// Forward value is `hard`; the gradient is passed unchanged to `soft`.
Tensor straight_through(const Matrix& hard, const Tensor& soft);

// Symmetric n x n matrix with zero diagonal from a 1 x n(n-1)/2 row holding
// the strict upper triangle in row-major order.
Tensor symmetric_from_upper(const Tensor& upper, Index n);

// Convenience operators.
inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }

// Throws DomainError naming `what` if any entry is NaN or infinite.
void require_finite(const Matrix& m, std::string_view what);

}  // namespace decgan
