#include "decgan/tensor.hpp"

#include "decgan/errors.hpp"

#include <cmath>
#include <memory>
#include <string>

namespace decgan {

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw DomainError("non-finite value in " + std::string(what));
  }
}

const Matrix& Tensor::value() const { return tape_->nodes_[id_].value; }

bool Tensor::requires_grad() const { return tape_->nodes_[id_].requires_grad; }

double Tensor::item() const {
  const Matrix& v = value();
  if (v.rows() != 1 || v.cols() != 1) {
    throw UsageError("item() on a " + std::to_string(v.rows()) + "x" + std::to_string(v.cols()) +
                     " tensor");
  }
  return v(0, 0);
}

Tensor Tape::leaf(Matrix value) {
  require_finite(value, "leaf tensor");
  nodes_.push_back(Node{std::move(value), {}, {}, true});
  return Tensor(this, nodes_.size() - 1);
}

Tensor Tape::constant(Matrix value) {
  require_finite(value, "constant tensor");
  nodes_.push_back(Node{std::move(value), {}, {}, false});
  return Tensor(this, nodes_.size() - 1);
}

Tensor Tape::scalar(double v) { return constant(Matrix::Constant(1, 1, v)); }

Tensor Tape::record(std::string_view op, Matrix value, std::initializer_list<Tensor> parents,
                    Backward backward) {
  require_finite(value, op);
  Node node;
  node.value = std::move(value);
  for (const Tensor& p : parents) {
    if (p.tape_ != this) throw UsageError("operands live on different tapes");
    node.parents.push_back(p.id_);
    node.requires_grad = node.requires_grad || nodes_[p.id_].requires_grad;
  }
  if (node.requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Tensor(this, nodes_.size() - 1);
}

std::vector<Matrix> Tape::gradient(const Tensor& root, std::span<const Tensor> wrt) const {
  if (root.tape_ != this) throw UsageError("gradient root lives on a different tape");
  const Matrix& rv = nodes_[root.id_].value;
  if (rv.rows() != 1 || rv.cols() != 1) {
    throw UsageError("gradient root must be scalar, got " + std::to_string(rv.rows()) + "x" +
                     std::to_string(rv.cols()));
  }
  std::vector<Matrix> grads(root.id_ + 1);
  grads[root.id_] = Matrix::Ones(1, 1);

  std::vector<Matrix> parent_grads;
  for (std::size_t i = root.id_ + 1; i-- > 0;) {
    const Node& node = nodes_[i];
    if (grads[i].size() == 0 || !node.backward) continue;
    const std::size_t np = node.parents.size();
    std::unique_ptr<bool[]> needs(new bool[np]);
    for (std::size_t k = 0; k < np; ++k) needs[k] = nodes_[node.parents[k]].requires_grad;
    parent_grads.assign(np, Matrix());
    node.backward(grads[i], std::span<const bool>(needs.get(), np), parent_grads);
    for (std::size_t k = 0; k < np; ++k) {
      if (!needs[k] || parent_grads[k].size() == 0) continue;
      Matrix& target = grads[node.parents[k]];
      if (target.size() == 0) {
        target = std::move(parent_grads[k]);
      } else {
        target += parent_grads[k];
      }
    }
  }

  std::vector<Matrix> out;
  out.reserve(wrt.size());
  for (const Tensor& w : wrt) {
    if (w.tape_ != this) throw UsageError("gradient target lives on a different tape");
    const Matrix& wv = nodes_[w.id_].value;
    if (w.id_ < grads.size() && grads[w.id_].size() != 0) {
      out.push_back(grads[w.id_]);
    } else {
      out.push_back(Matrix::Zero(wv.rows(), wv.cols()));
    }
  }
  return out;
}

namespace {

std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

bool broadcastable(Index r, Index c, Index R, Index C) {
  return (r == R || r == 1) && (c == C || c == 1);
}

Matrix expand(const Matrix& m, Index R, Index C) {
  if (m.rows() == R && m.cols() == C) return m;
  return m.replicate(R / m.rows(), C / m.cols());
}

// Sums a gradient of shape R x C back down to r x c.
Matrix reduce_to(const Matrix& g, Index r, Index c) {
  if (g.rows() == r && g.cols() == c) return g;
  Matrix rows_done = (r == 1 && g.rows() != 1) ? Matrix(g.colwise().sum()) : g;
  if (c == 1 && rows_done.cols() != 1) return rows_done.rowwise().sum();
  return rows_done;
}

struct Broadcast {
  Index rows;
  Index cols;
  Matrix a;
  Matrix b;
};

Broadcast broadcast(const Tensor& x, const Tensor& y, std::string_view op) {
  const Matrix& a = x.value();
  const Matrix& b = y.value();
  const Index R = std::max(a.rows(), b.rows());
  const Index C = std::max(a.cols(), b.cols());
  if (!broadcastable(a.rows(), a.cols(), R, C) || !broadcastable(b.rows(), b.cols(), R, C)) {
    throw DimensionError(std::string(op) + ": incompatible shapes " + shape_str(a) + " and " +
                         shape_str(b));
  }
  return {R, C, expand(a, R, C), expand(b, R, C)};
}

template <class UnaryValue, class UnaryDeriv>
Tensor unary(std::string_view op, const Tensor& x, UnaryValue f, UnaryDeriv df) {
  const Matrix& a = x.value();
  Matrix out = a.unaryExpr(f);
  Matrix saved_in = a;
  Matrix saved_out = out;
  return x.tape().record(
      op, std::move(out), {x},
      [saved_in = std::move(saved_in), saved_out = std::move(saved_out), df](
          const Matrix& g, std::span<const bool>, std::span<Matrix> pg) {
        Matrix d(saved_in.rows(), saved_in.cols());
        for (Index i = 0; i < d.size(); ++i) {
          d.data()[i] = df(saved_in.data()[i], saved_out.data()[i]);
        }
        pg[0] = g.cwiseProduct(d);
      });
}

}  // namespace

Tensor matmul(const Tensor& x, const Tensor& y) {
  const Matrix& a = x.value();
  const Matrix& b = y.value();
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + shape_str(a) + " times " + shape_str(b));
  }
  Matrix out = a * b;
  return x.tape().record("matmul", std::move(out), {x, y},
                         [a, b](const Matrix& g, std::span<const bool> needs,
                                std::span<Matrix> pg) {
                           if (needs[0]) pg[0] = g * b.transpose();
                           if (needs[1]) pg[1] = a.transpose() * g;
                         });
}

Tensor transpose(const Tensor& x) {
  Matrix out = x.value().transpose();
  return x.tape().record("transpose", std::move(out), {x},
                         [](const Matrix& g, std::span<const bool>, std::span<Matrix> pg) {
                           pg[0] = g.transpose();
                         });
}

Tensor add(const Tensor& x, const Tensor& y) {
  Broadcast bc = broadcast(x, y, "add");
  Matrix out = bc.a + bc.b;
  const Index ar = x.rows(), ac = x.cols(), br = y.rows(), bcn = y.cols();
  return x.tape().record("add", std::move(out), {x, y},
                         [=](const Matrix& g, std::span<const bool> needs, std::span<Matrix> pg) {
                           if (needs[0]) pg[0] = reduce_to(g, ar, ac);
                           if (needs[1]) pg[1] = reduce_to(g, br, bcn);
                         });
}

Tensor sub(const Tensor& x, const Tensor& y) {
  Broadcast bc = broadcast(x, y, "sub");
  Matrix out = bc.a - bc.b;
  const Index ar = x.rows(), ac = x.cols(), br = y.rows(), bcn = y.cols();
  return x.tape().record("sub", std::move(out), {x, y},
                         [=](const Matrix& g, std::span<const bool> needs, std::span<Matrix> pg) {
                           if (needs[0]) pg[0] = reduce_to(g, ar, ac);
                           if (needs[1]) pg[1] = reduce_to(-g, br, bcn);
                         });
}

Tensor mul(const Tensor& x, const Tensor& y) {
  Broadcast bc = broadcast(x, y, "mul");
  Matrix out = bc.a.cwiseProduct(bc.b);
  const Index ar = x.rows(), ac = x.cols(), br = y.rows(), bcn = y.cols();
  return x.tape().record(
      "mul", std::move(out), {x, y},
      [=, a = std::move(bc.a), b = std::move(bc.b)](const Matrix& g, std::span<const bool> needs,
                                                    std::span<Matrix> pg) {
        if (needs[0]) pg[0] = reduce_to(g.cwiseProduct(b), ar, ac);
        if (needs[1]) pg[1] = reduce_to(g.cwiseProduct(a), br, bcn);
      });
}

Tensor div(const Tensor& x, const Tensor& y) {
  Broadcast bc = broadcast(x, y, "div");
  if ((bc.b.array() == 0.0).any()) throw DomainError("div: zero divisor");
  Matrix out = bc.a.cwiseQuotient(bc.b);
  const Index ar = x.rows(), ac = x.cols(), br = y.rows(), bcn = y.cols();
  return x.tape().record(
      "div", std::move(out), {x, y},
      [=, a = std::move(bc.a), b = std::move(bc.b)](const Matrix& g, std::span<const bool> needs,
                                                    std::span<Matrix> pg) {
        if (needs[0]) pg[0] = reduce_to(g.cwiseQuotient(b), ar, ac);
        if (needs[1]) {
          Matrix d = -(g.cwiseProduct(a)).cwiseQuotient(b.cwiseProduct(b));
          pg[1] = reduce_to(d, br, bcn);
        }
      });
}

namespace {

// Subgradient convention at ties: the first operand receives the gradient.
Tensor select_extreme(const Tensor& x, const Tensor& y, bool take_min) {
  const char* op = take_min ? "minimum" : "maximum";
  Broadcast bc = broadcast(x, y, op);
  Matrix out(bc.rows, bc.cols);
  Matrix pick_a(bc.rows, bc.cols);
  for (Index i = 0; i < out.size(); ++i) {
    const double a = bc.a.data()[i];
    const double b = bc.b.data()[i];
    const bool first = take_min ? (a <= b) : (a >= b);
    out.data()[i] = first ? a : b;
    pick_a.data()[i] = first ? 1.0 : 0.0;
  }
  const Index ar = x.rows(), ac = x.cols(), br = y.rows(), bcn = y.cols();
  return x.tape().record(op, std::move(out), {x, y},
                         [=, pick_a = std::move(pick_a)](const Matrix& g,
                                                         std::span<const bool> needs,
                                                         std::span<Matrix> pg) {
                           if (needs[0]) pg[0] = reduce_to(g.cwiseProduct(pick_a), ar, ac);
                           if (needs[1]) {
                             Matrix pick_b = (1.0 - pick_a.array()).matrix();
                             pg[1] = reduce_to(g.cwiseProduct(pick_b), br, bcn);
                           }
                         });
}

}  // namespace

Tensor minimum(const Tensor& x, const Tensor& y) { return select_extreme(x, y, true); }
Tensor maximum(const Tensor& x, const Tensor& y) { return select_extreme(x, y, false); }

Tensor scale(const Tensor& x, double s) {
  Matrix out = x.value() * s;
  return x.tape().record("scale", std::move(out), {x},
                         [s](const Matrix& g, std::span<const bool>, std::span<Matrix> pg) {
                           pg[0] = g * s;
                         });
}

Tensor add_scalar(const Tensor& x, double s) {
  Matrix out = (x.value().array() + s).matrix();
  return x.tape().record("add_scalar", std::move(out), {x},
                         [](const Matrix& g, std::span<const bool>, std::span<Matrix> pg) {
                           pg[0] = g;
                         });
}

Tensor sum(const Tensor& x) {
  const Index r = x.rows(), c = x.cols();
  Matrix out = Matrix::Constant(1, 1, x.value().sum());
  return x.tape().record("sum", std::move(out), {x},
                         [r, c](const Matrix& g, std::span<const bool>, std::span<Matrix> pg) {
                           pg[0] = Matrix::Constant(r, c, g(0, 0));
                         });
}

Tensor sum_rows(const Tensor& x) {
  const Index r = x.rows();
  Matrix out = x.value().colwise().sum();
  return x.tape().record("sum_rows", std::move(out), {x},
                         [r](const Matrix& g, std::span<const bool>, std::span<Matrix> pg) {
                           pg[0] = g.replicate(r, 1);
                         });
}

Tensor sum_cols(const Tensor& x) {
  const Index c = x.cols();
  Matrix out = x.value().rowwise().sum();
  return x.tape().record("sum_cols", std::move(out), {x},
                         [c](const Matrix& g, std::span<const bool>, std::span<Matrix> pg) {
                           pg[0] = g.replicate(1, c);
                         });
}

Tensor mean(const Tensor& x) {
  if (x.value().size() == 0) throw DimensionError("mean of empty tensor");
  return scale(sum(x), 1.0 / static_cast<double>(x.value().size()));
}

Tensor mean_rows(const Tensor& x) {
  if (x.rows() == 0) throw DimensionError("mean_rows of empty tensor");
  return scale(sum_rows(x), 1.0 / static_cast<double>(x.rows()));
}

Tensor relu(const Tensor& x) {
  return unary(
      "relu", x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double in, double) { return in > 0.0 ? 1.0 : 0.0; });
}

Tensor sigmoid(const Tensor& x) {
  return unary(
      "sigmoid", x,
      [](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double out) { return out * (1.0 - out); });
}

Tensor tanh(const Tensor& x) {
  return unary(
      "tanh", x, [](double v) { return std::tanh(v); },
      [](double, double out) { return 1.0 - out * out; });
}

Tensor exp(const Tensor& x) {
  return unary(
      "exp", x, [](double v) { return std::exp(v); }, [](double, double out) { return out; });
}

Tensor log(const Tensor& x) {
  if ((x.value().array() <= 0.0).any()) throw DomainError("log of non-positive value");
  return unary(
      "log", x, [](double v) { return std::log(v); }, [](double in, double) { return 1.0 / in; });
}

Tensor square(const Tensor& x) {
  return unary(
      "square", x, [](double v) { return v * v; }, [](double in, double) { return 2.0 * in; });
}

Tensor sqrt(const Tensor& x) {
  if ((x.value().array() < 0.0).any()) throw DomainError("sqrt of negative value");
  return unary(
      "sqrt", x, [](double v) { return std::sqrt(v); },
      [](double, double out) { return out > 0.0 ? 0.5 / out : 0.0; });
}

Tensor pow_positive(const Tensor& x, double p) {
  return unary(
      "pow_positive", x, [p](double v) { return v > 0.0 ? std::pow(v, p) : 0.0; },
      [p](double in, double) { return in > 0.0 ? p * std::pow(in, p - 1.0) : 0.0; });
}

Tensor softmax_rows(const Tensor& x) {
  const Matrix& a = x.value();
  Matrix out(a.rows(), a.cols());
  for (Index r = 0; r < a.rows(); ++r) {
    const double m = a.row(r).maxCoeff();
    double z = 0.0;
    for (Index c = 0; c < a.cols(); ++c) {
      out(r, c) = std::exp(a(r, c) - m);
      z += out(r, c);
    }
    out.row(r) /= z;
  }
  Matrix saved = out;
  return x.tape().record("softmax_rows", std::move(out), {x},
                         [s = std::move(saved)](const Matrix& g, std::span<const bool>,
                                                std::span<Matrix> pg) {
                           Matrix d(s.rows(), s.cols());
                           for (Index r = 0; r < s.rows(); ++r) {
                             const double dot = g.row(r).dot(s.row(r));
                             d.row(r) = s.row(r).cwiseProduct(
                                 (g.row(r).array() - dot).matrix());
                           }
                           pg[0] = std::move(d);
                         });
}

Tensor masked_select(const Tensor& x, const std::vector<std::vector<bool>>& mask) {
  const Matrix& a = x.value();
  if (static_cast<Index>(mask.size()) != a.rows()) {
    throw DimensionError("masked_select: mask rows differ from tensor rows");
  }
  std::vector<Index> flat;
  for (Index r = 0; r < a.rows(); ++r) {
    if (static_cast<Index>(mask[r].size()) != a.cols()) {
      throw DimensionError("masked_select: mask cols differ from tensor cols");
    }
    for (Index c = 0; c < a.cols(); ++c) {
      if (mask[r][c]) flat.push_back(r * a.cols() + c);
    }
  }
  Matrix out(static_cast<Index>(flat.size()), 1);
  for (std::size_t i = 0; i < flat.size(); ++i) out(static_cast<Index>(i), 0) = a.data()[flat[i]];
  const Index r = a.rows(), c = a.cols();
  return x.tape().record("masked_select", std::move(out), {x},
                         [flat = std::move(flat), r, c](const Matrix& g, std::span<const bool>,
                                                        std::span<Matrix> pg) {
                           Matrix d = Matrix::Zero(r, c);
                           for (std::size_t i = 0; i < flat.size(); ++i) {
                             d.data()[flat[i]] = g(static_cast<Index>(i), 0);
                           }
                           pg[0] = std::move(d);
                         });
}

Tensor stop_gradient(const Tensor& x) { return x.tape().constant(x.value()); }

Tensor straight_through(const Matrix& hard, const Tensor& soft) {
  if (hard.rows() != soft.rows() || hard.cols() != soft.cols()) {
    throw DimensionError("straight_through: hard " + shape_str(hard) + " vs soft " +
                         shape_str(soft.value()));
  }
  return soft.tape().record("straight_through", hard, {soft},
                            [](const Matrix& g, std::span<const bool>, std::span<Matrix> pg) {
                              pg[0] = g;
                            });
}

Tensor symmetric_from_upper(const Tensor& x, Index n) {
  const Matrix& u = x.value();
  const Index expected = n * (n - 1) / 2;
  if (u.rows() != 1 || u.cols() != expected) {
    throw DimensionError("symmetric_from_upper: expected 1x" + std::to_string(expected) +
                         ", got " + shape_str(u));
  }
  Matrix out = Matrix::Zero(n, n);
  Index k = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j, ++k) {
      out(i, j) = u(0, k);
      out(j, i) = u(0, k);
    }
  }
  return x.tape().record("symmetric_from_upper", std::move(out), {x},
                         [n, expected](const Matrix& g, std::span<const bool>,
                                       std::span<Matrix> pg) {
                           Matrix d(1, expected);
                           Index k = 0;
                           for (Index i = 0; i < n; ++i) {
                             for (Index j = i + 1; j < n; ++j, ++k) d(0, k) = g(i, j) + g(j, i);
                           }
                           pg[0] = std::move(d);
                         });
}

}  // namespace decgan
