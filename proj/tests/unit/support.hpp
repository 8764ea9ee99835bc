#pragma once

#include "decgan/tensor.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace testing {

using decgan::Index;
using decgan::Matrix;
using decgan::Tape;
using decgan::Tensor;

inline Matrix random_matrix(std::mt19937_64& gen, Index r, Index c, double lo = -1.0,
                            double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = u(gen);
  return m;
}

inline Matrix random_symmetric_adjacency(std::mt19937_64& gen, Index n, double density = 0.5) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (u(gen) < density) a(i, j) = a(j, i) = u(gen);
  return a;
}

using Builder = std::function<Tensor(Tape&, const std::vector<Tensor>&)>;

// Central differences on the forward value only; shares no code with the
// tape's backward rules.
inline std::vector<Matrix> numeric_gradient(const Builder& f, std::vector<Matrix> leaves,
                                            double eps = 1e-6) {
  auto eval = [&](const std::vector<Matrix>& ls) {
    Tape tape;
    std::vector<Tensor> ts;
    for (const Matrix& m : ls) ts.push_back(tape.constant(m));
    return f(tape, ts).item();
  };
  std::vector<Matrix> grads;
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    Matrix g(leaves[k].rows(), leaves[k].cols());
    for (Index i = 0; i < g.rows(); ++i) {
      for (Index j = 0; j < g.cols(); ++j) {
        const double orig = leaves[k](i, j);
        leaves[k](i, j) = orig + eps;
        const double up = eval(leaves);
        leaves[k](i, j) = orig - eps;
        const double down = eval(leaves);
        leaves[k](i, j) = orig;
        g(i, j) = (up - down) / (2.0 * eps);
      }
    }
    grads.push_back(g);
  }
  return grads;
}

inline std::vector<Matrix> tape_gradient(const Builder& f, const std::vector<Matrix>& leaves) {
  Tape tape;
  std::vector<Tensor> ts;
  for (const Matrix& m : leaves) ts.push_back(tape.leaf(m));
  Tensor root = f(tape, ts);
  return tape.gradient(root, ts);
}

// max |a - n| / max(1, |n|) over every entry of every leaf
inline double gradient_error(const Builder& f, const std::vector<Matrix>& leaves,
                             double eps = 1e-6) {
  const auto a = tape_gradient(f, leaves);
  const auto n = numeric_gradient(f, leaves, eps);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (Index i = 0; i < a[k].rows(); ++i) {
      for (Index j = 0; j < a[k].cols(); ++j) {
        const double err = std::abs(a[k](i, j) - n[k](i, j)) / std::max(1.0, std::abs(n[k](i, j)));
        worst = std::max(worst, err);
      }
    }
  }
  return worst;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("decgan_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
