#pragma once

#include "decgan/tensor.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace decgan {

// Seeded stream used everywhere randomness is needed. Sampling helpers are
// written out explicitly so draws do not depend on the standard library's
// distribution implementations, and carry no hidden cached state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();   // standard normal, Box-Muller
  std::size_t below(std::size_t n);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

  Matrix uniform_matrix(Index rows, Index cols, double bound);
  Matrix normal_matrix(Index rows, Index cols);

  std::string state() const;
  void set_state(const std::string& s);

 private:
  std::mt19937_64 engine_;
};

// Independent child seed for stream `stream` of `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace decgan
