#pragma once

#include "decgan/tensor.hpp"

#include <functional>
#include <span>
#include <vector>

namespace decgan {

// Builds a scalar expression on `tape` from the given leaf tensors.
using ScalarFunction = std::function<Tensor(Tape& tape, std::span<const Tensor> leaves)>;

// Max over all leaf entries of |analytic - central difference| / max(1, |central difference|).
// Throws UsageError if epsilon is outside [1e-7, 1e-3] or f is not scalar-valued.
double grad_check(const ScalarFunction& f, const std::vector<Matrix>& leaves,
                  double epsilon = 1e-5);

}  // namespace decgan
