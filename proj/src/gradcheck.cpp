#include "decgan/gradcheck.hpp"

#include "decgan/errors.hpp"

#include <algorithm>
#include <cmath>

namespace decgan {

namespace {

double evaluate(const ScalarFunction& f, const std::vector<Matrix>& values) {
  Tape tape;
  std::vector<Tensor> leaves;
  leaves.reserve(values.size());
  for (const Matrix& v : values) leaves.push_back(tape.constant(v));
  return f(tape, leaves).item();
}

}  // namespace

double grad_check(const ScalarFunction& f, const std::vector<Matrix>& leaves, double epsilon) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
    throw UsageError("grad_check: epsilon must lie in [1e-7, 1e-3]");
  }
  Tape tape;
  std::vector<Tensor> vars;
  vars.reserve(leaves.size());
  for (const Matrix& v : leaves) vars.push_back(tape.leaf(v));
  const Tensor out = f(tape, vars);
  const std::vector<Matrix> analytic = tape.gradient(out, vars);

  double worst = 0.0;
  std::vector<Matrix> probe = leaves;
  for (std::size_t l = 0; l < leaves.size(); ++l) {
    for (Index i = 0; i < leaves[l].size(); ++i) {
      const double original = leaves[l].data()[i];
      probe[l].data()[i] = original + epsilon;
      const double up = evaluate(f, probe);
      probe[l].data()[i] = original - epsilon;
      const double down = evaluate(f, probe);
      probe[l].data()[i] = original;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double err =
          std::abs(analytic[l].data()[i] - numeric) / std::max(1.0, std::abs(numeric));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace decgan
