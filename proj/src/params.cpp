#include "decgan/params.hpp"

#include "decgan/errors.hpp"

#include <cmath>

namespace decgan {

std::size_t ParamStore::add(std::string name, Matrix init) {
  require_finite(init, name);
  names_.push_back(std::move(name));
  values_.push_back(std::move(init));
  return values_.size() - 1;
}

std::vector<Tensor> ParamStore::bind(Tape& tape, bool trainable) const {
  std::vector<Tensor> out;
  out.reserve(values_.size());
  for (const Matrix& v : values_) out.push_back(trainable ? tape.leaf(v) : tape.constant(v));
  return out;
}

NamedTensors ParamStore::to_named(const std::string& prefix) const {
  NamedTensors out;
  for (std::size_t i = 0; i < values_.size(); ++i) out.emplace_back(prefix + names_[i], values_[i]);
  return out;
}

const Matrix& find_named(const NamedTensors& named, const std::string& name) {
  for (const auto& [n, m] : named) {
    if (n == name) return m;
  }
  throw FormatError("missing tensor '" + name + "'");
}

void ParamStore::load_named(const NamedTensors& named, const std::string& prefix) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const Matrix& m = find_named(named, prefix + names_[i]);
    if (m.rows() != values_[i].rows() || m.cols() != values_[i].cols()) {
      throw FormatError("shape mismatch for tensor '" + prefix + names_[i] + "'");
    }
    values_[i] = m;
  }
}

Adam::Adam(const ParamStore& params, AdamConfig config) : config_(config) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_.push_back(Matrix::Zero(params[i].rows(), params[i].cols()));
    v_.push_back(Matrix::Zero(params[i].rows(), params[i].cols()));
  }
}

void Adam::step(ParamStore& params, const std::vector<Matrix>& grads) {
  if (grads.size() != params.size()) throw UsageError("Adam::step: gradient count mismatch");
  ++steps_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < grads.size(); ++i) {
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * grads[i];
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * grads[i].cwiseProduct(grads[i]);
    Matrix& p = params[i];
    for (Index k = 0; k < p.size(); ++k) {
      const double mhat = m_[i].data()[k] / bc1;
      const double vhat = v_[i].data()[k] / bc2;
      p.data()[k] -= config_.lr * mhat / (std::sqrt(vhat) + config_.eps);
    }
  }
}

NamedTensors Adam::to_named(const std::string& prefix) const {
  NamedTensors out;
  for (std::size_t i = 0; i < m_.size(); ++i) {
    out.emplace_back(prefix + "m." + std::to_string(i), m_[i]);
    out.emplace_back(prefix + "v." + std::to_string(i), v_[i]);
  }
  out.emplace_back(prefix + "steps", Matrix::Constant(1, 1, static_cast<double>(steps_)));
  return out;
}

void Adam::load_named(const NamedTensors& named, const std::string& prefix) {
  for (std::size_t i = 0; i < m_.size(); ++i) {
    m_[i] = find_named(named, prefix + "m." + std::to_string(i));
    v_[i] = find_named(named, prefix + "v." + std::to_string(i));
  }
  steps_ = static_cast<long>(find_named(named, prefix + "steps")(0, 0));
}

double uniform_bound(Index fan_in) { return 1.0 / std::sqrt(static_cast<double>(fan_in)); }

double relu_uniform_bound(Index fan_in) { return std::sqrt(6.0 / static_cast<double>(fan_in)); }

}  // namespace decgan
