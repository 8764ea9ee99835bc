#pragma once

#include "decgan/serialize.hpp"
#include "decgan/tensor.hpp"

#include <string>
#include <vector>

namespace decgan {

// Ordered, named set of trainable matrices belonging to one module.
class ParamStore {
 public:
  std::size_t add(std::string name, Matrix init);

  std::size_t size() const { return values_.size(); }
  const Matrix& operator[](std::size_t i) const { return values_[i]; }
  Matrix& operator[](std::size_t i) { return values_[i]; }
  const std::string& name(std::size_t i) const { return names_[i]; }

  // Places every parameter on the tape, as leaves or as constants.
  std::vector<Tensor> bind(Tape& tape, bool trainable) const;

  NamedTensors to_named(const std::string& prefix) const;
  // Overwrites values from `named` entries "<prefix><name>"; shapes must match.
  void load_named(const NamedTensors& named, const std::string& prefix);

 private:
  std::vector<std::string> names_;
  std::vector<Matrix> values_;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam(const ParamStore& params, AdamConfig config);

  void step(ParamStore& params, const std::vector<Matrix>& grads);

  long steps() const { return steps_; }
  const AdamConfig& config() const { return config_; }

  NamedTensors to_named(const std::string& prefix) const;
  void load_named(const NamedTensors& named, const std::string& prefix);

 private:
  AdamConfig config_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  long steps_ = 0;
};

// Lookup helper over NamedTensors; throws FormatError when missing.
// Half-width of the uniform init for a layer with `fan_in` inputs:
// 1/sqrt(fan_in) for plain layers, sqrt(6/fan_in) ahead of a ReLU.
double uniform_bound(Index fan_in);
double relu_uniform_bound(Index fan_in);

const Matrix& find_named(const NamedTensors& named, const std::string& name);

}  // namespace decgan
