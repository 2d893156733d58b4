#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "esadrnn/tensor.hpp"

namespace esadrnn {

// Trainable weights live outside the tape so that they survive the
// per-batch tape rebuild. Adam moments are kept alongside the values.
struct Parameter {
  std::string name;
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  std::vector<double> m;
  std::vector<double> v;

  int size() const { return numel(shape); }
  void zero_grad();
};

// Owns parameters in creation order; that order is the serialization
// order, so checkpoints written from the same configuration always lay
// out arrays identically.
class ParamStore {
 public:
  Parameter& create(const std::string& name, Shape shape);
  Parameter& at(const std::string& name);
  const Parameter& at(const std::string& name) const;
  bool contains(const std::string& name) const;

  size_t count() const { return order_.size(); }
  Parameter& operator[](size_t i) { return *order_[i]; }
  const Parameter& operator[](size_t i) const { return *order_[i]; }

  void zero_grads();
  int64_t total_size() const;

 private:
  std::vector<std::unique_ptr<Parameter>> order_;
  std::map<std::string, Parameter*> index_;
};

// Fills a parameter with draws from uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)).
void init_uniform_fan_in(Parameter& p, int fan_in, std::mt19937_64& rng);

}  // namespace esadrnn
