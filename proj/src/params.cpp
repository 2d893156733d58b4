#include "esadrnn/params.hpp"

#include <cmath>

#include "esadrnn/errors.hpp"

namespace esadrnn {

void Parameter::zero_grad() { grad.assign(grad.size(), 0.0); }

Parameter& ParamStore::create(const std::string& name, Shape shape) {
  if (index_.count(name))
    throw Error("ParamStore: duplicate parameter name '" + name + "'");
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->shape = std::move(shape);
  int n = p->size();
  p->value.assign(n, 0.0);
  p->grad.assign(n, 0.0);
  p->m.assign(n, 0.0);
  p->v.assign(n, 0.0);
  Parameter& ref = *p;
  index_[name] = p.get();
  order_.push_back(std::move(p));
  return ref;
}

Parameter& ParamStore::at(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end())
    throw Error("ParamStore: unknown parameter '" + name + "'");
  return *it->second;
}

const Parameter& ParamStore::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end())
    throw Error("ParamStore: unknown parameter '" + name + "'");
  return *it->second;
}

bool ParamStore::contains(const std::string& name) const {
  return index_.count(name) != 0;
}

void ParamStore::zero_grads() {
  for (auto& p : order_) p->zero_grad();
}

int64_t ParamStore::total_size() const {
  int64_t n = 0;
  for (const auto& p : order_) n += p->size();
  return n;
}

void init_uniform_fan_in(Parameter& p, int fan_in, std::mt19937_64& rng) {
  double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& v : p.value) v = dist(rng);
}

}  // namespace esadrnn
