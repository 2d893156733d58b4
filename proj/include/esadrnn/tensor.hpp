#pragma once

// Reverse-mode automatic differentiation on a dynamic tape.
//
// The tape is rebuilt for every evaluation: each operation appends one
// node holding its inputs, its forward value and whatever bookkeeping
// the backward rule needs. backward() replays the tape once in reverse
// order, so two backward passes over the same tape produce bitwise
// identical gradients. Tensors are lightweight handles (tape pointer +
// node id); all storage lives inside the tape.
//
// Shapes are rank 1 (vectors, {n}) or rank 2 (matrices, {rows, cols}).
// A scalar is represented as a length-1 vector. There is no implicit
// broadcasting: elementwise operations demand identical shapes and
// mismatches throw ShapeError naming the operation and both shapes.

#include <cstdint>
#include <string>
#include <vector>

#include "esadrnn/errors.hpp"

namespace esadrnn {

struct Parameter;
class Tape;

using Shape = std::vector<int>;

int numel(const Shape& s);
std::string shape_str(const Shape& s);

class Tensor {
 public:
  Tensor() = default;

  bool valid() const { return tape_ != nullptr; }
  int id() const { return id_; }
  Tape* tape() const { return tape_; }

  const Shape& shape() const;
  int size() const { return numel(shape()); }
  const std::vector<double>& values() const;

  // Value of a single-element tensor.
  double value() const;

  // Gradient of the last backward() root with respect to this tensor.
  // Only valid after Tape::backward has run.
  const std::vector<double>& grad() const;

 private:
  friend class Tape;
  Tensor(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

enum class Op : uint8_t {
  kLeaf,
  kMatVec,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kConcat,
  kSlice,
  kSigmoid,
  kTanh,
  kExp,
  kLog,
  kScale,
  kAddConst,
  kMean,
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf without an external gradient sink.
  Tensor constant(Shape shape, std::vector<double> values);
  Tensor scalar(double v);
  Tensor zeros(int n);
  Tensor vector(const double* data, int n);

  // Leaf bound to an externally owned parameter. The leaf copies the
  // parameter's current values; backward() accumulates the leaf's
  // gradient into Parameter::grad.
  Tensor param(Parameter& p);

  // Reverse sweep from a scalar root. Gradients of earlier roots are
  // discarded; parameter gradients are accumulated (callers zero them
  // between steps).
  void backward(const Tensor& root);

  size_t size() const { return nodes_.size(); }
  bool backward_ran() const { return backward_ran_; }

  // Node construction, used by the free operation functions below.
  // Not meant to be called directly by library users.
  struct Node {
    Op op = Op::kLeaf;
    int a = -1;
    int b = -1;
    Shape shape;
    std::vector<double> values;
    std::vector<int> extra;   // concat operands
    double factor = 0.0;      // kScale multiplier, kAddConst addend
    int offset = 0;           // kSlice begin
    Parameter* sink = nullptr;
  };
  Tensor emit(Node node);
  const Node& node(int id) const { return nodes_[id]; }

 private:
  friend class Tensor;
  const std::vector<double>& grad_of(int id) const;

  std::vector<Node> nodes_;
  mutable std::vector<std::vector<double>> grads_;
  bool backward_ran_ = false;
};

// The operation set. Everything the model needs is built from these.
Tensor matvec(const Tensor& w, const Tensor& x);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor concat(const std::vector<Tensor>& parts);
Tensor slice(const Tensor& x, int begin, int len);
Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor exp(const Tensor& x);
Tensor log(const Tensor& x);
Tensor scale(const Tensor& x, double c);
Tensor add_const(const Tensor& x, double c);
Tensor mean(const Tensor& x);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }

// 1 - x, which gate recurrences use constantly.
inline Tensor one_minus(const Tensor& x) { return add_const(scale(x, -1.0), 1.0); }

}  // namespace esadrnn
