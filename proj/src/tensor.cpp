#include "esadrnn/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "esadrnn/params.hpp"

namespace esadrnn {

int numel(const Shape& s) {
  int n = 1;
  for (int d : s) n *= d;
  return s.empty() ? 0 : n;
}

std::string shape_str(const Shape& s) {
  std::ostringstream out;
  out << '{';
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) out << ',';
    out << s[i];
  }
  out << '}';
  return out.str();
}

namespace {

bool is_vector(const Shape& s) { return s.size() == 1 && s[0] >= 1; }
bool is_matrix(const Shape& s) { return s.size() == 2 && s[0] >= 1 && s[1] >= 1; }

[[noreturn]] void shape_fail(const char* op, const Shape& a, const Shape& b) {
  throw ShapeError(std::string(op) + ": shapes " + shape_str(a) + " and " +
                   shape_str(b) + " do not conform");
}

[[noreturn]] void shape_fail(const char* op, const Shape& a) {
  throw ShapeError(std::string(op) + ": unsupported shape " + shape_str(a));
}

void check_same_tape(const char* op, const Tensor& a, const Tensor& b) {
  if (!a.valid() || !b.valid() || a.tape() != b.tape())
    throw Error(std::string(op) + ": operands must live on the same tape");
}

double stable_sigmoid(double x) {
  if (x >= 0.0) {
    double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

const Shape& Tensor::shape() const { return tape_->node(id_).shape; }

const std::vector<double>& Tensor::values() const {
  return tape_->node(id_).values;
}

double Tensor::value() const {
  const auto& v = values();
  if (v.size() != 1)
    throw ShapeError("value(): tensor " + shape_str(shape()) + " is not scalar");
  return v[0];
}

const std::vector<double>& Tensor::grad() const { return tape_->grad_of(id_); }

Tensor Tape::emit(Node node) {
  nodes_.push_back(std::move(node));
  return Tensor(this, static_cast<int>(nodes_.size()) - 1);
}

Tensor Tape::constant(Shape shape, std::vector<double> values) {
  if (numel(shape) != static_cast<int>(values.size()))
    throw ShapeError("constant: shape " + shape_str(shape) + " does not match " +
                     std::to_string(values.size()) + " values");
  Node n;
  n.op = Op::kLeaf;
  n.shape = std::move(shape);
  n.values = std::move(values);
  return emit(std::move(n));
}

Tensor Tape::scalar(double v) { return constant({1}, {v}); }

Tensor Tape::zeros(int n) { return constant({n}, std::vector<double>(n, 0.0)); }

Tensor Tape::vector(const double* data, int n) {
  return constant({n}, std::vector<double>(data, data + n));
}

Tensor Tape::param(Parameter& p) {
  Node n;
  n.op = Op::kLeaf;
  n.shape = p.shape;
  n.values = p.value;
  n.sink = &p;
  return emit(std::move(n));
}

const std::vector<double>& Tape::grad_of(int id) const {
  if (!backward_ran_)
    throw Error("grad(): backward() has not run on this tape");
  auto& g = grads_[id];
  if (g.empty()) g.assign(nodes_[id].values.size(), 0.0);
  return g;
}

Tensor matvec(const Tensor& w, const Tensor& x) {
  check_same_tape("matvec", w, x);
  const Shape& ws = w.shape();
  const Shape& xs = x.shape();
  if (!is_matrix(ws) || !is_vector(xs) || ws[1] != xs[0])
    shape_fail("matvec", ws, xs);
  int rows = ws[0], cols = ws[1];
  const auto& wv = w.values();
  const auto& xv = x.values();
  Tape::Node n;
  n.op = Op::kMatVec;
  n.a = w.id();
  n.b = x.id();
  n.shape = {rows};
  n.values.resize(rows);
  for (int r = 0; r < rows; ++r) {
    const double* row = wv.data() + static_cast<size_t>(r) * cols;
    double acc = 0.0;
    for (int c = 0; c < cols; ++c) acc += row[c] * xv[c];
    n.values[r] = acc;
  }
  return w.tape()->emit(std::move(n));
}

namespace {

Tensor elementwise(const char* name, Op op, const Tensor& a, const Tensor& b) {
  check_same_tape(name, a, b);
  if (a.shape() != b.shape()) shape_fail(name, a.shape(), b.shape());
  Tape::Node n;
  n.op = op;
  n.a = a.id();
  n.b = b.id();
  n.shape = a.shape();
  const auto& av = a.values();
  const auto& bv = b.values();
  n.values.resize(av.size());
  switch (op) {
    case Op::kAdd:
      for (size_t i = 0; i < av.size(); ++i) n.values[i] = av[i] + bv[i];
      break;
    case Op::kSub:
      for (size_t i = 0; i < av.size(); ++i) n.values[i] = av[i] - bv[i];
      break;
    case Op::kMul:
      for (size_t i = 0; i < av.size(); ++i) n.values[i] = av[i] * bv[i];
      break;
    case Op::kDiv:
      for (size_t i = 0; i < av.size(); ++i) n.values[i] = av[i] / bv[i];
      break;
    default:
      throw Error("elementwise: bad op");
  }
  return a.tape()->emit(std::move(n));
}

Tensor unary(const char* name, Op op, const Tensor& x, double factor = 0.0) {
  if (!x.valid()) throw Error(std::string(name) + ": invalid tensor");
  Tape::Node n;
  n.op = op;
  n.a = x.id();
  n.shape = x.shape();
  n.factor = factor;
  const auto& xv = x.values();
  n.values.resize(xv.size());
  switch (op) {
    case Op::kSigmoid:
      for (size_t i = 0; i < xv.size(); ++i) n.values[i] = stable_sigmoid(xv[i]);
      break;
    case Op::kTanh:
      for (size_t i = 0; i < xv.size(); ++i) n.values[i] = std::tanh(xv[i]);
      break;
    case Op::kExp:
      for (size_t i = 0; i < xv.size(); ++i) n.values[i] = std::exp(xv[i]);
      break;
    case Op::kLog:
      for (size_t i = 0; i < xv.size(); ++i) n.values[i] = std::log(xv[i]);
      break;
    case Op::kScale:
      for (size_t i = 0; i < xv.size(); ++i) n.values[i] = factor * xv[i];
      break;
    case Op::kAddConst:
      for (size_t i = 0; i < xv.size(); ++i) n.values[i] = xv[i] + factor;
      break;
    default:
      throw Error("unary: bad op");
  }
  return x.tape()->emit(std::move(n));
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) { return elementwise("add", Op::kAdd, a, b); }
Tensor sub(const Tensor& a, const Tensor& b) { return elementwise("sub", Op::kSub, a, b); }
Tensor mul(const Tensor& a, const Tensor& b) { return elementwise("mul", Op::kMul, a, b); }
Tensor div(const Tensor& a, const Tensor& b) { return elementwise("div", Op::kDiv, a, b); }

Tensor concat(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeError("concat: no operands");
  Tape* tape = parts[0].tape();
  Tape::Node n;
  n.op = Op::kConcat;
  int total = 0;
  for (const Tensor& p : parts) {
    check_same_tape("concat", parts[0], p);
    if (!is_vector(p.shape())) shape_fail("concat", p.shape());
    n.extra.push_back(p.id());
    total += p.shape()[0];
  }
  n.shape = {total};
  n.values.reserve(total);
  for (const Tensor& p : parts)
    n.values.insert(n.values.end(), p.values().begin(), p.values().end());
  return tape->emit(std::move(n));
}

Tensor slice(const Tensor& x, int begin, int len) {
  if (!x.valid()) throw Error("slice: invalid tensor");
  const Shape& xs = x.shape();
  if (!is_vector(xs)) shape_fail("slice", xs);
  if (begin < 0 || len < 1 || begin + len > xs[0])
    throw ShapeError("slice: range [" + std::to_string(begin) + "," +
                     std::to_string(begin + len) + ") out of bounds for " +
                     shape_str(xs));
  Tape::Node n;
  n.op = Op::kSlice;
  n.a = x.id();
  n.offset = begin;
  n.shape = {len};
  const auto& xv = x.values();
  n.values.assign(xv.begin() + begin, xv.begin() + begin + len);
  return x.tape()->emit(std::move(n));
}

Tensor sigmoid(const Tensor& x) { return unary("sigmoid", Op::kSigmoid, x); }
Tensor tanh(const Tensor& x) { return unary("tanh", Op::kTanh, x); }
Tensor exp(const Tensor& x) { return unary("exp", Op::kExp, x); }
Tensor log(const Tensor& x) { return unary("log", Op::kLog, x); }
Tensor scale(const Tensor& x, double c) { return unary("scale", Op::kScale, x, c); }
Tensor add_const(const Tensor& x, double c) { return unary("add_const", Op::kAddConst, x, c); }

Tensor mean(const Tensor& x) {
  if (!x.valid()) throw Error("mean: invalid tensor");
  if (!is_vector(x.shape())) shape_fail("mean", x.shape());
  const auto& xv = x.values();
  double acc = 0.0;
  for (double v : xv) acc += v;
  Tape::Node n;
  n.op = Op::kMean;
  n.a = x.id();
  n.shape = {1};
  n.values = {acc / static_cast<double>(xv.size())};
  return x.tape()->emit(std::move(n));
}

void Tape::backward(const Tensor& root) {
  if (!root.valid() || root.tape() != this)
    throw Error("backward: root does not belong to this tape");
  if (numel(root.shape()) != 1)
    throw ShapeError("backward: root must be scalar, got " +
                     shape_str(root.shape()));

  grads_.assign(nodes_.size(), {});
  auto grad_buf = [this](int id) -> std::vector<double>& {
    auto& g = grads_[id];
    if (g.empty()) g.assign(nodes_[id].values.size(), 0.0);
    return g;
  };
  grad_buf(root.id())[0] = 1.0;

  for (int id = root.id(); id >= 0; --id) {
    const Node& n = nodes_[id];
    if (grads_[id].empty()) continue;  // not reachable from the root
    const std::vector<double>& g = grads_[id];
    switch (n.op) {
      case Op::kLeaf:
        break;
      case Op::kMatVec: {
        const Node& w = nodes_[n.a];
        const Node& x = nodes_[n.b];
        int rows = w.shape[0], cols = w.shape[1];
        auto& gw = grad_buf(n.a);
        auto& gx = grad_buf(n.b);
        for (int r = 0; r < rows; ++r) {
          double gr = g[r];
          const double* wrow = w.values.data() + static_cast<size_t>(r) * cols;
          double* gwrow = gw.data() + static_cast<size_t>(r) * cols;
          for (int c = 0; c < cols; ++c) {
            gwrow[c] += gr * x.values[c];
            gx[c] += gr * wrow[c];
          }
        }
        break;
      }
      case Op::kAdd: {
        auto& ga = grad_buf(n.a);
        auto& gb = grad_buf(n.b);
        for (size_t i = 0; i < g.size(); ++i) {
          ga[i] += g[i];
          gb[i] += g[i];
        }
        break;
      }
      case Op::kSub: {
        auto& ga = grad_buf(n.a);
        auto& gb = grad_buf(n.b);
        for (size_t i = 0; i < g.size(); ++i) {
          ga[i] += g[i];
          gb[i] -= g[i];
        }
        break;
      }
      case Op::kMul: {
        const auto& av = nodes_[n.a].values;
        const auto& bv = nodes_[n.b].values;
        auto& ga = grad_buf(n.a);
        auto& gb = grad_buf(n.b);
        for (size_t i = 0; i < g.size(); ++i) {
          ga[i] += g[i] * bv[i];
          gb[i] += g[i] * av[i];
        }
        break;
      }
      case Op::kDiv: {
        const auto& av = nodes_[n.a].values;
        const auto& bv = nodes_[n.b].values;
        auto& ga = grad_buf(n.a);
        auto& gb = grad_buf(n.b);
        for (size_t i = 0; i < g.size(); ++i) {
          ga[i] += g[i] / bv[i];
          gb[i] -= g[i] * av[i] / (bv[i] * bv[i]);
        }
        break;
      }
      case Op::kConcat: {
        size_t pos = 0;
        for (int src : n.extra) {
          auto& gs = grad_buf(src);
          for (size_t i = 0; i < gs.size(); ++i) gs[i] += g[pos + i];
          pos += gs.size();
        }
        break;
      }
      case Op::kSlice: {
        auto& ga = grad_buf(n.a);
        for (size_t i = 0; i < g.size(); ++i) ga[n.offset + i] += g[i];
        break;
      }
      case Op::kSigmoid: {
        auto& ga = grad_buf(n.a);
        for (size_t i = 0; i < g.size(); ++i)
          ga[i] += g[i] * n.values[i] * (1.0 - n.values[i]);
        break;
      }
      case Op::kTanh: {
        auto& ga = grad_buf(n.a);
        for (size_t i = 0; i < g.size(); ++i)
          ga[i] += g[i] * (1.0 - n.values[i] * n.values[i]);
        break;
      }
      case Op::kExp: {
        auto& ga = grad_buf(n.a);
        for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * n.values[i];
        break;
      }
      case Op::kLog: {
        const auto& av = nodes_[n.a].values;
        auto& ga = grad_buf(n.a);
        for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] / av[i];
        break;
      }
      case Op::kScale: {
        auto& ga = grad_buf(n.a);
        for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * n.factor;
        break;
      }
      case Op::kAddConst: {
        auto& ga = grad_buf(n.a);
        for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
        break;
      }
      case Op::kMean: {
        auto& ga = grad_buf(n.a);
        double share = g[0] / static_cast<double>(ga.size());
        for (size_t i = 0; i < ga.size(); ++i) ga[i] += share;
        break;
      }
    }
  }

  for (int id = 0; id <= root.id(); ++id) {
    const Node& n = nodes_[id];
    if (n.sink == nullptr || grads_[id].empty()) continue;
    for (size_t i = 0; i < grads_[id].size(); ++i)
      n.sink->grad[i] += grads_[id][i];
  }
  backward_ran_ = true;
}

}  // namespace esadrnn
