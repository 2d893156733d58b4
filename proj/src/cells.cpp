#include "esadrnn/cells.hpp"

#include <string>

#include "esadrnn/errors.hpp"

namespace esadrnn {

void CellSizes::validate() const {
  if (input < 1 || state < 1 || out_split < 1 || ctrl < 1)
    throw ShapeError("cell sizes must be positive");
  if (out_split + ctrl > state)
    throw ShapeError("cell split " + std::to_string(out_split) + "+" +
                     std::to_string(ctrl) + " exceeds state width " +
                     std::to_string(state));
  if (dilation < 2)
    throw ShapeError("cell dilation must be at least 2, got " +
                     std::to_string(dilation));
}

DilatedState::DilatedState(int state, int ctrl, int dilation)
    : state_(state), ctrl_(ctrl), dilation_(dilation) {}

void DilatedState::reset() {
  hist_.clear();
  steps_ = 0;
}

Tensor DilatedState::h_delayed(Tape& tape, int delay) const {
  if (delay < 1 || delay > dilation_)
    throw ShapeError("h_delayed: delay " + std::to_string(delay) +
                     " outside ring depth " + std::to_string(dilation_));
  if (delay > steps_) return tape.zeros(ctrl_);
  return hist_[delay - 1].first;
}

Tensor DilatedState::c_delayed(Tape& tape, int delay) const {
  if (delay < 1 || delay > dilation_)
    throw ShapeError("c_delayed: delay " + std::to_string(delay) +
                     " outside ring depth " + std::to_string(dilation_));
  if (delay > steps_) return tape.zeros(state_);
  return hist_[delay - 1].second;
}

void DilatedState::push(const Tensor& h, const Tensor& c) {
  hist_.emplace_front(h, c);
  if (static_cast<int>(hist_.size()) > dilation_) hist_.pop_back();
  ++steps_;
}

Tensor drnn_step(const Tensor& x, const CellTensors& p, DilatedState& st) {
  p.sizes.validate();
  if (x.shape() != Shape{p.sizes.input})
    throw ShapeError("drnn_step: input " + shape_str(x.shape()) +
                     " does not match cell input width " +
                     std::to_string(p.sizes.input));

  Tape& tape = *x.tape();
  Tensor h1 = st.h_delayed(tape, 1);
  Tensor hd = st.h_delayed(tape, p.sizes.dilation);
  Tensor c1 = st.c_delayed(tape, 1);
  Tensor cd = st.c_delayed(tape, p.sizes.dilation);

  auto gate = [&](const Tensor& w, const Tensor& v, const Tensor& u,
                  const Tensor& b) {
    return add(add(matvec(w, x), add(matvec(v, h1), matvec(u, hd))), b);
  };
  Tensor f = sigmoid(gate(p.wf, p.vf, p.uf, p.bf));
  Tensor u = sigmoid(gate(p.wu, p.vu, p.uu, p.bu));
  Tensor o = sigmoid(gate(p.wo, p.vo, p.uo, p.bo));
  Tensor cand = esadrnn::tanh(gate(p.wc, p.vc, p.uc, p.bc));

  Tensor mixed = add(mul(f, c1), mul(one_minus(f), cd));
  Tensor c = add(mul(u, mixed), mul(one_minus(u), cand));
  Tensor hprime = mul(o, c);

  Tensor out = slice(hprime, 0, p.sizes.out_split);
  Tensor h = slice(hprime, p.sizes.out_split, p.sizes.ctrl);
  st.push(h, c);
  return out;
}

AttentionOutput adrnn_step(const Tensor& x, const CellTensors& p1,
                           const CellTensors& p2, DilatedState& st1,
                           DilatedState& st2) {
  if (p1.sizes.out_split != p1.sizes.input ||
      x.shape() != Shape{p1.sizes.input})
    throw ShapeError(
        "adrnn_step: attention cell must emit one weight per input "
        "component (input " +
        shape_str(x.shape()) + ", emits " +
        std::to_string(p1.sizes.out_split) + ")");
  if (p1.sizes.dilation != p2.sizes.dilation)
    throw ShapeError("adrnn_step: the paired cells must share a dilation");

  Tensor m = drnn_step(x, p1, st1);
  Tensor weights = esadrnn::exp(m);
  Tensor y = drnn_step(mul(weights, x), p2, st2);
  return {y, weights};
}

}  // namespace esadrnn
