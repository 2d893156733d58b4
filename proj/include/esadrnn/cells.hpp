#pragma once

// Dilated recurrent cells. Each step mixes the newest cell state with
// one from `dilation` steps back, and the emitted vector is a slice of
// the gated state:
//
//   f,u,o = sigmoid(W x + V h_{t-1} + U h_{t-d} + b)
//   cand  = tanh   (W x + V h_{t-1} + U h_{t-d} + b)
//   c_t   = u*(f*c_{t-1} + (1-f)*c_{t-d}) + (1-u)*cand
//   h'    = o * c_t
//
// h' splits into an emitted part (out_split components) and the
// controlling state h (ctrl components) fed back on the next steps.
//
// The attentive pair runs two such cells: the first emits one weight
// per input component, the input is multiplied by exp(weights), and the
// second cell produces the output from the modulated input.

#include <deque>
#include <utility>

#include "esadrnn/tensor.hpp"

namespace esadrnn {

struct CellSizes {
  int input = 0;
  int state = 0;      // width of the gates and of c
  int out_split = 0;  // emitted components of h'
  int ctrl = 0;       // controlling components of h'
  int dilation = 0;

  void validate() const;
};

struct CellTensors {
  CellSizes sizes;
  Tensor wf, wu, wo, wc;  // {state, input}
  Tensor vf, vu, vo, vc;  // {state, ctrl}
  Tensor uf, uu, uo, uc;  // {state, ctrl}
  Tensor bf, bu, bo, bc;  // {state}
};

// Ring of past (h, c) pairs, deep enough for the cell's dilation.
// Delays that reach back before the first step read as zeros.
class DilatedState {
 public:
  DilatedState(int state, int ctrl, int dilation);

  void reset();
  int steps() const { return steps_; }
  Tensor h_delayed(Tape& tape, int delay) const;
  Tensor c_delayed(Tape& tape, int delay) const;
  void push(const Tensor& h, const Tensor& c);

 private:
  int state_;
  int ctrl_;
  int dilation_;
  int steps_ = 0;
  std::deque<std::pair<Tensor, Tensor>> hist_;  // front = newest
};

Tensor drnn_step(const Tensor& x, const CellTensors& p, DilatedState& st);

struct AttentionOutput {
  Tensor y;
  Tensor weights;  // exp of the first cell's output, all positive
};

AttentionOutput adrnn_step(const Tensor& x, const CellTensors& p1,
                           const CellTensors& p2, DilatedState& st1,
                           DilatedState& st2);

}  // namespace esadrnn
