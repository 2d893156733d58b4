#pragma once

// The recurrent stack that maps one preprocessed daily input vector to
// 74 outputs: 24 point forecasts, 24 lower and 24 upper interval bounds
// (all in squashed space) and the two smoothing-coefficient corrections.
//
// Layout per step: the 90 calendar one-hots are replaced by a learned
// embedding, giving x of width 193 + embedding_size. Block 1 is the
// attentive cell pair at dilation 2, blocks 2 and 3 are plain cells at
// dilations 4 and 7. With shortcuts enabled block 3 sees y2 + y1 and
// the linear head sees y3 + y2.

#include "esadrnn/cells.hpp"
#include "esadrnn/config.hpp"
#include "esadrnn/params.hpp"
#include "esadrnn/preprocessing.hpp"

namespace esadrnn {

inline constexpr int kNetOutputLen = 74;
inline constexpr int kOutPoint = 0;
inline constexpr int kOutLower = 24;
inline constexpr int kOutUpper = 48;
inline constexpr int kOutDalpha = 72;
inline constexpr int kOutDbeta = 73;

inline constexpr int kDilation1 = 2;
inline constexpr int kDilation2 = 4;
inline constexpr int kDilation3 = 7;

struct CellParamRefs {
  CellSizes sizes;
  Parameter *wf, *wu, *wo, *wc;
  Parameter *vf, *vu, *vo, *vc;
  Parameter *uf, *uu, *uo, *uc;
  Parameter *bf, *bu, *bo, *bc;
};

struct ModelParams {
  NetSizes sizes;
  Parameter* embedding;   // {embedding_size, 90}
  CellParamRefs block1_att;
  CellParamRefs block1_main;
  CellParamRefs block2;
  CellParamRefs block3;
  Parameter* head_w;      // {74, block_output_size}
  Parameter* head_b;      // {74}
  Parameter* alpha_logit; // {1}
  Parameter* beta_logit;  // {1}
};

// Creates all named parameters in the store and initializes them from
// the config seed: cell and embedding weights uniform in +-1/sqrt(fan_in),
// biases and head zero, logits from the configured initial values. The
// zero head makes an untrained model predict the bare smoothing
// forecast, which is a sane starting point for the optimizer.
ModelParams create_model_params(ParamStore& store, const TrainConfig& cfg);

// Binds to parameters that already exist in the store (checkpoint load),
// validating every shape against the configured sizes.
ModelParams bind_model_params(ParamStore& store, const TrainConfig& cfg);

struct NetTensors {
  NetSizes sizes;
  Tensor embedding;
  CellTensors block1_att, block1_main, block2, block3;
  Tensor head_w, head_b;
  Tensor alpha_logit, beta_logit;
};

// Puts every parameter on the tape once per walk.
NetTensors place_on_tape(Tape& tape, const ModelParams& params);

struct NetState {
  DilatedState s1a, s1b, s2, s3;

  explicit NetState(const ModelParams& params);
  void reset();
};

struct NetStepOutput {
  Tensor out;        // {74}
  Tensor attention;  // {193 + embedding_size}, the exp weights of block 1
};

NetStepOutput forward_step(const Tensor& raw, const NetTensors& net,
                           NetState& state);

}  // namespace esadrnn
