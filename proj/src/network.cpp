#include "esadrnn/network.hpp"

#include <random>
#include <string>

#include "esadrnn/errors.hpp"

namespace esadrnn {

namespace {

struct CellLayout {
  CellSizes att;   // block 1, first cell
  CellSizes main;  // block 1, second cell
  CellSizes plain2;
  CellSizes plain3;
  int x_width;
};

CellLayout derive_layout(const NetSizes& n) {
  CellLayout l;
  l.x_width = kCoreInputLen + n.embedding_size;
  // The attention cell emits one weight per input component, so its
  // state must hold the full input width next to the controlling slice.
  l.att = CellSizes{l.x_width, l.x_width + n.hidden_size, l.x_width,
                    n.hidden_size, kDilation1};
  l.main = CellSizes{l.x_width, n.state_size, n.block_output_size,
                     n.hidden_size, kDilation1};
  l.plain2 = CellSizes{n.block_output_size, n.state_size,
                       n.block_output_size, n.hidden_size, kDilation2};
  l.plain3 = CellSizes{n.block_output_size, n.state_size,
                       n.block_output_size, n.hidden_size, kDilation3};
  l.att.validate();
  l.main.validate();
  l.plain2.validate();
  l.plain3.validate();
  return l;
}

CellParamRefs create_cell(ParamStore& store, const std::string& prefix,
                          const CellSizes& s, std::mt19937_64& rng) {
  CellParamRefs refs;
  refs.sizes = s;
  auto mat = [&](const char* name, int fan_in) -> Parameter* {
    Parameter& p = store.create(prefix + "." + name, {s.state, fan_in});
    init_uniform_fan_in(p, fan_in, rng);
    return &p;
  };
  auto bias = [&](const char* name) -> Parameter* {
    return &store.create(prefix + "." + name, {s.state});
  };
  refs.wf = mat("wf", s.input);
  refs.wu = mat("wu", s.input);
  refs.wo = mat("wo", s.input);
  refs.wc = mat("wc", s.input);
  refs.vf = mat("vf", s.ctrl);
  refs.vu = mat("vu", s.ctrl);
  refs.vo = mat("vo", s.ctrl);
  refs.vc = mat("vc", s.ctrl);
  refs.uf = mat("uf", s.ctrl);
  refs.uu = mat("uu", s.ctrl);
  refs.uo = mat("uo", s.ctrl);
  refs.uc = mat("uc", s.ctrl);
  refs.bf = bias("bf");
  refs.bu = bias("bu");
  refs.bo = bias("bo");
  refs.bc = bias("bc");
  return refs;
}

CellParamRefs bind_cell(ParamStore& store, const std::string& prefix,
                        const CellSizes& s) {
  CellParamRefs refs;
  refs.sizes = s;
  auto grab = [&](const char* name, const Shape& want) -> Parameter* {
    Parameter& p = store.at(prefix + "." + name);
    if (p.shape != want)
      throw CheckpointShapeError("parameter '" + p.name + "' has shape " +
                                 shape_str(p.shape) + ", expected " +
                                 shape_str(want));
    return &p;
  };
  Shape w{s.state, s.input}, vu{s.state, s.ctrl}, b{s.state};
  refs.wf = grab("wf", w);
  refs.wu = grab("wu", w);
  refs.wo = grab("wo", w);
  refs.wc = grab("wc", w);
  refs.vf = grab("vf", vu);
  refs.vu = grab("vu", vu);
  refs.vo = grab("vo", vu);
  refs.vc = grab("vc", vu);
  refs.uf = grab("uf", vu);
  refs.uu = grab("uu", vu);
  refs.uo = grab("uo", vu);
  refs.uc = grab("uc", vu);
  refs.bf = grab("bf", b);
  refs.bu = grab("bu", b);
  refs.bo = grab("bo", b);
  refs.bc = grab("bc", b);
  return refs;
}

}  // namespace

ModelParams create_model_params(ParamStore& store, const TrainConfig& cfg) {
  CellLayout layout = derive_layout(cfg.net);
  std::mt19937_64 rng(cfg.seed);

  ModelParams mp;
  mp.sizes = cfg.net;
  Parameter& emb =
      store.create("embedding.w", {cfg.net.embedding_size, kCalendarLen});
  init_uniform_fan_in(emb, kCalendarLen, rng);
  mp.embedding = &emb;

  mp.block1_att = create_cell(store, "block1.att", layout.att, rng);
  mp.block1_main = create_cell(store, "block1.main", layout.main, rng);
  mp.block2 = create_cell(store, "block2", layout.plain2, rng);
  mp.block3 = create_cell(store, "block3", layout.plain3, rng);

  mp.head_w = &store.create("head.w", {kNetOutputLen, cfg.net.block_output_size});
  mp.head_b = &store.create("head.b", {kNetOutputLen});

  Parameter& al = store.create("es.alpha_logit", {1});
  al.value[0] = cfg.alpha_logit_init;
  Parameter& bl = store.create("es.beta_logit", {1});
  bl.value[0] = cfg.beta_logit_init;
  mp.alpha_logit = &al;
  mp.beta_logit = &bl;
  return mp;
}

ModelParams bind_model_params(ParamStore& store, const TrainConfig& cfg) {
  CellLayout layout = derive_layout(cfg.net);

  ModelParams mp;
  mp.sizes = cfg.net;
  auto grab = [&](const char* name, const Shape& want) -> Parameter* {
    Parameter& p = store.at(name);
    if (p.shape != want)
      throw CheckpointShapeError("parameter '" + p.name + "' has shape " +
                                 shape_str(p.shape) + ", expected " +
                                 shape_str(want));
    return &p;
  };
  mp.embedding =
      grab("embedding.w", {cfg.net.embedding_size, kCalendarLen});
  mp.block1_att = bind_cell(store, "block1.att", layout.att);
  mp.block1_main = bind_cell(store, "block1.main", layout.main);
  mp.block2 = bind_cell(store, "block2", layout.plain2);
  mp.block3 = bind_cell(store, "block3", layout.plain3);
  mp.head_w = grab("head.w", {kNetOutputLen, cfg.net.block_output_size});
  mp.head_b = grab("head.b", {kNetOutputLen});
  mp.alpha_logit = grab("es.alpha_logit", {1});
  mp.beta_logit = grab("es.beta_logit", {1});
  return mp;
}

namespace {

CellTensors place_cell(Tape& tape, const CellParamRefs& refs) {
  CellTensors t;
  t.sizes = refs.sizes;
  t.wf = tape.param(*refs.wf);
  t.wu = tape.param(*refs.wu);
  t.wo = tape.param(*refs.wo);
  t.wc = tape.param(*refs.wc);
  t.vf = tape.param(*refs.vf);
  t.vu = tape.param(*refs.vu);
  t.vo = tape.param(*refs.vo);
  t.vc = tape.param(*refs.vc);
  t.uf = tape.param(*refs.uf);
  t.uu = tape.param(*refs.uu);
  t.uo = tape.param(*refs.uo);
  t.uc = tape.param(*refs.uc);
  t.bf = tape.param(*refs.bf);
  t.bu = tape.param(*refs.bu);
  t.bo = tape.param(*refs.bo);
  t.bc = tape.param(*refs.bc);
  return t;
}

}  // namespace

NetTensors place_on_tape(Tape& tape, const ModelParams& params) {
  NetTensors t;
  t.sizes = params.sizes;
  t.embedding = tape.param(*params.embedding);
  t.block1_att = place_cell(tape, params.block1_att);
  t.block1_main = place_cell(tape, params.block1_main);
  t.block2 = place_cell(tape, params.block2);
  t.block3 = place_cell(tape, params.block3);
  t.head_w = tape.param(*params.head_w);
  t.head_b = tape.param(*params.head_b);
  t.alpha_logit = tape.param(*params.alpha_logit);
  t.beta_logit = tape.param(*params.beta_logit);
  return t;
}

NetState::NetState(const ModelParams& params)
    : s1a(params.block1_att.sizes.state, params.block1_att.sizes.ctrl,
          params.block1_att.sizes.dilation),
      s1b(params.block1_main.sizes.state, params.block1_main.sizes.ctrl,
          params.block1_main.sizes.dilation),
      s2(params.block2.sizes.state, params.block2.sizes.ctrl,
         params.block2.sizes.dilation),
      s3(params.block3.sizes.state, params.block3.sizes.ctrl,
         params.block3.sizes.dilation) {}

void NetState::reset() {
  s1a.reset();
  s1b.reset();
  s2.reset();
  s3.reset();
}

NetStepOutput forward_step(const Tensor& raw, const NetTensors& net,
                           NetState& state) {
  if (raw.shape() != Shape{kRawInputLen})
    throw ShapeError("forward_step: raw input " + shape_str(raw.shape()) +
                     ", expected " + shape_str({kRawInputLen}));

  Tensor core = slice(raw, 0, kCoreInputLen);
  Tensor cal = slice(raw, kCoreInputLen, kCalendarLen);
  Tensor x = concat({core, matvec(net.embedding, cal)});

  AttentionOutput block1 =
      adrnn_step(x, net.block1_att, net.block1_main, state.s1a, state.s1b);
  Tensor y1 = block1.y;
  Tensor y2 = drnn_step(y1, net.block2, state.s2);
  Tensor in3 = net.sizes.shortcuts ? add(y2, y1) : y2;
  Tensor y3 = drnn_step(in3, net.block3, state.s3);
  Tensor head_in = net.sizes.shortcuts ? add(y3, y2) : y3;
  Tensor out = add(matvec(net.head_w, head_in), net.head_b);
  return {out, block1.weights};
}

}  // namespace esadrnn
