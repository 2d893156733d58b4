#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "esadrnn/cells.hpp"
#include "esadrnn/errors.hpp"
#include "esadrnn/gradcheck.hpp"

using namespace esadrnn;

namespace {

std::vector<double> draws(std::mt19937_64& rng, int n, double bound) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

CellTensors make_cell(Tape& tape, const CellSizes& s, std::mt19937_64* rng,
                      double bound = 0.5) {
  auto mat = [&](int r, int c) {
    return tape.constant({r, c}, rng ? draws(*rng, r * c, bound)
                                     : std::vector<double>(r * c, 0.0));
  };
  auto vec = [&](int n) {
    return tape.constant({n}, rng ? draws(*rng, n, bound)
                                  : std::vector<double>(n, 0.0));
  };
  CellTensors p;
  p.sizes = s;
  p.wf = mat(s.state, s.input);
  p.wu = mat(s.state, s.input);
  p.wo = mat(s.state, s.input);
  p.wc = mat(s.state, s.input);
  p.vf = mat(s.state, s.ctrl);
  p.vu = mat(s.state, s.ctrl);
  p.vo = mat(s.state, s.ctrl);
  p.vc = mat(s.state, s.ctrl);
  p.uf = mat(s.state, s.ctrl);
  p.uu = mat(s.state, s.ctrl);
  p.uo = mat(s.state, s.ctrl);
  p.uc = mat(s.state, s.ctrl);
  p.bf = vec(s.state);
  p.bu = vec(s.state);
  p.bo = vec(s.state);
  p.bc = vec(s.state);
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("cells");

TEST_CASE("delayed reads are zero until enough steps exist") {
  Tape tape;
  DilatedState st(4, 2, 3);
  CHECK(st.h_delayed(tape, 1).values() == std::vector<double>{0.0, 0.0});
  CHECK(st.c_delayed(tape, 3).values() ==
        std::vector<double>{0.0, 0.0, 0.0, 0.0});

  Tensor h1 = tape.constant({2}, {1.0, 2.0});
  Tensor c1 = tape.constant({4}, {1.0, 2.0, 3.0, 4.0});
  st.push(h1, c1);
  CHECK(st.h_delayed(tape, 1).values() == h1.values());
  CHECK(st.h_delayed(tape, 2).values() == std::vector<double>{0.0, 0.0});

  Tensor h2 = tape.constant({2}, {5.0, 6.0});
  st.push(h2, c1);
  Tensor h3 = tape.constant({2}, {7.0, 8.0});
  st.push(h3, c1);
  CHECK(st.h_delayed(tape, 1).values() == h3.values());
  CHECK(st.h_delayed(tape, 3).values() == h1.values());
  CHECK_THROWS_AS(st.h_delayed(tape, 4), ShapeError);
  CHECK_THROWS_AS(st.h_delayed(tape, 0), ShapeError);

  st.reset();
  CHECK(st.steps() == 0);
  CHECK(st.h_delayed(tape, 1).values() == std::vector<double>{0.0, 0.0});
}

TEST_CASE("zero weights give zero outputs forever") {
  Tape tape;
  CellSizes s{3, 6, 2, 3, 2};
  CellTensors p = make_cell(tape, s, nullptr);
  DilatedState st(s.state, s.ctrl, s.dilation);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10; ++i) {
    Tensor x = tape.constant({3}, draws(rng, 3, 2.0));
    Tensor y = drnn_step(x, p, st);
    CHECK(y.values() == std::vector<double>{0.0, 0.0});
  }
}

TEST_CASE("cell state stays in the hull of its mixing inputs") {
  std::mt19937_64 rng(5);
  Tape tape;
  CellSizes s{4, 8, 3, 4, 3};
  CellTensors p = make_cell(tape, s, &rng, 0.8);
  DilatedState st(s.state, s.ctrl, s.dilation);

  for (int step = 0; step < 100; ++step) {
    std::vector<double> c1 = st.c_delayed(tape, 1).values();
    std::vector<double> cd = st.c_delayed(tape, s.dilation).values();
    Tensor x = tape.constant({4}, draws(rng, 4, 1.5));
    drnn_step(x, p, st);
    std::vector<double> c = st.c_delayed(tape, 1).values();
    for (int i = 0; i < s.state; ++i) {
      // cand is a tanh output, so it lies in [-1, 1]; c must lie in the
      // hull of {c1, cd, cand} componentwise.
      double lo = std::min({c1[i], cd[i], -1.0});
      double hi = std::max({c1[i], cd[i], 1.0});
      CHECK(c[i] >= lo - 1e-12);
      CHECK(c[i] <= hi + 1e-12);
    }
  }
}

TEST_CASE("silencing the attention cell reduces the pair to a plain cell") {
  std::mt19937_64 rng(7);
  CellSizes s1{4, 9, 4, 4, 2};  // emits one weight per input component
  CellSizes s2{4, 8, 3, 4, 2};

  std::vector<std::vector<double>> xs;
  for (int i = 0; i < 100; ++i) xs.push_back(draws(rng, 4, 1.2));

  // Cell 2 weights are drawn once and replayed identically in both runs.
  std::mt19937_64 wrng(11);

  Tape ta;
  CellTensors a1 = make_cell(ta, s1, nullptr);
  std::mt19937_64 r1 = wrng;
  CellTensors a2 = make_cell(ta, s2, &r1, 0.6);
  DilatedState sa1(s1.state, s1.ctrl, s1.dilation);
  DilatedState sa2(s2.state, s2.ctrl, s2.dilation);

  Tape tb;
  std::mt19937_64 r2 = wrng;
  CellTensors b2 = make_cell(tb, s2, &r2, 0.6);
  DilatedState sb(s2.state, s2.ctrl, s2.dilation);

  for (const auto& xv : xs) {
    AttentionOutput att = adrnn_step(ta.constant({4}, xv), a1, a2, sa1, sa2);
    Tensor plain = drnn_step(tb.constant({4}, xv), b2, sb);
    CHECK(att.y.values() == plain.values());  // bitwise
    for (double w : att.weights.values()) CHECK(w == 1.0);
  }
}

TEST_CASE("attention weights are strictly positive for any parameters") {
  std::mt19937_64 rng(13);
  Tape tape;
  CellSizes s1{3, 7, 3, 4, 2};
  CellSizes s2{3, 7, 2, 4, 2};
  CellTensors p1 = make_cell(tape, s1, &rng, 2.0);
  CellTensors p2 = make_cell(tape, s2, &rng, 2.0);
  DilatedState st1(s1.state, s1.ctrl, s1.dilation);
  DilatedState st2(s2.state, s2.ctrl, s2.dilation);
  for (int i = 0; i < 50; ++i) {
    AttentionOutput out =
        adrnn_step(tape.constant({3}, draws(rng, 3, 2.0)), p1, p2, st1, st2);
    for (double w : out.weights.values()) CHECK(w > 0.0);
  }
}

TEST_CASE("gradients through chained attentive steps match finite differences") {
  std::mt19937_64 rng(17);
  CellSizes s1{3, 7, 3, 4, 2};
  CellSizes s2{3, 7, 2, 4, 2};

  // All weights frozen; differentiate with respect to the step inputs.
  std::mt19937_64 weights_rng(19);
  auto xv = draws(rng, 9, 1.0);
  auto f = [&](Tape& tape, const Tensor& packed) {
    std::mt19937_64 wr = weights_rng;
    CellTensors p1 = make_cell(tape, s1, &wr, 0.7);
    CellTensors p2 = make_cell(tape, s2, &wr, 0.7);
    DilatedState st1(s1.state, s1.ctrl, s1.dilation);
    DilatedState st2(s2.state, s2.ctrl, s2.dilation);
    Tensor last;
    for (int step = 0; step < 3; ++step)
      last = adrnn_step(slice(packed, 3 * step, 3), p1, p2, st1, st2).y;
    return mean(last);
  };
  CHECK(grad_check(f, {9}, xv, 1e-5) < 1e-5);

  // And with respect to one weight matrix of the attention cell.
  auto g = [&](Tape& tape, const Tensor& wf1) {
    std::mt19937_64 wr = weights_rng;
    CellTensors p1 = make_cell(tape, s1, &wr, 0.7);
    CellTensors p2 = make_cell(tape, s2, &wr, 0.7);
    p1.wf = wf1;
    DilatedState st1(s1.state, s1.ctrl, s1.dilation);
    DilatedState st2(s2.state, s2.ctrl, s2.dilation);
    Tensor last;
    for (int step = 0; step < 3; ++step)
      last = adrnn_step(tape.constant({3}, {0.4, -0.9, 1.1}), p1, p2, st1, st2).y;
    return mean(last);
  };
  std::mt19937_64 r(23);
  CHECK(grad_check(g, {s1.state, s1.input}, draws(r, s1.state * s1.input, 0.7),
                   1e-5) < 1e-5);
}

TEST_CASE("size violations are rejected") {
  Tape tape;
  std::mt19937_64 rng(29);

  CellSizes bad_split{3, 4, 3, 3, 2};  // 3 + 3 > 4
  CHECK_THROWS_AS(bad_split.validate(), ShapeError);
  CellSizes bad_dilation{3, 8, 2, 3, 1};
  CHECK_THROWS_AS(bad_dilation.validate(), ShapeError);

  CellSizes s{3, 8, 2, 3, 2};
  CellTensors p = make_cell(tape, s, &rng);
  DilatedState st(s.state, s.ctrl, s.dilation);
  CHECK_THROWS_AS(drnn_step(tape.zeros(4), p, st), ShapeError);

  // The attention cell must emit exactly one weight per input component.
  CellSizes mismatched{3, 8, 2, 3, 2};
  CellTensors p1 = make_cell(tape, mismatched, &rng);
  CellTensors p2 = make_cell(tape, s, &rng);
  DilatedState st1(mismatched.state, mismatched.ctrl, mismatched.dilation);
  DilatedState st2(s.state, s.ctrl, s.dilation);
  CHECK_THROWS_AS(adrnn_step(tape.zeros(3), p1, p2, st1, st2), ShapeError);
}

TEST_CASE("identical runs replay bitwise") {
  std::mt19937_64 seed_rng(31);
  auto run = [&]() {
    std::mt19937_64 rng = seed_rng;
    Tape tape;
    CellSizes s{3, 8, 2, 3, 3};
    CellTensors p = make_cell(tape, s, &rng, 0.9);
    DilatedState st(s.state, s.ctrl, s.dilation);
    std::vector<double> outs;
    for (int i = 0; i < 20; ++i) {
      Tensor y = drnn_step(tape.constant({3}, draws(rng, 3, 1.0)), p, st);
      outs.insert(outs.end(), y.values().begin(), y.values().end());
    }
    return outs;
  };
  CHECK(run() == run());
}

TEST_SUITE_END();
