#include "esadrnn/training.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include "esadrnn/errors.hpp"

namespace esadrnn {

double pinball(double z, double zhat, double q) {
  double diff = z - zhat;
  return diff >= 0.0 ? q * diff : (q - 1.0) * diff;
}

namespace {

// mean_i(w_i * (z'_i - zhat'_i)) with w_i frozen to the pinball branch
// of the current values, which is exactly the q-side subgradient.
Tensor quantile_term(Tape& tape, const std::vector<double>& zprime,
                     const Tensor& zhat_q, double q) {
  Tensor diff = sub(tape.constant({kOutputHours}, zprime), zhat_q);
  std::vector<double> w(kOutputHours);
  const std::vector<double>& dv = diff.values();
  for (int i = 0; i < kOutputHours; ++i) w[i] = dv[i] >= 0.0 ? q : q - 1.0;
  return mean(mul(tape.constant({kOutputHours}, w), diff));
}

}  // namespace

Tensor step_loss(Tape& tape, const WalkStep& step, const double* day,
                 const TrainConfig& cfg) {
  std::vector<double> zprime(kOutputHours);
  for (int i = 0; i < kOutputHours; ++i) zprime[i] = day[i] / step.zbar;
  auto zhat = [&](int offset) {
    return mul(exp(slice(step.out, offset, kOutputHours)), step.shat_out);
  };
  Tensor center = quantile_term(tape, zprime, zhat(kOutPoint), cfg.q_center);
  Tensor lower = quantile_term(tape, zprime, zhat(kOutLower), cfg.q_lower);
  Tensor upper = quantile_term(tape, zprime, zhat(kOutUpper), cfg.q_upper);
  return add(center, scale(add(lower, upper), cfg.gamma));
}

void adam_update(ParamStore& store, AdamState& state, double lr) {
  state.step += 1;
  double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (size_t p = 0; p < store.count(); ++p) {
    Parameter& par = store[p];
    for (int i = 0; i < par.size(); ++i) {
      double g = par.grad[i];
      par.m[i] = state.beta1 * par.m[i] + (1.0 - state.beta1) * g;
      par.v[i] = state.beta2 * par.v[i] + (1.0 - state.beta2) * g * g;
      double mhat = par.m[i] / c1;
      double vhat = par.v[i] / c2;
      par.value[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

namespace {

void clip_grads(ParamStore& store, double ceiling) {
  if (ceiling <= 0.0) return;
  double sq = 0.0;
  for (size_t p = 0; p < store.count(); ++p)
    for (double g : store[p].grad) sq += g * g;
  double norm = std::sqrt(sq);
  if (norm <= ceiling) return;
  double f = ceiling / norm;
  for (size_t p = 0; p < store.count(); ++p)
    for (double& g : store[p].grad) g *= f;
}

void log_line(const TrainHooks& hooks, const std::string& msg) {
  if (hooks.on_log) hooks.on_log(msg);
}

}  // namespace

TrainResult train(ParamStore& store, const ModelParams& params,
                  const std::vector<LoadSeries>& data, const TrainConfig& cfg,
                  const TrainHooks& hooks) {
  cfg.validate();
  int warmup_steps = 7 * cfg.warmup_weeks_train;
  int total_steps = warmup_steps + cfg.steps_per_batch;
  int64_t span = walk_span(total_steps);

  std::vector<const LoadSeries*> usable;
  for (const LoadSeries& s : data) {
    if (s.hours() >= span)
      usable.push_back(&s);
    else
      log_line(hooks, "series " + s.id + " is too short for training (" +
                          std::to_string(s.hours()) + " < " +
                          std::to_string(span) + " hours), skipping");
  }
  if (usable.empty())
    throw DataError("no series long enough for a training walk of " +
                    std::to_string(span) + " hours");

  std::mt19937_64 rng(cfg.seed);
  AdamState adam;
  TrainResult result;
  result.loss_trace.reserve(
      static_cast<size_t>(cfg.epochs) * cfg.updates_per_epoch);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    int batch = cfg.batch_size_for_epoch(epoch);
    double lr = cfg.lr_for_epoch(epoch);
    for (int update = 1; update <= cfg.updates_per_epoch; ++update) {
      Tape tape;
      NetTensors net = place_on_tape(tape, params);
      std::vector<Tensor> terms;
      terms.reserve(static_cast<size_t>(batch) * cfg.steps_per_batch);
      for (int b = 0; b < batch; ++b) {
        const LoadSeries& s =
            *usable[std::uniform_int_distribution<size_t>(
                0, usable.size() - 1)(rng)];
        int64_t days_free = (s.hours() - span) / kOutputHours;
        int64_t start =
            kOutputHours *
            std::uniform_int_distribution<int64_t>(0, days_free)(rng);
        SeriesWalk walk(tape, net, params, s.values.data() + start,
                        span, s.start_hour + start);
        for (int stepi = 0; stepi < total_steps; ++stepi) {
          WalkStep step = walk.forward();
          if (stepi >= warmup_steps)
            terms.push_back(
                step_loss(tape, step, s.values.data() + start + step.origin,
                          cfg));
          walk.advance(step);
        }
      }
      Tensor total = terms.front();
      for (size_t i = 1; i < terms.size(); ++i) total = add(total, terms[i]);
      Tensor loss = scale(total, 1.0 / static_cast<double>(terms.size()));
      if (!std::isfinite(loss.value()))
        throw NumericError("batch loss is not finite at epoch " +
                           std::to_string(epoch) + " update " +
                           std::to_string(update));
      store.zero_grads();
      tape.backward(loss);
      clip_grads(store, cfg.grad_clip);
      adam_update(store, adam, lr);
      result.loss_trace.push_back(loss.value());
      if (hooks.on_update) hooks.on_update(epoch, update, loss.value(), lr);
    }
  }
  return result;
}

std::vector<std::unique_ptr<EnsembleMember>> ensemble_train(
    const std::vector<LoadSeries>& data, const TrainConfig& cfg, int members,
    const TrainHooks& hooks) {
  if (members < 1) throw ConfigError("ensemble needs at least one member");
  std::vector<std::unique_ptr<EnsembleMember>> out(members);
  std::vector<std::exception_ptr> errors(members);
  std::mutex mu;
  std::vector<std::thread> threads;
  threads.reserve(members);
  for (int i = 0; i < members; ++i) {
    threads.emplace_back([&, i]() {
      try {
        auto member = std::make_unique<EnsembleMember>();
        member->cfg = cfg;
        member->cfg.seed = cfg.seed + static_cast<uint64_t>(i);
        member->params = create_model_params(member->store, member->cfg);
        TrainHooks wrapped;
        if (hooks.on_update)
          wrapped.on_update = [&](int e, int u, double l, double r) {
            std::lock_guard<std::mutex> lock(mu);
            hooks.on_update(e, u, l, r);
          };
        if (hooks.on_log)
          wrapped.on_log = [&, i](const std::string& msg) {
            std::lock_guard<std::mutex> lock(mu);
            hooks.on_log("[member " + std::to_string(i) + "] " + msg);
          };
        member->result = train(member->store, member->params, data,
                               member->cfg, wrapped);
        out[i] = std::move(member);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace esadrnn
