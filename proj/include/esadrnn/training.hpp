#pragma once

// Cross-series training. Every update builds one fresh tape holding a
// small batch of walks over randomly chosen series segments, sums the
// composite pinball loss of the post-warm-up steps, backpropagates and
// applies one Adam step. The loss lives in normalized space: actuals
// are divided by the window mean, and the squashed network outputs are
// mapped back through the seasonal factors only.

#include <functional>
#include <memory>
#include <vector>

#include "esadrnn/data.hpp"
#include "esadrnn/walk.hpp"

namespace esadrnn {

// max(q (z - zhat), (q - 1) (z - zhat)); ties take the q branch.
double pinball(double z, double zhat, double q);

// The composite loss of one daily step against the observed target day:
// the central quantile plus gamma times the two interval quantiles,
// each averaged over the 24 hours.
Tensor step_loss(Tape& tape, const WalkStep& step, const double* day,
                 const TrainConfig& cfg);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int64_t step = 0;
};

// One bias-corrected moment update over every parameter in the store,
// consuming the accumulated gradients.
void adam_update(ParamStore& store, AdamState& state, double lr);

struct TrainHooks {
  // epoch, update within epoch, batch loss, learning rate
  std::function<void(int, int, double, double)> on_update;
  std::function<void(const std::string&)> on_log;
};

struct TrainResult {
  std::vector<double> loss_trace;  // one batch loss per update
};

// Runs the full epoch schedule. Series too short for a walk are warned
// about once and skipped; if none remain a DataError is raised. A
// non-finite batch loss aborts with NumericError.
TrainResult train(ParamStore& store, const ModelParams& params,
                  const std::vector<LoadSeries>& data, const TrainConfig& cfg,
                  const TrainHooks& hooks = {});

struct EnsembleMember {
  TrainConfig cfg;
  ParamStore store;
  ModelParams params;
  TrainResult result;
};

// Trains `members` models concurrently, member i reseeded to seed + i.
// Hooks are serialized through a mutex, with the member index prefixed
// to log lines.
std::vector<std::unique_ptr<EnsembleMember>> ensemble_train(
    const std::vector<LoadSeries>& data, const TrainConfig& cfg, int members,
    const TrainHooks& hooks = {});

}  // namespace esadrnn
