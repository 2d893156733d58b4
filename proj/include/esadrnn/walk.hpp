#pragma once

// One pass of the model along one series segment. A walk estimates the
// initial smoothing state from its first two weeks, primes the level
// and factors over the first week with uncorrected coefficients, and
// then alternates day-ahead steps: the network reads the squashed
// trailing week and emits forecasts plus coefficient corrections, and
// the corrected smoothing consumes the next 24 observed hours.
// Training, validation warm-up and forecasting all drive this same
// machinery, differing only in which steps contribute loss and where
// the consumed "observations" come from.

#include <cstdint>
#include <vector>

#include "esadrnn/holt_winters.hpp"
#include "esadrnn/network.hpp"

namespace esadrnn {

// Hours of series data a walk of the given number of daily steps reads:
// one priming week plus a day per step. The two-week initialization
// window overlaps the first priming week and the first seven steps.
int64_t walk_span(int steps);

struct WalkStep {
  Tensor out;       // the raw head outputs {74}
  Tensor shat_out;  // seasonal factors of the target day {24}
  double zbar;      // mean load of the trailing week
  int64_t origin;   // offset of the first target hour from the walk start
};

class SeriesWalk {
 public:
  // Copies the observed hours starting at z. start_hour is the absolute
  // hour of z[0], used for calendar features, so it must honestly
  // locate the segment in civil time.
  SeriesWalk(Tape& tape, const NetTensors& net, const ModelParams& params,
             const double* z, int64_t hours_available, int64_t start_hour);

  // Daily steps the observations cover, counting each step's target day.
  int max_steps() const;

  // One network pass at the cursor. Needs only history, so the walk can
  // keep stepping past the observations once substituted days extend
  // its buffer.
  WalkStep forward();

  // Applies the step's coefficient corrections, then smooths through
  // the step's target day. The default consumes the observed day; the
  // pointer overload substitutes other values, e.g. the model's own
  // postprocessed forecasts when observations have run out, and those
  // values become the history that later steps read.
  void advance(const WalkStep& step);
  void advance(const WalkStep& step, const double* day);

  // Offset of the next target hour from the walk start.
  int64_t cursor() const;

  const EsState& es() const { return es_; }

  // Coefficients in effect for each advanced day, oldest first.
  const std::vector<double>& alpha_trace() const { return alpha_trace_; }
  const std::vector<double>& beta_trace() const { return beta_trace_; }

 private:
  Tape* tape_;
  const NetTensors* net_;
  std::vector<double> buf_;  // observed hours, then substituted days
  int64_t observed_;
  int64_t start_hour_;
  EsState es_;
  NetState state_;
  std::vector<double> alpha_trace_;
  std::vector<double> beta_trace_;
};

}  // namespace esadrnn
