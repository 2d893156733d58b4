#include "esadrnn/walk.hpp"

#include <string>

#include "esadrnn/errors.hpp"
#include "esadrnn/preprocessing.hpp"

namespace esadrnn {

namespace {

EsInit checked_init(const double* z, int64_t hours_available) {
  if (hours_available < 2 * kWeekHours)
    throw DataError("a walk needs at least two weeks of data, got " +
                    std::to_string(hours_available) + " hours");
  return es_init_from_prefix(z, 2 * kWeekHours);
}

}  // namespace

int64_t walk_span(int steps) {
  return kInputHours + static_cast<int64_t>(kOutputHours) * steps;
}

SeriesWalk::SeriesWalk(Tape& tape, const NetTensors& net,
                       const ModelParams& params, const double* z,
                       int64_t hours_available, int64_t start_hour)
    : tape_(&tape),
      net_(&net),
      buf_(z, z + hours_available),
      observed_(hours_available),
      start_hour_(start_hour),
      es_(tape, checked_init(z, hours_available), net.alpha_logit,
          net.beta_logit, 0),
      state_(params) {
  for (int h = 0; h < kInputHours; ++h) es_.update_hourly(buf_[h]);
}

int SeriesWalk::max_steps() const {
  return static_cast<int>((observed_ - kInputHours) / kOutputHours);
}

WalkStep SeriesWalk::forward() {
  int64_t c = es_.cursor();
  double sum = 0.0;
  for (int64_t h = c - kInputHours; h < c; ++h) sum += buf_[h];
  double zbar = sum / kInputHours;
  if (!(zbar > 0.0))
    throw NumericError("trailing week mean is not positive at offset " +
                       std::to_string(c));

  Tensor shat_in = es_.seasonal_window(c - kInputHours, kInputHours);
  Tensor x_in = squash_window(*tape_, buf_.data() + (c - kInputHours),
                              kInputHours, zbar, shat_in);
  Tensor shat_out = es_.seasonal_window(c, kOutputHours);
  CalendarFeatures cal = calendar_features(start_hour_ + c);
  Tensor raw = assemble_input(*tape_, x_in, shat_out, zbar, cal);
  NetStepOutput net_out = forward_step(raw, *net_, state_);
  return {net_out.out, shat_out, zbar, c};
}

void SeriesWalk::advance(const WalkStep& step) {
  if (step.origin + kOutputHours > observed_)
    throw DataError("observations run out at offset " +
                    std::to_string(step.origin) + ", provide the day instead");
  advance(step, buf_.data() + step.origin);
}

void SeriesWalk::advance(const WalkStep& step, const double* day) {
  if (step.origin != es_.cursor())
    throw ShapeError("walk steps must be advanced in order, expected offset " +
                     std::to_string(es_.cursor()) + " got " +
                     std::to_string(step.origin));
  if (step.origin + kOutputHours > static_cast<int64_t>(buf_.size()))
    buf_.resize(step.origin + kOutputHours);
  for (int i = 0; i < kOutputHours; ++i) buf_[step.origin + i] = day[i];
  es_.update_coeffs(slice(step.out, kOutDalpha, 1),
                    slice(step.out, kOutDbeta, 1));
  alpha_trace_.push_back(es_.alpha().value());
  beta_trace_.push_back(es_.beta().value());
  for (int i = 0; i < kOutputHours; ++i)
    es_.update_hourly(buf_[step.origin + i]);
}

int64_t SeriesWalk::cursor() const { return es_.cursor(); }

}  // namespace esadrnn
