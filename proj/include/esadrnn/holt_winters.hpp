#pragma once

// Seasonal exponential smoothing with a weekly (168 hour) cycle and no
// trend. The recursion runs on the autodiff tape: level and seasonal
// factors are tensors, and the smoothing coefficients are sigmoids of a
// shared base logit plus per-step corrections, so gradients flow from
// any downstream loss back into both the logits and the corrections.
//
//   l_tau     = alpha * z_tau / s_tau + (1 - alpha) * l_{tau-1}
//   s_tau+168 = beta  * z_tau / l_tau + (1 - beta)  * s_tau
//
// The seasonal update reads the level that the same hour just produced.
// Factors form a weekly ring: processing hour tau writes the factor for
// tau + 168, so at any point factors up to one week ahead exist, which
// is exactly what a day-ahead forecast needs.

#include <array>
#include <cstdint>
#include <vector>

#include "esadrnn/tensor.hpp"

namespace esadrnn {

// Level and seasonal starting values estimated from a series prefix of
// at least two full weeks: the level is the first week's mean, factor i
// is the load at weekly phase i divided by its week's mean, averaged
// over the complete weeks available and renormalized to average one.
struct EsInit {
  double level = 0.0;
  std::array<double, 168> seasonal{};
};

EsInit es_init_from_prefix(const double* z, int64_t n);

class EsState {
 public:
  // Places the initial level and factors on the tape as constants. The
  // logits may be parameter leaves (training) or constants. start_hour
  // is the series offset of the first hour this state will process.
  EsState(Tape& tape, const EsInit& init, const Tensor& alpha_logit,
          const Tensor& beta_logit, int64_t start_hour);

  // One hour of smoothing with the current coefficients. z is the
  // observed load of the hour at the cursor.
  void update_hourly(double z);

  // Applies the network's corrections: alpha = sigmoid(logit + dalpha),
  // in effect from the next update_hourly onward.
  void update_coeffs(const Tensor& dalpha, const Tensor& dbeta);
  void update_coeffs(double dalpha, double dbeta);

  // Seasonal factors for [from_hour, from_hour + n). Any hour from the
  // walk start up to one week past the cursor is available.
  Tensor seasonal_window(int64_t from_hour, int n) const;
  Tensor seasonal_forecast(int64_t from_hour, int horizon) const;

  const Tensor& level() const { return level_; }
  const Tensor& alpha() const { return alpha_; }
  const Tensor& beta() const { return beta_; }
  int64_t cursor() const { return cursor_; }
  int64_t start_hour() const { return start_; }

 private:
  Tape* tape_;
  Tensor alpha_logit_, beta_logit_;
  Tensor alpha_, beta_;
  Tensor level_;
  std::vector<Tensor> seasonal_;  // index: hour - start_
  int64_t start_;
  int64_t cursor_;
};

}  // namespace esadrnn
