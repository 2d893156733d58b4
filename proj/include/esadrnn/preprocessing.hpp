#pragma once

// Windowing, deseasonalized log transform and calendar features that
// turn raw hourly loads into network inputs, plus the inverse transform
// that turns network outputs back into loads.

#include <array>
#include <cstdint>
#include <vector>

#include "esadrnn/calendar.hpp"
#include "esadrnn/tensor.hpp"

namespace esadrnn {

inline constexpr int kInputHours = 168;   // one week of history per step
inline constexpr int kOutputHours = 24;   // day-ahead horizon
inline constexpr int kWeekHours = 168;
inline constexpr int kCoreInputLen = kInputHours + kOutputHours + 1;  // 193
inline constexpr int kCalendarLen = 7 + 31 + 52;                      // 90
inline constexpr int kRawInputLen = kCoreInputLen + kCalendarLen;     // 283

// Hour ranges of one daily step, 0-based offsets into a series. Step 1
// reads hours [0,168) and predicts [168,192); each following step is
// shifted one day forward.
struct Window {
  int64_t in_begin;
  int64_t out_begin;
};

Window make_windows(int t, int64_t series_len);

// x = ln(z / (zbar * shat)). All three must be positive.
double squash(double z, double zbar, double shat);

// Inverse: zhat = exp(xhat) * zbar * shat.
double postprocess(double xhat, double zbar, double shat);

// On-tape squash of a window of raw loads against its seasonal factors:
// component i is ln(z[i] / (zbar * shat[i])), with the gradient flowing
// into shat.
Tensor squash_window(Tape& tape, const double* z, int n, double zbar,
                     const Tensor& shat);

struct CalendarFeatures {
  int dow;  // 0 = Monday .. 6 = Sunday
  int dom;  // 0 .. 30, day of month - 1
  int woy;  // 0 .. 51, ISO week - 1 with week 53 folded into the last slot

  // The three one-hot blocks laid out back to back, 90 components.
  std::vector<double> onehot() const;
};

// Features for the civil day containing the given hour.
CalendarFeatures calendar_features(int64_t hour);

// The flat 283-component input vector: squashed input window (168),
// output-window seasonal factors minus one (24), log10 of the window
// mean (1) and the calendar one-hots (90).
std::vector<double> assemble_input(const std::array<double, kInputHours>& x_in,
                                   const std::array<double, kOutputHours>& shat_out,
                                   double zbar, const CalendarFeatures& cal);

// Same layout built on the tape from live tensors.
Tensor assemble_input(Tape& tape, const Tensor& x_in, const Tensor& shat_out,
                      double zbar, const CalendarFeatures& cal);

}  // namespace esadrnn
