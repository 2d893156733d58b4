#pragma once

// Accuracy metrics over percentage errors, interval coverage, the
// week-ago naive baseline and a synthetic load generator for
// self-contained end-to-end checks.

#include <cstdint>
#include <string>
#include <vector>

#include "esadrnn/data.hpp"
#include "esadrnn/forecast.hpp"

namespace esadrnn {

// All derived from PE = 100 (z - zhat) / z, so actuals must be nonzero.
// The spread measures are population style, and the median and
// interquartile range interpolate linearly between order statistics.
struct PointMetrics {
  double mape = 0.0;    // mean |PE|
  double mdape = 0.0;   // median |PE|
  double iqrape = 0.0;  // interquartile range of |PE|
  double rmse = 0.0;    // root mean squared error in load units
  double mpe = 0.0;     // mean PE, the signed bias
  double stdpe = 0.0;   // population standard deviation of PE
  int64_t hours = 0;
};

PointMetrics point_metrics(const std::vector<double>& actual,
                           const std::vector<double>& predicted);

// Percent of hours on or inside the interval, strictly below the lower
// bound and strictly above the upper bound. The three always sum to 100.
struct CoverageMetrics {
  double inside = 0.0;
  double below = 0.0;
  double above = 0.0;
  int64_t hours = 0;
};

CoverageMetrics pi_coverage(const std::vector<double>& actual,
                            const std::vector<double>& lower,
                            const std::vector<double>& upper);

// Each hour repeats the observed load of one week earlier.
std::vector<double> naive_forecast(const LoadSeries& s, int64_t from_hour,
                                   int days);

// The actual loads for [from_hour, from_hour + hours).
std::vector<double> actual_slice(const LoadSeries& s, int64_t from_hour,
                                 int64_t hours);

struct EvalReport {
  PointMetrics point;
  CoverageMetrics coverage;
};

// Joins a forecast with the observed series by civil hour.
EvalReport evaluate_forecast(const ForecastResult& f, const LoadSeries& s);

// Sinusoidal load shapes with yearly, weekly and daily cycles and
// multiplicative Gaussian noise, one independent profile per series.
// Series start on Monday 2015-01-05 00:00.
struct SynthSpec {
  int series = 4;
  int days = 730;
  uint64_t seed = 7;
  double noise = 0.02;
};

std::vector<LoadSeries> synth_generate(const SynthSpec& spec);

}  // namespace esadrnn
