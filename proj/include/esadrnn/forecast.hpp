#pragma once

// Day-ahead forecasting with a trained model: a warm-up walk over the
// weeks before the forecast start, then one step per requested day.
// Days still covered by observations are consumed as they come; beyond
// them the walk feeds on its own point forecasts.

#include <array>
#include <string>
#include <vector>

#include "esadrnn/training.hpp"

namespace esadrnn {

struct DayForecast {
  int64_t start_hour = 0;  // absolute hour of the day's first value
  std::array<double, kOutputHours> point{};
  std::array<double, kOutputHours> lower{};
  std::array<double, kOutputHours> upper{};
};

struct ForecastResult {
  std::string series_id;
  std::vector<DayForecast> days;
  // Smoothing coefficients in effect for each advanced day, warm-up
  // included; empty for combined ensemble results.
  std::vector<double> alpha_trace;
  std::vector<double> beta_trace;
};

// Maps one step's outputs back to load space and repairs any quantile
// crossing by sorting each hour's three values.
DayForecast postprocess_step(const WalkStep& step, int64_t day_start_hour);

// Forecasts `days` consecutive days starting at from_hour, which must
// be midnight-aligned relative to the series start. The series must
// cover the warm-up weeks plus the priming week before from_hour.
ForecastResult forecast_series(const ModelParams& params, const LoadSeries& s,
                               int64_t from_hour, int days,
                               const TrainConfig& cfg);

// Per-hour mean or median across members, which must agree on series
// and days.
ForecastResult combine_forecasts(const std::vector<ForecastResult>& members,
                                 const std::string& how);

// One row per hour: series_id, timestamp, point, lower, upper.
void write_forecast_csv(const std::string& path, const ForecastResult& f);
ForecastResult read_forecast_csv(const std::string& path);

}  // namespace esadrnn
