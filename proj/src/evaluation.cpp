#include "esadrnn/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "esadrnn/calendar.hpp"
#include "esadrnn/errors.hpp"

namespace esadrnn {

namespace {

// Linear interpolation between order statistics: p = 0.5 is the usual
// even/odd median.
double quantile_sorted(const std::vector<double>& sorted, double p) {
  double pos = p * static_cast<double>(sorted.size() - 1);
  size_t lo = static_cast<size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

PointMetrics point_metrics(const std::vector<double>& actual,
                           const std::vector<double>& predicted) {
  if (actual.size() != predicted.size())
    throw ShapeError("metrics need equally many actuals and predictions");
  if (actual.empty()) throw ShapeError("metrics need at least one hour");

  size_t n = actual.size();
  std::vector<double> pe(n), ape(n);
  double se = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (actual[i] == 0.0)
      throw DataError("percentage error undefined at zero actual, hour " +
                      std::to_string(i));
    pe[i] = 100.0 * (actual[i] - predicted[i]) / actual[i];
    ape[i] = std::fabs(pe[i]);
    se += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
  }

  PointMetrics m;
  m.hours = static_cast<int64_t>(n);
  double sum_pe = 0.0, sum_ape = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sum_pe += pe[i];
    sum_ape += ape[i];
  }
  m.mape = sum_ape / static_cast<double>(n);
  m.mpe = sum_pe / static_cast<double>(n);
  m.rmse = std::sqrt(se / static_cast<double>(n));
  double var = 0.0;
  for (size_t i = 0; i < n; ++i) var += (pe[i] - m.mpe) * (pe[i] - m.mpe);
  m.stdpe = std::sqrt(var / static_cast<double>(n));
  std::sort(ape.begin(), ape.end());
  m.mdape = quantile_sorted(ape, 0.5);
  m.iqrape = quantile_sorted(ape, 0.75) - quantile_sorted(ape, 0.25);
  return m;
}

CoverageMetrics pi_coverage(const std::vector<double>& actual,
                            const std::vector<double>& lower,
                            const std::vector<double>& upper) {
  if (actual.size() != lower.size() || actual.size() != upper.size())
    throw ShapeError("coverage needs equally many actuals and bounds");
  if (actual.empty()) throw ShapeError("coverage needs at least one hour");
  int64_t below = 0, above = 0;
  for (size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] < lower[i])
      ++below;
    else if (actual[i] > upper[i])
      ++above;
  }
  CoverageMetrics c;
  c.hours = static_cast<int64_t>(actual.size());
  double n = static_cast<double>(c.hours);
  c.below = 100.0 * static_cast<double>(below) / n;
  c.above = 100.0 * static_cast<double>(above) / n;
  c.inside = 100.0 - c.below - c.above;
  return c;
}

std::vector<double> naive_forecast(const LoadSeries& s, int64_t from_hour,
                                   int days) {
  int64_t offset = from_hour - s.start_hour;
  int64_t hours = static_cast<int64_t>(days) * kOutputHours;
  if (offset < kWeekHours)
    throw DataError("naive forecast needs a week of history in series " +
                    s.id);
  if (offset + hours > s.hours())
    throw DataError("naive forecast target extends past series " + s.id);
  std::vector<double> out(hours);
  for (int64_t t = 0; t < hours; ++t)
    out[t] = s.values[offset + t - kWeekHours];
  return out;
}

std::vector<double> actual_slice(const LoadSeries& s, int64_t from_hour,
                                 int64_t hours) {
  int64_t offset = from_hour - s.start_hour;
  if (offset < 0 || offset + hours > s.hours())
    throw DataError("series " + s.id + " does not cover the requested hours");
  return std::vector<double>(s.values.begin() + offset,
                             s.values.begin() + offset + hours);
}

EvalReport evaluate_forecast(const ForecastResult& f, const LoadSeries& s) {
  if (f.days.empty()) throw DataError("forecast holds no days");
  std::vector<double> actual, point, lower, upper;
  for (const DayForecast& day : f.days) {
    std::vector<double> z = actual_slice(s, day.start_hour, kOutputHours);
    actual.insert(actual.end(), z.begin(), z.end());
    point.insert(point.end(), day.point.begin(), day.point.end());
    lower.insert(lower.end(), day.lower.begin(), day.lower.end());
    upper.insert(upper.end(), day.upper.begin(), day.upper.end());
  }
  EvalReport report;
  report.point = point_metrics(actual, point);
  report.coverage = pi_coverage(actual, lower, upper);
  return report;
}

std::vector<LoadSeries> synth_generate(const SynthSpec& spec) {
  if (spec.series < 1) throw ConfigError("need at least one synthetic series");
  if (spec.days < 28) throw ConfigError("synthetic series need 28 days or more");
  if (spec.noise < 0.0) throw ConfigError("noise must be nonnegative");

  constexpr double tau = 2.0 * std::numbers::pi;
  int64_t start = hours_from_civil({2015, 1, 5}, 0);  // a Monday
  std::mt19937_64 rng(spec.seed);
  std::vector<LoadSeries> out(spec.series);
  for (int k = 0; k < spec.series; ++k) {
    double base = std::uniform_real_distribution<double>(500.0, 2000.0)(rng);
    double amp_year = std::uniform_real_distribution<double>(0.1, 0.3)(rng);
    double peak_doy = std::uniform_real_distribution<double>(0.0, 365.0)(rng);
    double dip_weekend =
        std::uniform_real_distribution<double>(0.7, 0.95)(rng);
    double amp_day = std::uniform_real_distribution<double>(0.2, 0.4)(rng);
    double peak_hour = std::uniform_real_distribution<double>(8.0, 20.0)(rng);
    std::normal_distribution<double> jitter(0.0, spec.noise);

    LoadSeries& s = out[k];
    s.id = "S" + std::to_string(k + 1);
    s.start_hour = start;
    s.values.resize(static_cast<size_t>(spec.days) * 24);
    for (int64_t t = 0; t < static_cast<int64_t>(s.values.size()); ++t) {
      int64_t hour = start + t;
      double doy = static_cast<double>((t / 24) % 365);
      double yearly =
          1.0 + amp_year * std::cos(tau * (doy - peak_doy) / 365.0);
      int dow = weekday_index(hour);
      double weekly = dow >= 5 ? dip_weekend : 1.0;
      double daily = 1.0 + amp_day * std::cos(tau * (hour_of_day(hour) -
                                                     peak_hour) /
                                              24.0);
      double z = base * yearly * weekly * daily *
                 (1.0 + (spec.noise > 0.0 ? jitter(rng) : 0.0));
      s.values[t] = std::max(z, 1.0);
    }
  }
  return out;
}

}  // namespace esadrnn
