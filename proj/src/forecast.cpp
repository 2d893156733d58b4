#include "esadrnn/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "esadrnn/calendar.hpp"
#include "esadrnn/errors.hpp"

namespace esadrnn {

DayForecast postprocess_step(const WalkStep& step, int64_t day_start_hour) {
  DayForecast day;
  day.start_hour = day_start_hour;
  const std::vector<double>& out = step.out.values();
  const std::vector<double>& shat = step.shat_out.values();
  for (int h = 0; h < kOutputHours; ++h) {
    std::array<double, 3> v = {
        postprocess(out[kOutLower + h], step.zbar, shat[h]),
        postprocess(out[kOutPoint + h], step.zbar, shat[h]),
        postprocess(out[kOutUpper + h], step.zbar, shat[h])};
    std::sort(v.begin(), v.end());
    day.lower[h] = v[0];
    day.point[h] = v[1];
    day.upper[h] = v[2];
  }
  return day;
}

ForecastResult forecast_series(const ModelParams& params, const LoadSeries& s,
                               int64_t from_hour, int days,
                               const TrainConfig& cfg) {
  if (days < 1) throw ConfigError("forecast needs at least one day");
  int64_t offset = from_hour - s.start_hour;
  if (offset % kOutputHours != 0)
    throw DataError("forecast start must be midnight-aligned with series " +
                    s.id);
  int warmup_steps = 7 * cfg.warmup_weeks_test;
  int64_t start = offset - walk_span(warmup_steps);
  if (start < 0)
    throw DataError("series " + s.id + " needs " +
                    std::to_string(walk_span(warmup_steps)) +
                    " hours of history before the forecast start, has " +
                    std::to_string(offset));
  int64_t observed = std::min<int64_t>(s.hours(), offset + days * 24L) - start;
  if (observed < 2 * kWeekHours)
    throw DataError("series " + s.id + " is too short to warm up a forecast");

  Tape tape;
  NetTensors net = place_on_tape(tape, params);
  SeriesWalk walk(tape, net, params, s.values.data() + start, observed,
                  s.start_hour + start);

  ForecastResult result;
  result.series_id = s.id;
  result.days.reserve(days);
  for (int d = 0; d < warmup_steps + days; ++d) {
    WalkStep step = walk.forward();
    DayForecast day =
        postprocess_step(step, s.start_hour + start + step.origin);
    if (d >= warmup_steps) result.days.push_back(day);
    if (step.origin + kOutputHours <= observed)
      walk.advance(step);
    else
      walk.advance(step, day.point.data());
  }
  result.alpha_trace = walk.alpha_trace();
  result.beta_trace = walk.beta_trace();
  return result;
}

ForecastResult combine_forecasts(const std::vector<ForecastResult>& members,
                                 const std::string& how) {
  if (members.empty()) throw ConfigError("nothing to combine");
  if (how != "mean" && how != "median")
    throw ConfigError("unknown combination rule: " + how);
  const ForecastResult& first = members.front();
  for (const ForecastResult& m : members) {
    if (m.series_id != first.series_id)
      throw DataError("cannot combine forecasts for different series");
    if (m.days.size() != first.days.size())
      throw DataError("cannot combine forecasts covering different days");
    for (size_t d = 0; d < m.days.size(); ++d)
      if (m.days[d].start_hour != first.days[d].start_hour)
        throw DataError("cannot combine forecasts covering different days");
  }

  auto combine = [&](std::vector<double>& v) {
    if (how == "mean") {
      double sum = 0.0;
      for (double x : v) sum += x;
      return sum / static_cast<double>(v.size());
    }
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };

  ForecastResult out;
  out.series_id = first.series_id;
  out.days.resize(first.days.size());
  std::vector<double> v(members.size());
  for (size_t d = 0; d < first.days.size(); ++d) {
    out.days[d].start_hour = first.days[d].start_hour;
    for (int h = 0; h < kOutputHours; ++h) {
      for (size_t m = 0; m < members.size(); ++m)
        v[m] = members[m].days[d].point[h];
      out.days[d].point[h] = combine(v);
      for (size_t m = 0; m < members.size(); ++m)
        v[m] = members[m].days[d].lower[h];
      out.days[d].lower[h] = combine(v);
      for (size_t m = 0; m < members.size(); ++m)
        v[m] = members[m].days[d].upper[h];
      out.days[d].upper[h] = combine(v);
    }
  }
  return out;
}

void write_forecast_csv(const std::string& path, const ForecastResult& f) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "series_id,timestamp,point,lower,upper\n";
  char buf[160];
  for (const DayForecast& day : f.days) {
    for (int h = 0; h < kOutputHours; ++h) {
      std::snprintf(buf, sizeof(buf), "%s,%s,%.17g,%.17g,%.17g\n",
                    f.series_id.c_str(),
                    format_timestamp(day.start_hour + h).c_str(), day.point[h],
                    day.lower[h], day.upper[h]);
      out << buf;
    }
  }
  if (!out) throw DataError("failed while writing " + path);
}

ForecastResult read_forecast_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) ||
      line != "series_id,timestamp,point,lower,upper")
    throw DataError(path + " is not a forecast file (bad header)");

  ForecastResult result;
  int64_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string id, stamp, p, lo, up;
    if (!std::getline(row, id, ',') || !std::getline(row, stamp, ',') ||
        !std::getline(row, p, ',') || !std::getline(row, lo, ',') ||
        !std::getline(row, up))
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected 5 comma-separated fields");
    if (result.series_id.empty())
      result.series_id = id;
    else if (id != result.series_id)
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": mixed series in one forecast file");
    int64_t hour = parse_timestamp(stamp);
    int h = static_cast<int>(((hour % 24) + 24) % 24);
    if (h == 0) {
      result.days.emplace_back();
      result.days.back().start_hour = hour;
    }
    if (result.days.empty() || result.days.back().start_hour + h != hour)
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": hours out of order, expected full days from 00:00");
    try {
      result.days.back().point[h] = std::stod(p);
      result.days.back().lower[h] = std::stod(lo);
      result.days.back().upper[h] = std::stod(up);
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": unparseable number");
    }
  }
  if (result.days.empty()) throw DataError(path + " holds no forecast rows");
  return result;
}

}  // namespace esadrnn
