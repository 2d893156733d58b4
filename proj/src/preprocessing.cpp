#include "esadrnn/preprocessing.hpp"

#include <cmath>
#include <string>

#include "esadrnn/errors.hpp"

namespace esadrnn {

Window make_windows(int t, int64_t series_len) {
  if (t < 1) throw DataError("make_windows: step index must be >= 1");
  Window w;
  w.in_begin = static_cast<int64_t>(24) * (t - 1);
  w.out_begin = w.in_begin + kInputHours;
  if (w.out_begin + kOutputHours > series_len)
    throw DataError("make_windows: step " + std::to_string(t) +
                    " runs past the end of a series of length " +
                    std::to_string(series_len));
  return w;
}

double squash(double z, double zbar, double shat) {
  return std::log(z / (zbar * shat));
}

double postprocess(double xhat, double zbar, double shat) {
  return std::exp(xhat) * zbar * shat;
}

Tensor squash_window(Tape& tape, const double* z, int n, double zbar,
                     const Tensor& shat) {
  if (shat.shape() != Shape{n})
    throw ShapeError("squash_window: seasonal factors " +
                     shape_str(shat.shape()) + " do not cover " +
                     std::to_string(n) + " hours");
  std::vector<double> scaled(n);
  for (int i = 0; i < n; ++i) scaled[i] = z[i] / zbar;
  return log(div(tape.constant({n}, std::move(scaled)), shat));
}

std::vector<double> CalendarFeatures::onehot() const {
  std::vector<double> v(kCalendarLen, 0.0);
  v[dow] = 1.0;
  v[7 + dom] = 1.0;
  v[7 + 31 + woy] = 1.0;
  return v;
}

CalendarFeatures calendar_features(int64_t hour) {
  CivilDate date = civil_from_hour(hour);
  CalendarFeatures f;
  f.dow = weekday_index(hour);
  f.dom = date.day - 1;
  int week = iso_week(date);
  f.woy = week > 52 ? 51 : week - 1;
  return f;
}

std::vector<double> assemble_input(const std::array<double, kInputHours>& x_in,
                                   const std::array<double, kOutputHours>& shat_out,
                                   double zbar, const CalendarFeatures& cal) {
  std::vector<double> v;
  v.reserve(kRawInputLen);
  v.insert(v.end(), x_in.begin(), x_in.end());
  for (double s : shat_out) v.push_back(s - 1.0);
  v.push_back(std::log10(zbar));
  std::vector<double> oh = cal.onehot();
  v.insert(v.end(), oh.begin(), oh.end());
  return v;
}

Tensor assemble_input(Tape& tape, const Tensor& x_in, const Tensor& shat_out,
                      double zbar, const CalendarFeatures& cal) {
  if (x_in.shape() != Shape{kInputHours} ||
      shat_out.shape() != Shape{kOutputHours})
    throw ShapeError("assemble_input: expected " + shape_str({kInputHours}) +
                     " and " + shape_str({kOutputHours}) + ", got " +
                     shape_str(x_in.shape()) + " and " +
                     shape_str(shat_out.shape()));
  Tensor level_feat = tape.scalar(std::log10(zbar));
  Tensor cal_feat = tape.constant({kCalendarLen}, cal.onehot());
  return concat({x_in, add_const(shat_out, -1.0), level_feat, cal_feat});
}

}  // namespace esadrnn
