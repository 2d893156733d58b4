#include <doctest.h>

#include <cmath>
#include <ctime>
#include <random>

#include "esadrnn/calendar.hpp"
#include "esadrnn/errors.hpp"
#include "esadrnn/preprocessing.hpp"

using namespace esadrnn;

namespace {

// Independent ISO week oracle via the C library's %V formatter.
int strftime_iso_week(int y, int m, int d) {
  std::tm tm{};
  tm.tm_year = y - 1900;
  tm.tm_mon = m - 1;
  tm.tm_mday = d;
  tm.tm_hour = 12;
  std::time_t t = timegm(&tm);
  std::tm out{};
  gmtime_r(&t, &out);
  char buf[8];
  std::strftime(buf, sizeof(buf), "%V", &out);
  return std::atoi(buf);
}

}  // namespace

TEST_SUITE_BEGIN("preprocessing");

TEST_CASE("daily windows shift by 24 hours") {
  Window w1 = make_windows(1, 400);
  CHECK(w1.in_begin == 0);
  CHECK(w1.out_begin == 168);

  Window w2 = make_windows(2, 400);
  CHECK(w2.in_begin == 24);
  CHECK(w2.out_begin == 192);

  for (int t = 1; t < 10; ++t) {
    Window w = make_windows(t, 10000);
    CHECK(w.out_begin - w.in_begin == kInputHours);
    CHECK(w.in_begin == 24 * (t - 1));
  }

  CHECK_NOTHROW(make_windows(1, 192));
  CHECK_THROWS_AS(make_windows(1, 191), DataError);
  CHECK_THROWS_AS(make_windows(2, 200), DataError);
  CHECK_THROWS_AS(make_windows(0, 1000), DataError);
}

TEST_CASE("squash of a load equal to its seasonal-scaled mean is zero") {
  CHECK(std::fabs(squash(220.0, 200.0, 1.1)) < 1e-15);
  CHECK(squash(300.0, 300.0, 1.0) == 0.0);
}

TEST_CASE("postprocess inverts squash") {
  CHECK(postprocess(1.0, 100.0, 1.1) ==
        doctest::Approx(299.011001130495).epsilon(1e-12));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> load(10.0, 50000.0);
  std::uniform_real_distribution<double> season(0.5, 1.6);
  for (int i = 0; i < 10000; ++i) {
    double z = load(rng), zbar = load(rng), s = season(rng);
    double back = postprocess(squash(z, zbar, s), zbar, s);
    CHECK(std::fabs(back - z) / z < 1e-12);
  }
}

TEST_CASE("squash decreases when the seasonal factor grows") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> season(0.5, 1.5);
  for (int i = 0; i < 200; ++i) {
    double s1 = season(rng), s2 = season(rng);
    if (s1 == s2) continue;
    if (s1 > s2) std::swap(s1, s2);
    CHECK(squash(300.0, 280.0, s2) < squash(300.0, 280.0, s1));
  }
}

TEST_CASE("on-tape squash matches the scalar form and differentiates") {
  Tape tape;
  double z[4] = {100.0, 150.0, 200.0, 250.0};
  Tensor shat = tape.constant({4}, {0.9, 1.0, 1.1, 1.2});
  Tensor x = squash_window(tape, z, 4, 180.0, shat);
  for (int i = 0; i < 4; ++i)
    CHECK(x.values()[i] ==
          doctest::Approx(squash(z[i], 180.0, shat.values()[i])).epsilon(1e-15));

  // d/ds ln(z/(zbar s)) = -1/s
  tape.backward(mean(x));
  for (int i = 0; i < 4; ++i)
    CHECK(shat.grad()[i] ==
          doctest::Approx(-0.25 / shat.values()[i]).epsilon(1e-12));
}

TEST_CASE("calendar features pick out the right one-hot slots") {
  // 2017-01-02 was a Monday in ISO week 1.
  int64_t monday = hours_from_civil({2017, 1, 2}, 0);
  CalendarFeatures f = calendar_features(monday);
  CHECK(f.dow == 0);
  CHECK(f.dom == 1);
  CHECK(f.woy == 0);

  auto oh = f.onehot();
  REQUIRE(static_cast<int>(oh.size()) == kCalendarLen);
  int ones = 0;
  for (double v : oh) {
    CHECK((v == 0.0 || v == 1.0));
    if (v == 1.0) ++ones;
  }
  CHECK(ones == 3);
  CHECK(oh[0] == 1.0);
  CHECK(oh[7 + 1] == 1.0);
  CHECK(oh[7 + 31 + 0] == 1.0);

  // Every hour of a day shares the day's features.
  CHECK(calendar_features(monday + 23).dow == 0);
  CHECK(calendar_features(monday + 24).dow == 1);
}

TEST_CASE("year-end weeks wrap by the ISO rule and week 53 folds") {
  // 2018-12-31 belongs to week 1 of 2019.
  CHECK(iso_week({2018, 12, 31}) == 1);
  CHECK(calendar_features(hours_from_civil({2018, 12, 31}, 0)).woy == 0);

  // 2016-01-01 falls in week 53 of 2015, which folds onto the last slot.
  CHECK(iso_week({2015, 12, 31}) == 53);
  CHECK(iso_week({2016, 1, 1}) == 53);
  CHECK(calendar_features(hours_from_civil({2016, 1, 1}, 0)).woy == 51);
}

TEST_CASE("ISO week agrees with the C library over eight years") {
  for (int64_t h = hours_from_civil({2014, 1, 1}, 12);
       h <= hours_from_civil({2021, 12, 31}, 12); h += 24) {
    CivilDate d = civil_from_hour(h);
    CHECK(iso_week(d) == strftime_iso_week(d.year, d.month, d.day));
  }
}

TEST_CASE("input vector layout") {
  std::array<double, kInputHours> x_in{};
  std::array<double, kOutputHours> shat{};
  for (int i = 0; i < kInputHours; ++i) x_in[i] = 0.01 * i;
  for (int i = 0; i < kOutputHours; ++i) shat[i] = 1.0 + 0.01 * i;
  CalendarFeatures cal{2, 14, 30};

  auto v = assemble_input(x_in, shat, 1000.0, cal);
  REQUIRE(static_cast<int>(v.size()) == kRawInputLen);
  CHECK(v[0] == 0.0);
  CHECK(v[167] == doctest::Approx(1.67).epsilon(1e-15));
  CHECK(v[168] == doctest::Approx(0.0).epsilon(1e-15));        // shat - 1
  CHECK(v[191] == doctest::Approx(0.23).epsilon(1e-12));
  CHECK(v[192] == doctest::Approx(3.0).epsilon(1e-15));        // log10(1000)
  CHECK(v[193 + 2] == 1.0);
  CHECK(v[193 + 7 + 14] == 1.0);
  CHECK(v[193 + 7 + 31 + 30] == 1.0);

  // Equal inputs give bitwise-equal vectors.
  CHECK(assemble_input(x_in, shat, 1000.0, cal) == v);

  // The tape form produces the same layout.
  Tape tape;
  Tensor xt = tape.constant({kInputHours},
                            std::vector<double>(x_in.begin(), x_in.end()));
  Tensor st = tape.constant({kOutputHours},
                            std::vector<double>(shat.begin(), shat.end()));
  Tensor raw = assemble_input(tape, xt, st, 1000.0, cal);
  REQUIRE(raw.shape() == Shape{kRawInputLen});
  CHECK(raw.values() == v);
}

TEST_CASE("timestamps parse, reject sub-hourly values and round trip") {
  int64_t h = parse_timestamp("2017-01-02T05:00:00Z");
  CHECK(hour_of_day(h) == 5);
  CHECK(format_timestamp(h) == "2017-01-02T05:00:00Z");
  CHECK(parse_timestamp("2017-01-02 05:00:00") == h);
  CHECK(parse_timestamp("2017-01-02T05:00") == h);
  CHECK(parse_date_or_timestamp("2017-01-02") == h - 5);

  CHECK_THROWS_AS(parse_timestamp("2017-01-02T05:30:00Z"), DataError);
  CHECK_THROWS_AS(parse_timestamp("2017-01-02T05:00:30Z"), DataError);
  CHECK_THROWS_AS(parse_timestamp("2017-13-02T05:00:00Z"), DataError);
  CHECK_THROWS_AS(parse_timestamp("not a time"), DataError);

  // Round trip across a few years of hours.
  for (int64_t t = parse_timestamp("2015-12-28T00:00:00Z");
       t < parse_timestamp("2016-01-05T00:00:00Z"); ++t)
    CHECK(parse_timestamp(format_timestamp(t)) == t);
}

TEST_SUITE_END();
