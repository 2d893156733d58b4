#include "esadrnn/holt_winters.hpp"

#include <string>

#include "esadrnn/errors.hpp"

namespace esadrnn {

EsInit es_init_from_prefix(const double* z, int64_t n) {
  if (n < 336)
    throw DataError("smoothing init needs at least 336 hours, got " +
                    std::to_string(n));
  int64_t weeks = n / 168;
  for (int64_t i = 0; i < weeks * 168; ++i)
    if (!(z[i] > 0.0))
      throw DataError("smoothing init: nonpositive load at prefix hour " +
                      std::to_string(i));

  EsInit init;
  double first_week = 0.0;
  for (int i = 0; i < 168; ++i) first_week += z[i];
  init.level = first_week / 168.0;

  std::array<double, 168> week_mean{};
  for (int64_t w = 0; w < weeks; ++w) {
    double acc = 0.0;
    for (int i = 0; i < 168; ++i) acc += z[w * 168 + i];
    week_mean[w] = acc / 168.0;
  }
  double total = 0.0;
  for (int i = 0; i < 168; ++i) {
    double acc = 0.0;
    for (int64_t w = 0; w < weeks; ++w) acc += z[w * 168 + i] / week_mean[w];
    init.seasonal[i] = acc / static_cast<double>(weeks);
    total += init.seasonal[i];
  }
  double norm = total / 168.0;
  for (auto& s : init.seasonal) s /= norm;
  return init;
}

EsState::EsState(Tape& tape, const EsInit& init, const Tensor& alpha_logit,
                 const Tensor& beta_logit, int64_t start_hour)
    : tape_(&tape),
      alpha_logit_(alpha_logit),
      beta_logit_(beta_logit),
      start_(start_hour),
      cursor_(start_hour) {
  if (alpha_logit.shape() != Shape{1} || beta_logit.shape() != Shape{1})
    throw ShapeError("EsState: coefficient logits must be scalars");
  alpha_ = sigmoid(alpha_logit_);
  beta_ = sigmoid(beta_logit_);
  level_ = tape.scalar(init.level);
  seasonal_.reserve(512);
  for (double s : init.seasonal) seasonal_.push_back(tape.scalar(s));
}

void EsState::update_hourly(double z) {
  if (!(z > 0.0))
    throw DataError("update_hourly: nonpositive load " + std::to_string(z) +
                    " at hour " + std::to_string(cursor_));
  const Tensor& s_cur = seasonal_[cursor_ - start_];
  Tensor zc = tape_->scalar(z);
  Tensor l_new = add(mul(alpha_, div(zc, s_cur)), mul(one_minus(alpha_), level_));
  Tensor s_new = add(mul(beta_, div(zc, l_new)), mul(one_minus(beta_), s_cur));
  seasonal_.push_back(s_new);
  level_ = l_new;
  ++cursor_;
}

void EsState::update_coeffs(const Tensor& dalpha, const Tensor& dbeta) {
  if (dalpha.shape() != Shape{1} || dbeta.shape() != Shape{1})
    throw ShapeError("update_coeffs: corrections must be scalars");
  alpha_ = sigmoid(add(alpha_logit_, dalpha));
  beta_ = sigmoid(add(beta_logit_, dbeta));
}

void EsState::update_coeffs(double dalpha, double dbeta) {
  update_coeffs(tape_->scalar(dalpha), tape_->scalar(dbeta));
}

Tensor EsState::seasonal_window(int64_t from_hour, int n) const {
  if (n < 1) throw ShapeError("seasonal_window: empty range");
  if (from_hour < start_ || from_hour + n > cursor_ + 168)
    throw DataError("seasonal_window: hours [" + std::to_string(from_hour) +
                    "," + std::to_string(from_hour + n) +
                    ") outside the known range [" + std::to_string(start_) +
                    "," + std::to_string(cursor_ + 168) + ")");
  std::vector<Tensor> parts;
  parts.reserve(n);
  for (int i = 0; i < n; ++i)
    parts.push_back(seasonal_[from_hour + i - start_]);
  return concat(parts);
}

Tensor EsState::seasonal_forecast(int64_t from_hour, int horizon) const {
  return seasonal_window(from_hour, horizon);
}

}  // namespace esadrnn
