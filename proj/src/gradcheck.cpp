#include "esadrnn/gradcheck.hpp"

#include <cmath>

namespace esadrnn {

double grad_check(const std::function<Tensor(Tape&, const Tensor&)>& f,
                  const Shape& shape, const std::vector<double>& x0,
                  double eps) {
  std::vector<double> analytic;
  {
    Tape tape;
    Tensor x = tape.constant(shape, x0);
    Tensor root = f(tape, x);
    tape.backward(root);
    analytic = x.grad();
  }

  auto eval = [&](const std::vector<double>& xv) {
    Tape tape;
    Tensor x = tape.constant(shape, xv);
    return f(tape, x).value();
  };

  double worst = 0.0;
  std::vector<double> xv = x0;
  for (size_t i = 0; i < xv.size(); ++i) {
    double keep = xv[i];
    xv[i] = keep + eps;
    double up = eval(xv);
    xv[i] = keep - eps;
    double down = eval(xv);
    xv[i] = keep;
    double fd = (up - down) / (2.0 * eps);
    double rel = std::fabs(analytic[i] - fd) / (std::fabs(fd) + 1e-12);
    if (rel > worst) worst = rel;
  }
  return worst;
}

double grad_check_params(ParamStore& store,
                         const std::function<double()>& loss_value,
                         const std::function<void()>& compute_grads,
                         int samples_per_param, double eps,
                         std::mt19937_64& rng, double screen_threshold,
                         int* screened) {
  compute_grads();

  // Snapshot analytic gradients before finite differences touch anything.
  std::vector<std::vector<double>> analytic(store.count());
  for (size_t i = 0; i < store.count(); ++i) analytic[i] = store[i].grad;

  double worst = 0.0;
  int skipped = 0;
  for (size_t i = 0; i < store.count(); ++i) {
    Parameter& p = store[i];
    int n = p.size();
    int checks = samples_per_param < n ? samples_per_param : n;
    for (int c = 0; c < checks; ++c) {
      int k = samples_per_param < n
                  ? static_cast<int>(rng() % static_cast<uint64_t>(n))
                  : c;
      double keep = p.value[k];
      p.value[k] = keep + eps;
      double up = loss_value();
      p.value[k] = keep - eps;
      double down = loss_value();
      p.value[k] = keep;
      double fd = (up - down) / (2.0 * eps);
      if (std::fabs(fd) < screen_threshold &&
          std::fabs(analytic[i][k]) < screen_threshold) {
        ++skipped;
        continue;
      }
      double rel = std::fabs(analytic[i][k] - fd) / (std::fabs(fd) + 1e-12);
      if (rel > worst) worst = rel;
    }
  }
  if (screened) *screened = skipped;
  return worst;
}

}  // namespace esadrnn
