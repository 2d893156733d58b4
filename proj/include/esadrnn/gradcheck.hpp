#pragma once

#include <functional>
#include <random>

#include "esadrnn/params.hpp"
#include "esadrnn/tensor.hpp"

namespace esadrnn {

// Compares the tape gradient of a scalar function against central finite
// differences, component by component. `f` must deterministically rebuild
// the same computation from the given input leaf (any other leaves it
// needs have to be created inside `f`). Returns the largest relative
// error max |analytic - fd| / (|fd| + 1e-12).
double grad_check(const std::function<Tensor(Tape&, const Tensor&)>& f,
                  const Shape& shape, const std::vector<double>& x0,
                  double eps);

// Finite-difference check over externally stored parameters, used for
// whole-model verification where perturbing every component would be too
// slow. For each parameter, `samples_per_param` component indices are
// drawn and checked. `loss_value` evaluates the loss from the current
// parameter values; `compute_grads` must zero the store's gradients,
// rebuild the tape and run backward. Components where both the analytic
// and the finite-difference value fall below `screen_threshold` carry no
// signal against rounding noise and are skipped (counted in `screened`).
double grad_check_params(ParamStore& store,
                         const std::function<double()>& loss_value,
                         const std::function<void()>& compute_grads,
                         int samples_per_param, double eps,
                         std::mt19937_64& rng,
                         double screen_threshold = 0.0,
                         int* screened = nullptr);

}  // namespace esadrnn
