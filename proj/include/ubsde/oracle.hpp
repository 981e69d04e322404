#pragma once

#include "ubsde/brownian.hpp"
#include "ubsde/model.hpp"
#include "ubsde/picard.hpp"

namespace ubsde {

// Closed-form solution of the scalar linear BSDE
//   f = a y + sum_l b_l z_l + c,  xi = alpha + sum_l beta_l W_l(T)
// with constant a, b, c (a constant offset folds into c):
//   y(t) = e^{a tau} (alpha + sum_l beta_l (W_l(t) + b_l tau)) + c (e^{a tau} - 1) / a
//   z_l(t) = e^{a tau} beta_l,  tau = T - t
// with c tau in place of the last term when a = 0. The zero and constant
// generators and a constant terminal are special cases. Anything else throws
// std::invalid_argument("oracle unavailable: ...").
SolutionEnsemble linear_analytic_solution(const BSDEModel& model, const BrownianEnsemble& ensemble);

// True when linear_analytic_solution accepts the model.
bool has_linear_oracle(const BSDEModel& model);

}  // namespace ubsde
