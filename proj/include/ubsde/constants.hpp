#pragma once

#include <iosfwd>
#include <vector>

namespace ubsde::constants {

// Constant chain of the reference beta-weighted contraction argument for
// BSDEs with stochastic Lipschitz coefficients:
//   k'  = 45 + 8/beta
//   k~' = 3 k' (k'/beta + 1)
//   k^' = 3 k~'
// The fixed-point map contracts iff k^'/beta < 1, i.e. 9 u (u + 1) < 1 with
// u = 45/beta + 8/beta^2.
struct ConstantsReport {
    double beta = 0.0;
    double k_prime = 0.0;
    double k_tilde = 0.0;
    double k_hat = 0.0;
    double contraction_ratio = 0.0;  // k_hat / beta
    bool feasible = false;
};

ConstantsReport kh_constants(double beta);

// Smallest beta with k^'/beta < 1, by bisection on [lo, hi] until the bracket
// is narrower than `tolerance`. Returns the upper (feasible) end.
double kh_beta_threshold(double tolerance, double lo = 1.0, double hi = 1.0e4);

// Closed form: u* = (sqrt(13) - 3)/6 solves 9u(u+1) = 1 and beta solves
// u* beta^2 - 45 beta - 8 = 0.
double kh_beta_threshold_closed_form();

// A2 contraction factor 16/b1^2 + (16/b2)(90/b1^2)/(1 - 90/b2).
// Throws std::domain_error when beta2_bar <= 90 ("denominator nonpositive").
double kappa(double beta1_bar, double beta2_bar);

// 90 b1^2 / (b1^2 - 16); throws std::domain_error for beta1_bar <= 4.
double min_beta2(double beta1_bar);

struct ComparisonRow {
    double beta1_bar = 0.0;
    double min_beta2 = 0.0;
    double reference_beta2 = 0.0;
    double kappa_at_reference = 0.0;
    double kh_threshold = 0.0;
    double a2_weight_exponent = 0.0;  // int_0^T (beta1_bar c1 + reference_beta2 c2^2) dt
    double kh_weight_exponent = 0.0;  // int_0^T kh_threshold (c1 + c2^2) dt
    bool a2_threshold_below_kh = false;
};

struct ComparisonTableSpec {
    std::vector<double> beta1_bar_grid;
    double reference_factor = 2.0;  // reference beta2_bar = factor * min_beta2
    double sample_c1 = 1.0;         // constant coefficient values used for the exponents
    double sample_c2 = 0.1;
    double horizon = 1.0;
    double kh_tolerance = 1e-6;
};

std::vector<ComparisonRow> conditions_comparison_table(const ComparisonTableSpec& spec);

// Columns: beta1_bar, min_beta2, reference_beta2, kappa_at_reference,
// kh_threshold, a2_weight_exponent, kh_weight_exponent, a2_threshold_below_kh.
void write_comparison_table(std::ostream& out, const std::vector<ComparisonRow>& rows);

}  // namespace ubsde::constants
