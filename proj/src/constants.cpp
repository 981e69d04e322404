#include "ubsde/constants.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ubsde/table.hpp"

namespace ubsde::constants {

namespace {

long double chain_u(long double beta) { return 45.0L / beta + 8.0L / (beta * beta); }

long double contraction(long double beta) {
    const long double u = chain_u(beta);
    return 9.0L * u * (u + 1.0L);
}

}  // namespace

ConstantsReport kh_constants(double beta) {
    if (!(beta > 0.0)) {
        throw std::invalid_argument("kh_constants: beta must be positive, got " +
                                    std::to_string(beta));
    }
    const long double b = beta;
    const long double k_prime = 45.0L + 8.0L / b;
    const long double k_tilde = 3.0L * k_prime * (k_prime / b + 1.0L);
    const long double k_hat = 3.0L * k_tilde;
    ConstantsReport r;
    r.beta = beta;
    r.k_prime = static_cast<double>(k_prime);
    r.k_tilde = static_cast<double>(k_tilde);
    r.k_hat = static_cast<double>(k_hat);
    r.contraction_ratio = static_cast<double>(k_hat / b);
    r.feasible = k_hat / b < 1.0L;
    return r;
}

double kh_beta_threshold(double tolerance, double lo, double hi) {
    if (!(tolerance > 0.0)) throw std::invalid_argument("kh_beta_threshold: tolerance must be > 0");
    if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("kh_beta_threshold: bad bracket");
    long double a = lo, b = hi;
    if (contraction(a) < 1.0L || !(contraction(b) < 1.0L)) {
        throw std::invalid_argument("kh_beta_threshold: bracket does not contain the threshold");
    }
    // contraction() is decreasing in beta; keep contraction(a) >= 1 > contraction(b).
    while (b - a > tolerance) {
        const long double mid = 0.5L * (a + b);
        if (contraction(mid) < 1.0L) {
            b = mid;
        } else {
            a = mid;
        }
    }
    return static_cast<double>(b);
}

double kh_beta_threshold_closed_form() {
    const long double u = (std::sqrt(13.0L) - 3.0L) / 6.0L;
    return static_cast<double>((45.0L + std::sqrt(2025.0L + 32.0L * u)) / (2.0L * u));
}

double kappa(double beta1_bar, double beta2_bar) {
    if (!(beta1_bar > 4.0)) {
        throw std::domain_error("kappa: beta1_bar must exceed 4, got " + std::to_string(beta1_bar));
    }
    const long double b1 = beta1_bar, b2 = beta2_bar;
    const long double denom = 1.0L - 90.0L / b2;
    if (!(b2 > 90.0L) || !(denom > 0.0L)) {
        throw std::domain_error("kappa: denominator nonpositive (beta2_bar = " +
                                std::to_string(beta2_bar) + " must exceed 90)");
    }
    const long double b1sq = b1 * b1;
    return static_cast<double>(16.0L / b1sq + (16.0L / b2) * (90.0L / b1sq) / denom);
}

double min_beta2(double beta1_bar) {
    if (!(beta1_bar > 4.0)) {
        throw std::domain_error("min_beta2: threshold undefined for beta1_bar <= 4 (got " +
                                std::to_string(beta1_bar) + ")");
    }
    const long double b1sq = static_cast<long double>(beta1_bar) * beta1_bar;
    return static_cast<double>(90.0L * b1sq / (b1sq - 16.0L));
}

std::vector<ComparisonRow> conditions_comparison_table(const ComparisonTableSpec& spec) {
    std::vector<ComparisonRow> rows;
    if (spec.beta1_bar_grid.empty()) return rows;
    const double kh = kh_beta_threshold(spec.kh_tolerance);
    for (double b1 : spec.beta1_bar_grid) {
        ComparisonRow row;
        row.beta1_bar = b1;
        row.min_beta2 = min_beta2(b1);
        row.reference_beta2 = spec.reference_factor * row.min_beta2;
        row.kappa_at_reference = kappa(b1, row.reference_beta2);
        row.kh_threshold = kh;
        row.a2_weight_exponent =
            spec.horizon * (b1 * spec.sample_c1 + row.reference_beta2 * spec.sample_c2 * spec.sample_c2);
        row.kh_weight_exponent =
            spec.horizon * kh * (spec.sample_c1 + spec.sample_c2 * spec.sample_c2);
        row.a2_threshold_below_kh = row.min_beta2 < kh;
        rows.push_back(row);
    }
    return rows;
}

void write_comparison_table(std::ostream& out, const std::vector<ComparisonRow>& rows) {
    TableWriter table(out, {"beta1_bar", "min_beta2", "reference_beta2", "kappa_at_reference",
                            "kh_threshold", "a2_weight_exponent", "kh_weight_exponent",
                            "a2_threshold_below_kh"});
    for (const auto& r : rows) {
        table.row(r.beta1_bar, r.min_beta2, r.reference_beta2, r.kappa_at_reference,
                  r.kh_threshold, r.a2_weight_exponent, r.kh_weight_exponent,
                  r.a2_threshold_below_kh);
    }
}

}  // namespace ubsde::constants
