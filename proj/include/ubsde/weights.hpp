#pragma once

#include <string>

#include "ubsde/brownian.hpp"
#include "ubsde/coefficient.hpp"
#include "ubsde/field.hpp"
#include "ubsde/grid.hpp"
#include "ubsde/kernels.hpp"

namespace ubsde {

// Which family of integrability/Lipschitz conditions a run works under.
enum class Variant { A1, A2 };

std::string to_string(Variant v);
Variant parse_variant(const std::string& text);

// The constants beta1, beta2 (A1) and beta1_bar, beta2_bar (A2).
// Construction enforces 1 < beta1, 1 < beta2, 4 < beta1_bar and
// 90 beta1_bar^2 / (beta1_bar^2 - 16) < beta2_bar.
class WeightParams {
public:
    WeightParams(double beta1, double beta2, double beta1_bar, double beta2_bar);

    double beta1() const { return beta1_; }
    double beta2() const { return beta2_; }
    double beta1_bar() const { return beta1_bar_; }
    double beta2_bar() const { return beta2_bar_; }

private:
    double beta1_;
    double beta2_;
    double beta1_bar_;
    double beta2_bar_;
};

// alpha1 = gamma + beta1 c1^2 + beta2 c2^2, or
// alpha2 = gamma_bar + beta1_bar c1 + beta2_bar c2^2, sampled per (path, node).
struct AlphaProcess {
    Variant variant;
    PathField values;  // (paths, nodes, 1), strictly positive
};

// p(t) = exp(int_0^t alpha ds), stored as log p. The trapezoid rule is exact
// for constant alpha.
class WeightProcess {
public:
    explicit WeightProcess(PathField log_p);

    const PathField& log_p() const { return log_p_; }
    double p(std::size_t path, std::size_t node) const;
    std::size_t paths() const { return log_p_.paths(); }
    std::size_t nodes() const { return log_p_.nodes(); }

private:
    PathField log_p_;
};

inline constexpr double kDefaultLogWeightCap = 700.0;

// Throws std::domain_error("alpha positivity violated ...") naming the sample.
AlphaProcess eval_alpha(Variant variant, const PathField& c1, const PathField& c2,
                        const PathField& gamma, const WeightParams& params);
AlphaProcess eval_alpha(Variant variant, const CoefficientProcess& c1,
                        const CoefficientProcess& c2, const CoefficientProcess& gamma,
                        const WeightParams& params, const BrownianEnsemble& ensemble);

// Throws std::overflow_error("weight overflow ...") when log p exceeds the cap.
WeightProcess eval_weight(const AlphaProcess& alpha, const TimeGrid& grid,
                          double log_cap = kDefaultLogWeightCap);

// A Monte-Carlo mean and the standard error of that mean.
struct MonteCarloEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

MonteCarloEstimate mean_estimate(std::span<const double> per_path, Execution exec);

// E int_0^T p |phi|^2 dt, trapezoid in time. When `multiplier` is given the
// integrand is multiplied by it sample-wise (alpha for lambda_n, 1/alpha for
// the f(.,0,0) condition).
MonteCarloEstimate weighted_m2_norm(const PathField& phi, const WeightProcess& weight,
                                    const TimeGrid& grid, Execution exec = Execution::parallel,
                                    const PathField* multiplier = nullptr);

// E sup_t p |phi|^2; the sup is the max over grid nodes.
MonteCarloEstimate weighted_h2_norm(const PathField& phi, const WeightProcess& weight,
                                    const TimeGrid& grid, Execution exec = Execution::parallel);

// E p(T) |xi|^2 for terminal samples laid out as (paths, 1, d).
MonteCarloEstimate weighted_terminal_norm(const PathField& xi, const WeightProcess& weight,
                                          const TimeGrid& grid,
                                          Execution exec = Execution::parallel);

}  // namespace ubsde
