#include "ubsde/weights.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ubsde {

std::string to_string(Variant v) { return v == Variant::A1 ? "A1" : "A2"; }

Variant parse_variant(const std::string& text) {
    if (text == "A1" || text == "a1") return Variant::A1;
    if (text == "A2" || text == "a2") return Variant::A2;
    throw std::invalid_argument("unknown variant '" + text + "' (expected A1 or A2)");
}

WeightParams::WeightParams(double beta1, double beta2, double beta1_bar, double beta2_bar)
    : beta1_(beta1), beta2_(beta2), beta1_bar_(beta1_bar), beta2_bar_(beta2_bar) {
    if (!(beta1 > 1.0)) {
        throw std::invalid_argument("beta1 = " + std::to_string(beta1) +
                                    " violates the constraint 1 < beta1");
    }
    if (!(beta2 > 1.0)) {
        throw std::invalid_argument("beta2 = " + std::to_string(beta2) +
                                    " violates the constraint 1 < beta2");
    }
    if (!(beta1_bar > 4.0)) {
        throw std::invalid_argument("beta1_bar = " + std::to_string(beta1_bar) +
                                    " violates the constraint 4 < beta1_bar");
    }
    const double b2 = beta1_bar * beta1_bar;
    const double threshold = 90.0 * b2 / (b2 - 16.0);
    if (!(beta2_bar > threshold)) {
        throw std::invalid_argument("beta2_bar = " + std::to_string(beta2_bar) +
                                    " violates the constraint 90 beta1_bar^2/(beta1_bar^2-16) "
                                    "< beta2_bar (threshold " +
                                    std::to_string(threshold) + ")");
    }
}

AlphaProcess eval_alpha(Variant variant, const PathField& c1, const PathField& c2,
                        const PathField& gamma, const WeightParams& params) {
    if (!c1.same_shape(c2) || !c1.same_shape(gamma) || c1.width() != 1) {
        throw std::invalid_argument("eval_alpha: coefficient fields must share a scalar shape");
    }
    PathField alpha(c1.paths(), c1.nodes(), 1);
    for (std::size_t p = 0; p < c1.paths(); ++p) {
        for (std::size_t i = 0; i < c1.nodes(); ++i) {
            const double a = c1(p, i);
            const double b = c2(p, i);
            double value = 0.0;
            if (variant == Variant::A1) {
                value = gamma(p, i) + params.beta1() * a * a + params.beta2() * b * b;
            } else {
                value = gamma(p, i) + params.beta1_bar() * a + params.beta2_bar() * b * b;
            }
            if (!(value > 0.0) || !std::isfinite(value)) {
                std::ostringstream msg;
                msg << "alpha positivity violated (" << to_string(variant) << ") at path " << p
                    << ", node " << i << ": value " << value;
                throw std::domain_error(msg.str());
            }
            alpha(p, i) = value;
        }
    }
    return {variant, std::move(alpha)};
}

AlphaProcess eval_alpha(Variant variant, const CoefficientProcess& c1,
                        const CoefficientProcess& c2, const CoefficientProcess& gamma,
                        const WeightParams& params, const BrownianEnsemble& ensemble) {
    return eval_alpha(variant, c1.sample(ensemble), c2.sample(ensemble), gamma.sample(ensemble),
                      params);
}

WeightProcess::WeightProcess(PathField log_p) : log_p_(std::move(log_p)) {
    if (log_p_.width() != 1) throw std::invalid_argument("weight process must be scalar");
}

double WeightProcess::p(std::size_t path, std::size_t node) const {
    return std::exp(log_p_(path, node));
}

WeightProcess eval_weight(const AlphaProcess& alpha, const TimeGrid& grid, double log_cap) {
    const PathField& a = alpha.values;
    if (a.nodes() != grid.num_nodes()) {
        throw std::invalid_argument("eval_weight: alpha has " + std::to_string(a.nodes()) +
                                    " nodes but the grid has " +
                                    std::to_string(grid.num_nodes()));
    }
    PathField log_p(a.paths(), a.nodes(), 1);
    for (std::size_t p = 0; p < a.paths(); ++p) {
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < a.nodes(); ++i) {
            acc += 0.5 * (a(p, i) + a(p, i + 1)) * grid.dt(i);
            if (acc > log_cap) {
                std::ostringstream msg;
                msg << "weight overflow at node " << i + 1 << " (t = " << grid.t(i + 1)
                    << ", path " << p << "): log p = " << acc << " exceeds " << log_cap
                    << "; reduce the horizon or the coefficient processes";
                throw std::overflow_error(msg.str());
            }
            log_p(p, i + 1) = acc;
        }
    }
    return WeightProcess(std::move(log_p));
}

MonteCarloEstimate mean_estimate(std::span<const double> per_path, Execution exec) {
    const std::size_t n = per_path.size();
    if (n == 0) return {};
    // Shifted accumulation keeps the variance estimate accurate for
    // near-constant samples.
    const double shift = per_path[0];
    const auto sums = kernels::reduce(exec, n, 2, [&](std::size_t i, std::span<double> acc) {
        const double d = per_path[i] - shift;
        acc[0] += d;
        acc[1] += d * d;
    });
    const double m = static_cast<double>(n);
    const double mean_d = sums[0] / m;
    const double value = shift + mean_d;
    double var = 0.0;
    if (n > 1) var = std::max(0.0, (sums[1] - m * mean_d * mean_d) / (m - 1.0));
    return {value, std::sqrt(var / m)};
}

namespace {

double squared_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

void check_weight_shape(const PathField& phi, const WeightProcess& weight, const TimeGrid& grid,
                        const char* what) {
    if (weight.nodes() != grid.num_nodes()) {
        throw std::invalid_argument(std::string(what) + ": weight/grid node count mismatch");
    }
    require_shape(phi, weight.paths(), weight.nodes(), what);
}

}  // namespace

MonteCarloEstimate weighted_m2_norm(const PathField& phi, const WeightProcess& weight,
                                    const TimeGrid& grid, Execution exec,
                                    const PathField* multiplier) {
    check_weight_shape(phi, weight, grid, "weighted_m2_norm");
    if (multiplier) require_shape(*multiplier, phi.paths(), phi.nodes(), "weighted_m2_norm");
    std::vector<double> per_path(phi.paths());
    kernels::for_each(exec, phi.paths(), [&](std::size_t p) {
        double prev = 0.0;
        double acc = 0.0;
        for (std::size_t i = 0; i < phi.nodes(); ++i) {
            double v = weight.p(p, i) * squared_norm(phi.at(p, i));
            if (multiplier) v *= (*multiplier)(p, i);
            if (i > 0) acc += 0.5 * (prev + v) * grid.dt(i - 1);
            prev = v;
        }
        per_path[p] = acc;
    });
    return mean_estimate(per_path, exec);
}

MonteCarloEstimate weighted_h2_norm(const PathField& phi, const WeightProcess& weight,
                                    const TimeGrid& grid, Execution exec) {
    check_weight_shape(phi, weight, grid, "weighted_h2_norm");
    std::vector<double> per_path(phi.paths());
    kernels::for_each(exec, phi.paths(), [&](std::size_t p) {
        double best = 0.0;
        for (std::size_t i = 0; i < phi.nodes(); ++i) {
            best = std::max(best, weight.p(p, i) * squared_norm(phi.at(p, i)));
        }
        per_path[p] = best;
    });
    return mean_estimate(per_path, exec);
}

MonteCarloEstimate weighted_terminal_norm(const PathField& xi, const WeightProcess& weight,
                                          const TimeGrid& grid, Execution exec) {
    if (weight.nodes() != grid.num_nodes()) {
        throw std::invalid_argument("weighted_terminal_norm: weight/grid node count mismatch");
    }
    if (xi.paths() != weight.paths() || xi.nodes() != 1) {
        throw std::invalid_argument(
            "weighted_terminal_norm: terminal samples must be laid out as (paths, 1, d) with "
            "the weight's path count");
    }
    const std::size_t last = grid.num_steps();
    std::vector<double> per_path(xi.paths());
    kernels::for_each(exec, xi.paths(), [&](std::size_t p) {
        per_path[p] = weight.p(p, last) * squared_norm(xi.at(p, 0));
    });
    return mean_estimate(per_path, exec);
}

}  // namespace ubsde
