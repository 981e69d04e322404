#include "ubsde/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "ubsde/overloaded.hpp"

namespace ubsde {

namespace {

struct LinearData {
    double a = 0.0;
    std::vector<double> b;
    double c = 0.0;
    double alpha = 0.0;
    std::vector<double> beta;
};

// Returns an empty reason when the model is supported.
std::string extract(const BSDEModel& model, LinearData& out) {
    if (model.dim_y != 1) return "d must be 1";
    const std::size_t k = model.dim_w;
    out.b.assign(k, 0.0);
    out.beta.assign(k, 0.0);
    std::string reason;
    std::visit(overloaded{
                   [&](const Generator::Zero&) {},
                   [&](const Generator::Constant& g) { out.c = g.value.at(0); },
                   [&](const Generator::Linear& g) {
                       if (!g.a.is_constant() || !g.c.is_constant()) {
                           reason = "linear coefficients must be constant";
                           return;
                       }
                       out.a = g.a.constant_value();
                       out.c = g.c.constant_value();
                       for (std::size_t l = 0; l < k; ++l) {
                           if (!g.b[l].is_constant()) {
                               reason = "linear coefficients must be constant";
                               return;
                           }
                           out.b[l] = g.b[l].constant_value();
                       }
                   },
                   [&](const Generator::SinClip&) { reason = "generator is not linear"; },
               },
               model.generator.body);
    if (!reason.empty()) return reason;
    if (model.generator.offset) {
        if (!model.generator.offset->is_constant()) return "generator offset must be constant";
        out.c += model.generator.offset->constant_value();
    }
    std::visit(overloaded{
                   [&](const Terminal::Constant& t) { out.alpha = t.value.at(0); },
                   [&](const Terminal::Affine& t) {
                       out.alpha = t.intercept.at(0);
                       for (std::size_t l = 0; l < k; ++l) out.beta[l] = t.slope.at(l);
                   },
                   [&](const auto&) { reason = "terminal must be constant or affine in W(T)"; },
               },
               model.terminal.body);
    out.alpha += model.terminal.offset;
    return reason;
}

}  // namespace

bool has_linear_oracle(const BSDEModel& model) {
    LinearData data;
    return extract(model, data).empty();
}

SolutionEnsemble linear_analytic_solution(const BSDEModel& model, const BrownianEnsemble& ensemble) {
    model.validate();
    if (model.dim_w != ensemble.dim()) {
        throw std::invalid_argument("oracle: model k does not match the ensemble");
    }
    LinearData data;
    const std::string reason = extract(model, data);
    if (!reason.empty()) throw std::invalid_argument("oracle unavailable: " + reason);

    const TimeGrid& grid = ensemble.grid();
    const std::size_t paths = ensemble.num_paths();
    const std::size_t nodes = grid.num_nodes();
    const std::size_t k = model.dim_w;
    SolutionEnsemble sol{grid, PathField(paths, nodes, 1), PathField(paths, nodes, k), {}};
    sol.meta.scheme = "oracle";
    sol.meta.seed = ensemble.seed();
    for (std::size_t i = 0; i < nodes; ++i) {
        // The last node reuses the terminal value exactly.
        const double tau = i + 1 == nodes ? 0.0 : grid.horizon() - grid.t(i);
        const double growth = std::exp(data.a * tau);
        const double source = data.a == 0.0 ? data.c * tau : data.c * std::expm1(data.a * tau) / data.a;
        for (std::size_t p = 0; p < paths; ++p) {
            double shifted = data.alpha;
            for (std::size_t l = 0; l < k; ++l) {
                shifted += data.beta[l] * (ensemble.w(p, i, l) + data.b[l] * tau);
            }
            sol.y(p, i, 0) = growth * shifted + source;
            for (std::size_t l = 0; l < k; ++l) sol.z(p, i, l) = growth * data.beta[l];
        }
    }
    return sol;
}

}  // namespace ubsde
