#include "ubsde/picard.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ubsde/constants.hpp"
#include "ubsde/table.hpp"

namespace ubsde {

namespace {

constexpr std::size_t kMaxWidth = 64;  // d * k bound for stack buffers

enum class ArgumentMode { frozen, explicit_direct };

Eigen::MatrixXd node_state(const BrownianEnsemble& ensemble, std::size_t node) {
    Eigen::MatrixXd state(static_cast<Eigen::Index>(ensemble.num_paths()),
                          static_cast<Eigen::Index>(ensemble.dim()));
    for (std::size_t p = 0; p < ensemble.num_paths(); ++p)
        for (std::size_t l = 0; l < ensemble.dim(); ++l)
            state(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(l)) = ensemble.w(p, node, l);
    return state;
}

SolutionEnsemble backward_sweep(const BoundModel& model, const RegressionPlan& plan,
                                ArgumentMode mode, const PathField* phi, const PathField* psi) {
    const BrownianEnsemble& ensemble = plan.ensemble();
    if (&model.ensemble() != &ensemble) {
        throw std::invalid_argument("solver: model and regression plan use different ensembles");
    }
    const TimeGrid& grid = ensemble.grid();
    const std::size_t paths = ensemble.num_paths();
    const std::size_t nodes = grid.num_nodes();
    const std::size_t d = model.dim_y();
    const std::size_t k = model.dim_w();
    const std::size_t dk = d * k;
    if (dk > kMaxWidth) throw std::invalid_argument("solver: d*k exceeds 64");
    if (phi) {
        require_shape(*phi, paths, nodes, "inner_solve phi");
        if (phi->width() != d) throw std::invalid_argument("inner_solve: phi must have width d");
    }
    if (psi) {
        require_shape(*psi, paths, nodes, "inner_solve psi");
        if (psi->width() != dk) throw std::invalid_argument("inner_solve: psi must have width d*k");
    }
    const Execution exec = plan.exec();

    SolutionEnsemble sol{grid, PathField(paths, nodes, d), PathField(paths, nodes, dk), {}};
    sol.meta.seed = ensemble.seed();
    const std::size_t last = nodes - 1;
    for (std::size_t p = 0; p < paths; ++p)
        for (std::size_t j = 0; j < d; ++j) sol.y(p, last, j) = model.terminal()(p, 0, j);

    const auto m = static_cast<Eigen::Index>(paths);
    Eigen::MatrixXd next(m, static_cast<Eigen::Index>(d));
    Eigen::MatrixXd z_targets(m, static_cast<Eigen::Index>(dk));
    for (std::size_t step = last; step-- > 0;) {
        const double dt = grid.dt(step);
        for (std::size_t p = 0; p < paths; ++p)
            for (std::size_t j = 0; j < d; ++j)
                next(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(j)) = sol.y(p, step + 1, j);
        const NodeRegressor& regressor = plan.at(step);
        const Eigen::MatrixXd y_hat = regressor.fit(next);
        for (std::size_t p = 0; p < paths; ++p) {
            const auto pp = static_cast<Eigen::Index>(p);
            for (std::size_t j = 0; j < d; ++j) {
                const double centered = next(pp, static_cast<Eigen::Index>(j)) - y_hat(pp, static_cast<Eigen::Index>(j));
                for (std::size_t l = 0; l < k; ++l)
                    z_targets(pp, static_cast<Eigen::Index>(j * k + l)) = centered * ensemble.dw(p, step, l);
            }
        }
        const Eigen::MatrixXd z_hat = regressor.fit(z_targets);

        kernels::for_each(exec, paths, [&](std::size_t p) {
            const auto pp = static_cast<Eigen::Index>(p);
            double y_arg[kMaxWidth];
            double z_arg[kMaxWidth];
            double f[kMaxWidth];
            for (std::size_t c = 0; c < dk; ++c) {
                sol.z(p, step, c) = z_hat(pp, static_cast<Eigen::Index>(c)) / dt;
            }
            if (mode == ArgumentMode::frozen) {
                for (std::size_t j = 0; j < d; ++j) y_arg[j] = (*phi)(p, step, j);
                for (std::size_t c = 0; c < dk; ++c) z_arg[c] = (*psi)(p, step, c);
            } else {
                for (std::size_t j = 0; j < d; ++j) y_arg[j] = y_hat(pp, static_cast<Eigen::Index>(j));
                for (std::size_t c = 0; c < dk; ++c) z_arg[c] = sol.z(p, step, c);
            }
            model.generator(step, p, {y_arg, d}, {z_arg, dk}, {f, d});
            for (std::size_t j = 0; j < d; ++j) {
                sol.y(p, step, j) = y_hat(pp, static_cast<Eigen::Index>(j)) + f[j] * dt;
            }
        });

        for (std::size_t p = 0; p < paths; ++p) {
            bool finite = true;
            for (double v : sol.y.at(p, step)) finite = finite && std::isfinite(v);
            for (double v : sol.z.at(p, step)) finite = finite && std::isfinite(v);
            if (!finite) {
                throw std::runtime_error("solver: non-finite value at node " +
                                         std::to_string(step) + " (path " + std::to_string(p) + ")");
            }
        }
    }
    for (std::size_t p = 0; p < paths; ++p)
        for (std::size_t c = 0; c < dk; ++c) sol.z(p, last, c) = sol.z(p, last - 1, c);
    return sol;
}

}  // namespace

RegressionPlan::RegressionPlan(const BrownianEnsemble& ensemble, const RegressionBasis& basis,
                               Execution exec)
    : ensemble_(&ensemble), basis_(basis), exec_(exec) {
    basis_.validate();
    const std::size_t steps = ensemble.grid().num_steps();
    regressors_.reserve(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        regressors_.emplace_back(node_state(ensemble, i), basis_, exec_);
    }
}

WeightContext make_weight_context(const BoundModel& model, Variant variant,
                                  const WeightParams& params, const CoefficientProcess& gamma,
                                  double log_cap) {
    AlphaProcess alpha =
        eval_alpha(variant, model.c1(), model.c2(), gamma.sample(model.ensemble()), params);
    WeightProcess weight = eval_weight(alpha, model.ensemble().grid(), log_cap);
    return {variant, std::move(alpha), std::move(weight)};
}

SolutionEnsemble inner_solve(const BoundModel& model, const PathField& phi, const PathField& psi,
                             const RegressionPlan& plan) {
    SolutionEnsemble sol = backward_sweep(model, plan, ArgumentMode::frozen, &phi, &psi);
    sol.meta.scheme = "inner";
    sol.meta.iterations = 1;
    return sol;
}

SolutionEnsemble solve_direct(const BoundModel& model, const RegressionPlan& plan) {
    SolutionEnsemble sol = backward_sweep(model, plan, ArgumentMode::explicit_direct, nullptr, nullptr);
    sol.meta.scheme = "direct";
    sol.meta.iterations = 1;
    return sol;
}

PicardResult solve_picard_z(const BoundModel& model, const PathField& phi,
                            const RegressionPlan& plan, const WeightContext& weights,
                            const WeightParams& params, const PicardSettings& settings,
                            const PathField* z_start) {
    if (!(settings.tol > 0.0)) throw std::invalid_argument("solve_picard_z: tol must be > 0");
    if (settings.max_iter < 1) throw std::invalid_argument("solve_picard_z: max_iter must be >= 1");
    const TimeGrid& grid = plan.ensemble().grid();
    const std::size_t paths = plan.ensemble().num_paths();
    const std::size_t nodes = grid.num_nodes();
    const std::size_t d = model.dim_y();
    const std::size_t dk = d * model.dim_w();

    const double rate = weights.variant == Variant::A1 ? params.beta2() : params.beta2_bar();
    DiagnosticsBuilder builder(SchemeKind::z_picard, rate, weights.weight, grid,
                               &weights.alpha.values, settings.noise, plan.exec());

    Iterate previous{PathField(paths, nodes, d), z_start ? *z_start : PathField(paths, nodes, dk)};
    if (z_start) require_shape(*z_start, paths, nodes, "solve_picard_z z_start");

    SolutionEnsemble current;
    bool converged = false;
    int n = 0;
    for (n = 1; n <= settings.max_iter; ++n) {
        current = inner_solve(model, phi, previous.z, plan);
        Iterate next{std::move(current.y), std::move(current.z)};
        const IterationRecord& rec = builder.add(previous, next);
        previous = std::move(next);
        if (rec.active < settings.tol || !model.depends_on_z()) {
            converged = true;
            break;
        }
    }
    n = std::min(n, settings.max_iter);

    PicardResult result;
    result.solution.grid = grid;
    result.solution.y = std::move(previous.y);
    result.solution.z = std::move(previous.z);
    result.solution.meta.scheme = "picard_z";
    result.solution.meta.iterations = n;
    result.solution.meta.inner_iterations = n;
    result.solution.meta.seed = plan.ensemble().seed();
    result.solution.meta.converged = converged;
    if (!converged) {
        result.solution.meta.warnings.push_back("z-iteration did not reach tol " +
                                                format_number(settings.tol) + " in " +
                                                std::to_string(settings.max_iter) + " iterations");
    }
    result.diagnostics = builder.take();
    result.envelope_check = check_step_ratios(result.diagnostics, settings.slack);
    if (!result.envelope_check.pass) {
        result.solution.meta.warnings.push_back("envelope exceeded beyond slack: " +
                                                result.envelope_check.detail);
    }
    return result;
}

PicardResult solve_picard_y(const BoundModel& model, const RegressionPlan& plan,
                            const WeightContext& weights, const WeightParams& params,
                            const PicardSettings& settings) {
    if (!(settings.tol > 0.0)) throw std::invalid_argument("solve_picard_y: tol must be > 0");
    if (settings.max_iter < 1) throw std::invalid_argument("solve_picard_y: max_iter must be >= 1");
    const TimeGrid& grid = plan.ensemble().grid();
    const std::size_t paths = plan.ensemble().num_paths();
    const std::size_t nodes = grid.num_nodes();
    const std::size_t d = model.dim_y();
    const std::size_t dk = d * model.dim_w();

    const bool a1 = weights.variant == Variant::A1;
    const SchemeKind scheme = a1 ? SchemeKind::y_picard_a1 : SchemeKind::y_picard_a2;
    const double rate = a1 ? params.beta1() : constants::kappa(params.beta1_bar(), params.beta2_bar());
    DiagnosticsBuilder builder(scheme, rate, weights.weight, grid, &weights.alpha.values,
                               settings.noise, plan.exec());

    PicardSettings inner = settings;
    inner.tol = settings.inner_tol;
    inner.max_iter = settings.inner_max_iter;

    Iterate previous{PathField(paths, nodes, d), PathField(paths, nodes, dk)};
    std::vector<std::string> warnings;
    bool converged = false;
    int inner_total = 0;
    int n = 0;
    for (n = 1; n <= settings.max_iter; ++n) {
        PicardResult step = solve_picard_z(model, previous.y, plan, weights, params, inner,
                                           settings.warm_start ? &previous.z : nullptr);
        inner_total += step.solution.meta.iterations;
        if (!step.solution.meta.converged) {
            warnings.push_back("outer iteration " + std::to_string(n) + ": " +
                               step.solution.meta.warnings.front());
        }
        Iterate next{std::move(step.solution.y), std::move(step.solution.z)};
        const IterationRecord& rec = builder.add(previous, next);
        previous = std::move(next);
        if (rec.active < settings.tol || !model.depends_on_y()) {
            converged = true;
            break;
        }
    }
    n = std::min(n, settings.max_iter);

    PicardResult result;
    result.solution.grid = grid;
    result.solution.y = std::move(previous.y);
    result.solution.z = std::move(previous.z);
    result.solution.meta.scheme = a1 ? "picard_y_A1" : "picard_y_A2";
    result.solution.meta.iterations = n;
    result.solution.meta.inner_iterations = inner_total;
    result.solution.meta.seed = plan.ensemble().seed();
    result.solution.meta.converged = converged;
    result.solution.meta.warnings = std::move(warnings);
    if (!converged) {
        result.solution.meta.warnings.push_back("y-iteration did not reach tol " +
                                                format_number(settings.tol) + " in " +
                                                std::to_string(settings.max_iter) + " iterations");
    }
    result.diagnostics = builder.take();
    result.envelope_check = check_step_ratios(result.diagnostics, settings.slack);
    if (!result.envelope_check.pass) {
        result.solution.meta.warnings.push_back("envelope exceeded beyond slack: " +
                                                result.envelope_check.detail);
    }
    return result;
}

EstimateChain frozen_estimate_chain(const BoundModel& model, const PathField& phi,
                                    const PathField& psi, const WeightContext& weights,
                                    const WeightParams& params) {
    const BrownianEnsemble& ensemble = model.ensemble();
    const TimeGrid& grid = ensemble.grid();
    const std::size_t paths = ensemble.num_paths();
    const std::size_t nodes = grid.num_nodes();
    const std::size_t d = model.dim_y();
    const std::size_t dk = d * model.dim_w();
    require_shape(phi, paths, nodes, "estimate chain phi");
    require_shape(psi, paths, nodes, "estimate chain psi");
    if (dk > kMaxWidth) throw std::invalid_argument("estimate chain: d*k exceeds 64");

    std::vector<double> node_weight(nodes, 0.0);
    for (std::size_t i = 0; i + 1 < nodes; ++i) {
        node_weight[i] += 0.5 * grid.dt(i);
        node_weight[i + 1] += 0.5 * grid.dt(i);
    }
    const bool a1 = weights.variant == Variant::A1;
    const PathField& alpha = weights.alpha.values;

    // Per path: |int f ds|^2, int p^{-1} alpha, int p|f|^2/alpha, and the three
    // bound integrals int p|phi|^2 (times alpha for A2), int p|psi|^2,
    // int p|f0|^2/alpha.
    std::vector<double> drift(paths), inv_mass(paths), weighted(paths), phi_int(paths),
        psi_int(paths), f0_int(paths);
    kernels::for_each(Execution::parallel, paths, [&](std::size_t p) {
        double f[kMaxWidth], f0[kMaxWidth], zeros[kMaxWidth] = {};
        double integral[kMaxWidth] = {};
        double im = 0, wg = 0, ph = 0, ps = 0, fz = 0;
        for (std::size_t i = 0; i < nodes; ++i) {
            const double w = node_weight[i];
            const double pw = weights.weight.p(p, i);
            const double a = alpha(p, i);
            model.generator(i, p, phi.at(p, i), psi.at(p, i), {f, d});
            model.generator(i, p, {zeros, d}, {zeros, dk}, {f0, d});
            double fsq = 0, f0sq = 0, phisq = 0, psisq = 0;
            for (std::size_t j = 0; j < d; ++j) {
                integral[j] += w * f[j];
                fsq += f[j] * f[j];
                f0sq += f0[j] * f0[j];
                phisq += phi(p, i, j) * phi(p, i, j);
            }
            for (std::size_t c = 0; c < dk; ++c) psisq += psi(p, i, c) * psi(p, i, c);
            im += w * a / pw;
            wg += w * pw * fsq / a;
            ph += w * pw * phisq * (a1 ? 1.0 : a);
            ps += w * pw * psisq;
            fz += w * pw * f0sq / a;
        }
        double sq = 0;
        for (std::size_t j = 0; j < d; ++j) sq += integral[j] * integral[j];
        drift[p] = sq;
        inv_mass[p] = im;
        weighted[p] = wg;
        phi_int[p] = ph;
        psi_int[p] = ps;
        f0_int[p] = fz;
    });

    const auto mean = [&](const std::vector<double>& v) {
        return mean_estimate(v, Execution::parallel).value;
    };
    std::vector<double> cs(paths);
    for (std::size_t p = 0; p < paths; ++p) cs[p] = inv_mass[p] * weighted[p];

    EstimateChain chain;
    chain.drift_square = mean(drift);
    chain.cauchy_schwarz = mean(cs);
    chain.inverse_weight_mass = *std::max_element(inv_mass.begin(), inv_mass.end());
    chain.weighted_generator = mean(weighted);
    if (a1) {
        chain.bound = 3.0 / params.beta1() * mean(phi_int) + 3.0 / params.beta2() * mean(psi_int) +
                      3.0 * mean(f0_int);
    } else {
        const double b1 = params.beta1_bar();
        chain.bound = 3.0 / (b1 * b1) * mean(phi_int) + 3.0 / params.beta2_bar() * mean(psi_int) +
                      3.0 * mean(f0_int);
    }
    constexpr double rel = 1e-12;
    chain.holds = chain.drift_square <= chain.cauchy_schwarz * (1 + rel) + 1e-300 &&
                  chain.cauchy_schwarz <=
                      std::max(1.0, chain.inverse_weight_mass) * chain.weighted_generator * (1 + rel) + 1e-300 &&
                  chain.weighted_generator <= chain.bound * (1 + rel) + 1e-300;
    return chain;
}

void write_solution_table(std::ostream& out, const SolutionEnsemble& solution,
                          std::size_t max_paths) {
    std::vector<std::string> columns{"path", "node", "t"};
    for (std::size_t j = 0; j < solution.y.width(); ++j) columns.push_back("y_" + std::to_string(j));
    for (std::size_t c = 0; c < solution.z.width(); ++c) columns.push_back("z_" + std::to_string(c));
    TableWriter table(out, columns);
    const std::size_t paths = std::min(max_paths, solution.y.paths());
    std::vector<std::string> cells;
    for (std::size_t p = 0; p < paths; ++p) {
        for (std::size_t i = 0; i < solution.y.nodes(); ++i) {
            cells.clear();
            cells.push_back(std::to_string(p));
            cells.push_back(std::to_string(i));
            cells.push_back(format_number(solution.grid.t(i)));
            for (double v : solution.y.at(p, i)) cells.push_back(format_number(v));
            for (double v : solution.z.at(p, i)) cells.push_back(format_number(v));
            table.row(cells);
        }
    }
}

}  // namespace ubsde
