#include "ubsde/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ubsde/brownian.hpp"
#include "ubsde/kernels.hpp"
#include "ubsde/table.hpp"

namespace ubsde {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::evidence_pass: return "evidence-pass";
        case Verdict::evidence_fail: return "evidence-fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

void CertificateBudget::validate() const {
    if (base_paths < 2) throw std::invalid_argument("certificate: base_paths must be >= 2");
    if (doublings < 3) throw std::invalid_argument("certificate: doublings must be >= 3");
    if (doublings > 20) throw std::invalid_argument("certificate: doublings must be <= 20");
    if (batches < 1 || batches % 2 == 0) {
        throw std::invalid_argument("certificate: batches must be odd and >= 1");
    }
    if (probes < 10000) throw std::invalid_argument("certificate: probes must be >= 10000");
    if (!(probe_radius > 0.0)) throw std::invalid_argument("certificate: probe_radius must be > 0");
    if (!(cauchy_scale > 0.0)) throw std::invalid_argument("certificate: cauchy_scale must be > 0");
    if (!(growth_threshold > 1.0)) {
        throw std::invalid_argument("certificate: growth_threshold must be > 1");
    }
    if (!(lipschitz_tolerance >= 0.0)) {
        throw std::invalid_argument("certificate: lipschitz_tolerance must be >= 0");
    }
    if (!(alpha_floor > 0.0)) throw std::invalid_argument("certificate: alpha_floor must be > 0");
}

namespace {

constexpr std::uint64_t kProbeStream = 0x5bd1e9955bd1e995ULL;
constexpr std::size_t kMaxWidth = 64;

GrowthSeries growth_series(const std::vector<double>& per_path, const CertificateBudget& budget) {
    // per_path holds `batches` blocks of base_paths * 2^doublings paths. Level j
    // uses the first base_paths * 2^j paths of every block; its value is the
    // median of the block means and its error the standard error of the pooled
    // level sample.
    GrowthSeries g;
    const std::size_t block = budget.base_paths << budget.doublings;
    const double inf = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= budget.doublings; ++j) {
        const std::size_t n = budget.base_paths << j;
        g.paths.push_back(n * budget.batches);
        std::vector<double> means;
        std::vector<double> pooled;
        bool finite = true;
        for (std::size_t b = 0; b < budget.batches; ++b) {
            std::span<const double> prefix(per_path.data() + b * block, n);
            finite = finite && std::all_of(prefix.begin(), prefix.end(),
                                           [](double v) { return std::isfinite(v); });
            if (!finite) break;
            means.push_back(mean_estimate(prefix, Execution::parallel).value);
            pooled.insert(pooled.end(), prefix.begin(), prefix.end());
        }
        if (!finite) {
            g.estimates.push_back({inf, inf});
            continue;
        }
        std::nth_element(means.begin(), means.begin() + means.size() / 2, means.end());
        const double median = means[means.size() / 2];
        g.estimates.push_back({median, mean_estimate(pooled, Execution::parallel).std_error});
    }
    const double first = g.estimates.front().value;
    const double last = g.estimates.back().value;
    if (!std::isfinite(last)) {
        g.growth_factor = std::numeric_limits<double>::infinity();
    } else if (first > 0.0) {
        g.growth_factor = std::pow(last / first, 1.0 / budget.doublings);
    } else {
        g.growth_factor = last > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
    }
    // A heavy tail can also show up as a collapse after an early outlier.
    const double soft = std::sqrt(budget.growth_threshold);
    g.diverging = g.growth_factor > budget.growth_threshold;
    g.unstable = !g.diverging && (g.growth_factor > soft || g.growth_factor < 1.0 / soft);
    return g;
}

MonteCarloEstimate pooled_estimate(const std::vector<double>& per_path) {
    for (double v : per_path) {
        if (!std::isfinite(v)) {
            const double inf = std::numeric_limits<double>::infinity();
            return {inf, inf};
        }
    }
    return mean_estimate(per_path, Execution::parallel);
}

double draw(std::mt19937_64& rng, bool heavy, const CertificateBudget& budget) {
    if (heavy) return std::cauchy_distribution<double>(0.0, budget.cauchy_scale)(rng);
    return std::uniform_real_distribution<double>(-budget.probe_radius, budget.probe_radius)(rng);
}

}  // namespace

CertificateReport check_conditions(const BSDEModel& model, Variant variant,
                                   const WeightParams& params, const CoefficientProcess& gamma,
                                   const TimeGrid& grid, const CertificateBudget& budget,
                                   std::uint64_t seed) {
    budget.validate();
    model.validate();
    const std::size_t d = model.dim_y;
    const std::size_t dk = d * model.dim_w;
    if (dk > kMaxWidth) throw std::invalid_argument("certificate: d*k exceeds 64");
    const std::size_t paths = (budget.base_paths << budget.doublings) * budget.batches;
    const BrownianEnsemble ensemble = sample_brownian(grid, paths, model.dim_w, seed);
    const BoundModel bound(model, ensemble);

    CertificateReport report;
    report.variant = variant;
    report.model = model.name;
    report.params = params;

    const std::string context = "certificate (" + to_string(variant) + ", model '" + model.name + "'): ";
    AlphaProcess alpha{variant, PathField{}};
    std::optional<WeightProcess> weight;
    try {
        alpha = eval_alpha(variant, bound.c1(), bound.c2(), gamma.sample(ensemble), params);
        weight.emplace(eval_weight(alpha, grid, budget.log_weight_cap));
    } catch (const std::overflow_error& e) {
        throw std::overflow_error(context + e.what());
    } catch (const std::domain_error& e) {
        throw std::domain_error(context + e.what());
    }

    const std::size_t nodes = grid.num_nodes();
    const std::size_t last = nodes - 1;
    std::vector<double> node_weight(nodes, 0.0);
    for (std::size_t i = 0; i < last; ++i) {
        node_weight[i] += 0.5 * grid.dt(i);
        node_weight[i + 1] += 0.5 * grid.dt(i);
    }

    std::vector<double> terminal(paths), f0(paths);
    kernels::for_each(Execution::parallel, paths, [&](std::size_t p) {
        double sq = 0.0;
        for (std::size_t j = 0; j < d; ++j) sq += bound.terminal()(p, 0, j) * bound.terminal()(p, 0, j);
        terminal[p] = weight->p(p, last) * sq;
        double zeros[kMaxWidth] = {};
        double f[kMaxWidth];
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes; ++i) {
            bound.generator(i, p, {zeros, d}, {zeros, dk}, {f, d});
            double fsq = 0.0;
            for (std::size_t j = 0; j < d; ++j) fsq += f[j] * f[j];
            acc += node_weight[i] * weight->p(p, i) * fsq /
                   std::max(alpha.values(p, i, 0), budget.alpha_floor);
        }
        f0[p] = acc;
    });
    report.growth_terminal = growth_series(terminal, budget);
    report.growth_f0 = growth_series(f0, budget);
    report.estimate_terminal = pooled_estimate(terminal);
    report.estimate_f0 = pooled_estimate(f0);

    // Lipschitz probes; probe i draws from its own stream so the outcome does
    // not depend on the thread split.
    report.probes = budget.probes;
    std::vector<double> ratios(budget.probes);
    std::vector<char> violated(budget.probes);
    kernels::for_each(Execution::parallel, budget.probes, [&](std::size_t i) {
        std::mt19937_64 rng(path_stream_seed(seed ^ kProbeStream, i));
        const bool heavy = i % 2 == 1;
        const std::size_t node = std::uniform_int_distribution<std::size_t>(0, last)(rng);
        const std::size_t path = std::uniform_int_distribution<std::size_t>(0, paths - 1)(rng);
        double y1[kMaxWidth], y2[kMaxWidth], z1[kMaxWidth], z2[kMaxWidth], f1[kMaxWidth], f2[kMaxWidth];
        for (std::size_t j = 0; j < d; ++j) {
            y1[j] = draw(rng, heavy, budget);
            y2[j] = draw(rng, heavy, budget);
        }
        for (std::size_t c = 0; c < dk; ++c) {
            z1[c] = draw(rng, heavy, budget);
            z2[c] = draw(rng, heavy, budget);
        }
        bound.generator(node, path, {y1, d}, {z1, dk}, {f1, d});
        bound.generator(node, path, {y2, d}, {z2, dk}, {f2, d});
        double num = 0, dy = 0, dz = 0, scale = 0;
        for (std::size_t j = 0; j < d; ++j) {
            num += (f1[j] - f2[j]) * (f1[j] - f2[j]);
            dy += (y1[j] - y2[j]) * (y1[j] - y2[j]);
            scale = std::max({scale, std::abs(f1[j]), std::abs(f2[j])});
        }
        for (std::size_t c = 0; c < dk; ++c) dz += (z1[c] - z2[c]) * (z1[c] - z2[c]);
        num = std::sqrt(num);
        const double den = bound.c1()(path, node, 0) * std::sqrt(dy) +
                           bound.c2()(path, node, 0) * std::sqrt(dz);
        if (den > 0.0) {
            ratios[i] = num / den;
        } else {
            ratios[i] = num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        }
        // Roundoff slack relative to the size of f.
        violated[i] = num > den * (1.0 + budget.lipschitz_tolerance) + 1e-12 * scale;
    });
    for (std::size_t i = 0; i < budget.probes; ++i) {
        report.lipschitz_violations += violated[i] ? 1 : 0;
        report.worst_ratio = std::max(report.worst_ratio, ratios[i]);
    }

    std::vector<std::string>& why = report.reasons;
    if (report.lipschitz_violations > 0) {
        why.push_back(std::to_string(report.lipschitz_violations) +
                      " Lipschitz probes exceed the declared moduli (worst ratio " +
                      format_number(report.worst_ratio) + ")");
    }
    const auto describe = [&](const char* name, const GrowthSeries& g) {
        if (g.diverging) {
            why.push_back(std::string(name) + " estimate grows by factor " +
                          format_number(g.growth_factor) + " per doubling");
        } else if (g.unstable) {
            why.push_back(std::string(name) + " estimate unstable (factor " +
                          format_number(g.growth_factor) + " per doubling)");
        }
    };
    describe("terminal moment (i)", report.growth_terminal);
    describe("generator moment (iii)", report.growth_f0);
    if (report.lipschitz_violations > 0 || report.growth_terminal.diverging ||
        report.growth_f0.diverging) {
        report.verdict = Verdict::evidence_fail;
    } else if (report.growth_terminal.unstable || report.growth_f0.unstable) {
        report.verdict = Verdict::inconclusive;
    } else {
        report.verdict = Verdict::evidence_pass;
    }
    return report;
}

VariantComparison compare_variants(const BSDEModel& model, const WeightParams& params,
                                   const CoefficientProcess& gamma, const TimeGrid& grid,
                                   const CertificateBudget& budget, std::uint64_t seed) {
    VariantComparison c;
    c.a1 = check_conditions(model, Variant::A1, params, gamma, grid, budget, seed);
    c.a2 = check_conditions(model, Variant::A2, params, gamma, grid, budget, seed);
    c.agree = c.a1.verdict == c.a2.verdict;
    return c;
}

std::vector<BetaSearchRow> search_beta(const BSDEModel& model, Variant variant,
                                       const WeightParams& base,
                                       const std::vector<double>& first_grid,
                                       const std::vector<double>& second_grid,
                                       const CoefficientProcess& gamma, const TimeGrid& grid,
                                       const CertificateBudget& budget, std::uint64_t seed) {
    std::vector<BetaSearchRow> rows;
    for (double a : first_grid) {
        for (double b : second_grid) {
            std::optional<WeightParams> params;
            try {
                params = variant == Variant::A1
                             ? WeightParams(a, b, base.beta1_bar(), base.beta2_bar())
                             : WeightParams(base.beta1(), base.beta2(), a, b);
            } catch (const std::invalid_argument&) {
                continue;
            }
            BetaSearchRow row{a, b, Verdict::evidence_fail, 0.0, 0.0};
            try {
                const CertificateReport r =
                    check_conditions(model, variant, *params, gamma, grid, budget, seed);
                row.verdict = r.verdict;
                row.estimate_terminal = r.estimate_terminal.value;
                row.estimate_f0 = r.estimate_f0.value;
            } catch (const std::overflow_error&) {
                row.estimate_terminal = std::numeric_limits<double>::infinity();
                row.estimate_f0 = std::numeric_limits<double>::infinity();
            }
            rows.push_back(row);
        }
    }
    return rows;
}

void write_certificate(std::ostream& out, const CertificateReport& r) {
    const auto series = [](const GrowthSeries& g) {
        std::string s;
        for (std::size_t j = 0; j < g.estimates.size(); ++j) {
            s += (j ? "," : "") + format_number(g.estimates[j].value);
        }
        return s;
    };
    out << "variant: " << to_string(r.variant) << "\n";
    out << "model: " << r.model << "\n";
    out << "beta1: " << format_number(r.params.beta1()) << "\n";
    out << "beta2: " << format_number(r.params.beta2()) << "\n";
    out << "beta1_bar: " << format_number(r.params.beta1_bar()) << "\n";
    out << "beta2_bar: " << format_number(r.params.beta2_bar()) << "\n";
    out << "estimate_terminal: " << format_number(r.estimate_terminal.value) << "\n";
    out << "estimate_terminal_se: " << format_number(r.estimate_terminal.std_error) << "\n";
    out << "estimate_f0: " << format_number(r.estimate_f0.value) << "\n";
    out << "estimate_f0_se: " << format_number(r.estimate_f0.std_error) << "\n";
    out << "probes: " << r.probes << "\n";
    out << "lipschitz_violations: " << r.lipschitz_violations << "\n";
    out << "worst_ratio: " << format_number(r.worst_ratio) << "\n";
    out << "growth_terminal: " << series(r.growth_terminal) << "\n";
    out << "growth_terminal_factor: " << format_number(r.growth_terminal.growth_factor) << "\n";
    out << "growth_f0: " << series(r.growth_f0) << "\n";
    out << "growth_f0_factor: " << format_number(r.growth_f0.growth_factor) << "\n";
    out << "verdict: " << to_string(r.verdict) << "\n";
    std::string reasons;
    for (std::size_t i = 0; i < r.reasons.size(); ++i) reasons += (i ? "; " : "") + r.reasons[i];
    out << "reasons: " << (reasons.empty() ? "none" : reasons) << "\n";
}

void write_growth_table(std::ostream& out, const CertificateReport& r) {
    TableWriter table(out, {"sample_paths", "terminal", "terminal_se", "f0", "f0_se"});
    for (std::size_t j = 0; j < r.growth_terminal.paths.size(); ++j) {
        const auto& t = r.growth_terminal.estimates[j];
        const auto& f = r.growth_f0.estimates[j];
        table.row(r.growth_terminal.paths[j], t.value, t.std_error, f.value, f.std_error);
    }
}

}  // namespace ubsde
