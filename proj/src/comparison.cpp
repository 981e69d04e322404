#include "ubsde/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "ubsde/brownian.hpp"
#include "ubsde/table.hpp"

namespace ubsde {

namespace {

constexpr std::uint64_t kOrderingStream = 0xc2b2ae3d27d4eb4fULL;
constexpr std::size_t kMaxFailures = 8;
constexpr std::size_t kMaxWidth = 64;

}  // namespace

void ComparisonCase::validate() const {
    base.validate();
    dominating.validate();
    if (base.dim_y != 1 || dominating.dim_y != 1) {
        throw std::invalid_argument("comparison: both models must be scalar (d = 1)");
    }
    if (base.dim_w != dominating.dim_w) {
        throw std::invalid_argument("comparison: both models must share k");
    }
}

PreconditionReport verify_ordering_preconditions(const ComparisonCase& c,
                                                 const BrownianEnsemble& ensemble,
                                                 std::size_t probes, std::uint64_t seed) {
    c.validate();
    const BoundModel base(c.base, ensemble);
    const BoundModel dom(c.dominating, ensemble);
    const std::size_t paths = ensemble.num_paths();
    const std::size_t k = c.base.dim_w;
    if (k > kMaxWidth) throw std::invalid_argument("comparison: k exceeds 64");

    PreconditionReport r;
    r.terminal_samples = paths;
    r.terminal_min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < paths; ++p) {
        const double gap = dom.terminal()(p, 0, 0) - base.terminal()(p, 0, 0);
        r.terminal_min_gap = std::min(r.terminal_min_gap, gap);
        if (gap < 0.0) {
            ++r.terminal_failures;
            if (r.failures.size() < kMaxFailures) {
                r.failures.push_back("terminal: path " + std::to_string(p) + " xihat - xi = " +
                                     format_number(gap));
            }
        }
    }

    r.generator_probes = probes;
    r.generator_min_gap = probes ? std::numeric_limits<double>::infinity() : 0.0;
    const std::size_t last = ensemble.grid().num_nodes() - 1;
    for (std::size_t i = 0; i < probes; ++i) {
        std::mt19937_64 rng(path_stream_seed(seed ^ kOrderingStream, i));
        const std::size_t node = std::uniform_int_distribution<std::size_t>(0, last)(rng);
        const std::size_t path = std::uniform_int_distribution<std::size_t>(0, paths - 1)(rng);
        std::uniform_real_distribution<double> box(-10.0, 10.0);
        double y = box(rng);
        double z[kMaxWidth];
        for (std::size_t l = 0; l < k; ++l) z[l] = box(rng);
        double f = 0.0, fhat = 0.0;
        base.generator(node, path, {&y, 1}, {z, k}, {&f, 1});
        dom.generator(node, path, {&y, 1}, {z, k}, {&fhat, 1});
        const double gap = fhat - f;
        r.generator_min_gap = std::min(r.generator_min_gap, gap);
        if (gap < 0.0) {
            ++r.generator_failures;
            if (r.failures.size() < kMaxFailures) {
                r.failures.push_back("generator: node " + std::to_string(node) + ", path " +
                                     std::to_string(path) + ", y = " + format_number(y) +
                                     ": fhat - f = " + format_number(gap));
            }
        }
    }
    r.pass = r.terminal_failures == 0 && r.generator_failures == 0;
    return r;
}

ComparisonReport run_comparison(const ComparisonCase& c, const TimeGrid& grid, std::size_t paths,
                                std::uint64_t seed, const RegressionBasis& basis,
                                const ComparisonSettings& settings) {
    c.validate();
    const BrownianEnsemble ensemble = sample_brownian(grid, paths, c.base.dim_w, seed);

    ComparisonReport report;
    report.preconditions = verify_ordering_preconditions(c, ensemble, settings.probes, seed);
    if (!report.preconditions.pass) {
        std::string detail = report.preconditions.failures.empty()
                                 ? std::string()
                                 : " (" + report.preconditions.failures.front() + ")";
        if (!settings.waive_preconditions) {
            throw std::invalid_argument("comparison preconditions failed: xihat >= xi and fhat >= f "
                                        "must hold" + detail);
        }
        report.reasons.push_back("preconditions waived: " +
                                 std::to_string(report.preconditions.terminal_failures) +
                                 " terminal and " +
                                 std::to_string(report.preconditions.generator_failures) +
                                 " generator failures");
    }
    if (settings.require_base_certificate) {
        report.base_certificate = check_conditions(c.base, c.variant, c.params, c.gamma, grid,
                                                   settings.certificate, seed);
        const Verdict v = report.base_certificate->verdict;
        if (v == Verdict::evidence_fail && !settings.waive_preconditions) {
            throw std::invalid_argument("comparison: base pair fails the " + to_string(c.variant) +
                                        " certificate");
        }
        if (v != Verdict::evidence_pass) {
            report.reasons.push_back("base certificate " + to_string(v));
        }
    }

    const RegressionPlan plan(ensemble, basis);
    const BoundModel base(c.base, ensemble);
    const BoundModel dom(c.dominating, ensemble);
    const auto solve = [&](const BoundModel& m) {
        if (settings.scheme == ComparisonScheme::direct) return solve_direct(m, plan);
        const WeightContext w = make_weight_context(m, c.variant, c.params, c.gamma);
        return solve_picard_y(m, plan, w, c.params, settings.picard).solution;
    };
    const SolutionEnsemble y = solve(base);
    const SolutionEnsemble yhat = solve(dom);

    const std::size_t nodes = grid.num_nodes();
    report.samples = paths * nodes;
    report.min_difference = std::numeric_limits<double>::infinity();
    std::size_t violations = 0;
    std::size_t positive = 0;
    double positive_sum = 0.0;
    std::vector<double> diff(paths);
    std::vector<double> node_positive_sq(nodes, 0.0);
    bool within = true;
    for (std::size_t i = 0; i < nodes; ++i) {
        NodeDifference nd;
        nd.t = grid.t(i);
        nd.min = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < paths; ++p) {
            diff[p] = yhat.y(p, i, 0) - y.y(p, i, 0);
            nd.min = std::min(nd.min, diff[p]);
            const double big_y = -diff[p];
            if (big_y > 0.0) {
                ++positive;
                positive_sum += big_y;
                report.positive_part_max = std::max(report.positive_part_max, big_y);
                node_positive_sq[i] += big_y * big_y;
            }
        }
        const MonteCarloEstimate e = mean_estimate(diff, Execution::parallel);
        nd.mean = e.value;
        nd.se = e.std_error;
        nd.tol = settings.se_factor * nd.se + settings.tol_floor;
        for (std::size_t p = 0; p < paths; ++p) violations += diff[p] < -nd.tol ? 1 : 0;
        within = within && nd.min >= -nd.tol;
        report.min_difference = std::min(report.min_difference, nd.min);
        report.nodes.push_back(nd);
    }
    report.violation_fraction = static_cast<double>(violations) / static_cast<double>(report.samples);
    report.positive_part_mean = positive_sum / static_cast<double>(report.samples);
    report.positive_part_fraction = static_cast<double>(positive) / static_cast<double>(report.samples);
    for (std::size_t i = 0; i + 1 < nodes; ++i) {
        report.positive_part_m2 +=
            0.5 * grid.dt(i) * (node_positive_sq[i] + node_positive_sq[i + 1]) / static_cast<double>(paths);
    }

    const bool fraction_ok = report.violation_fraction <= settings.max_violation_fraction;
    if (!fraction_ok) {
        report.reasons.push_back("violation fraction " + format_number(report.violation_fraction) +
                                 " exceeds " + format_number(settings.max_violation_fraction));
    }
    if (!within) {
        report.reasons.push_back("min(yhat - y) = " + format_number(report.min_difference) +
                                 " below the node tolerance");
    }
    report.pass = fraction_ok && within;
    return report;
}

void write_comparison_report(std::ostream& out, const ComparisonReport& r) {
    const PreconditionReport& p = r.preconditions;
    out << "preconditions_pass: " << (p.pass ? "true" : "false") << "\n";
    out << "terminal_samples: " << p.terminal_samples << "\n";
    out << "terminal_failures: " << p.terminal_failures << "\n";
    out << "terminal_min_gap: " << format_number(p.terminal_min_gap) << "\n";
    out << "generator_probes: " << p.generator_probes << "\n";
    out << "generator_failures: " << p.generator_failures << "\n";
    out << "generator_min_gap: " << format_number(p.generator_min_gap) << "\n";
    out << "base_certificate: "
        << (r.base_certificate ? to_string(r.base_certificate->verdict) : std::string("skipped"))
        << "\n";
    out << "samples: " << r.samples << "\n";
    out << "min_difference: " << format_number(r.min_difference) << "\n";
    out << "violation_fraction: " << format_number(r.violation_fraction) << "\n";
    out << "positive_part_mean: " << format_number(r.positive_part_mean) << "\n";
    out << "positive_part_max: " << format_number(r.positive_part_max) << "\n";
    out << "positive_part_fraction: " << format_number(r.positive_part_fraction) << "\n";
    out << "positive_part_m2: " << format_number(r.positive_part_m2) << "\n";
    out << "verdict: " << (r.pass ? "pass" : "fail") << "\n";
    std::string reasons;
    for (std::size_t i = 0; i < r.reasons.size(); ++i) reasons += (i ? "; " : "") + r.reasons[i];
    out << "reasons: " << (reasons.empty() ? "none" : reasons) << "\n";
}

void write_node_table(std::ostream& out, const ComparisonReport& r) {
    TableWriter table(out, {"node", "t", "mean_diff", "se", "min_diff", "tol"});
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        const auto& n = r.nodes[i];
        table.row(i, n.t, n.mean, n.se, n.min, n.tol);
    }
}

}  // namespace ubsde
