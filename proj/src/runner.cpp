#include "ubsde/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ubsde/catalog.hpp"
#include "ubsde/certificate.hpp"
#include "ubsde/comparison.hpp"
#include "ubsde/constants.hpp"
#include "ubsde/diagnostics.hpp"
#include "ubsde/oracle.hpp"
#include "ubsde/picard.hpp"
#include "ubsde/table.hpp"

#ifndef UBSDE_VERSION
#define UBSDE_VERSION "0.0.0"
#endif

namespace ubsde {

const char* version_string() { return UBSDE_VERSION; }

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

int exit_code(const RunManifest& m) {
    if (m.status == "error") return 2;
    for (const auto& c : m.checks) {
        if (!c.pass) return 1;
    }
    return 0;
}

std::string manifest_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["kind"] = m.kind;
    j["label"] = m.label;
    j["config_hash"] = m.config_hash;
    j["seed"] = m.seed;
    j["version"] = m.version;
    j["wall_seconds"] = m.wall_seconds;
    j["timings"] = nlohmann::ordered_json::array();
    for (const auto& [module, seconds] : m.timings) {
        j["timings"].push_back({{"module", module}, {"seconds", seconds}});
    }
    j["files"] = m.files;
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : m.checks) {
        j["checks"].push_back(
            {{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
    }
    j["status"] = m.status;
    j["error"] = m.error;
    return j.dump(2) + "\n";
}

namespace {

using Clock = std::chrono::steady_clock;

class Run {
public:
    Run(const ExperimentConfig& config, ExperimentKind kind, const RunOptions& options,
        RunManifest& manifest)
        : config_(config), kind_(kind), options_(options), manifest_(manifest),
          dir_(config.out_dir) {}

    template <class F>
    auto timed(const std::string& module, F&& fn) {
        const auto start = Clock::now();
        auto result = fn();
        const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
        manifest_.timings.emplace_back(module, seconds);
        log(module + " done (" + format_number(std::round(seconds * 1000.0) / 1000.0) + " s)");
        return result;
    }

    void log(const std::string& line) const {
        if (!options_.quiet && options_.log) {
            *options_.log << "[" << to_string(kind_) << "] " << line << "\n";
        }
    }

    void file(const std::string& name, const std::string& content) {
        write_file_atomic((dir_ / name).string(), content);
        manifest_.files.push_back(name);
    }

    template <class Writer>
    void table(const std::string& name, Writer&& writer) {
        std::ostringstream out;
        writer(out);
        file(name, out.str());
    }

    void check(const std::string& name, double value, double threshold, bool pass) {
        manifest_.checks.push_back({name, value, threshold, pass});
        log("check " + name + ": " + (pass ? "pass" : "FAIL") + " (value " + format_number(value) +
            ", threshold " + format_number(threshold) + ")");
    }

    void write_checks() {
        table("checks.tsv", [&](std::ostream& out) {
            TableWriter t(out, {"check", "value", "threshold", "pass"});
            for (const auto& c : manifest_.checks) t.row(c.name, c.value, c.threshold, c.pass);
        });
    }

    void dispatch() {
        switch (kind_) {
            case ExperimentKind::solve: solve(); break;
            case ExperimentKind::certify: certify(); break;
            case ExperimentKind::contract: contract(); break;
            case ExperimentKind::compare: compare(); break;
            case ExperimentKind::bounds: bounds(); break;
            case ExperimentKind::table: conditions_table(); break;
        }
    }

private:
    TimeGrid grid() const { return make_grid(config_.horizon, config_.steps); }
    CoefficientProcess gamma() const { return CoefficientProcess::constant(config_.gamma); }
    BSDEModel model() const {
        return make_catalog_model(config_.model.name, config_.model.params, config_.dim_w);
    }

    static double y0_mean(const SolutionEnsemble& s) {
        std::vector<double> v(s.y.paths());
        for (std::size_t p = 0; p < v.size(); ++p) v[p] = s.y(p, 0, 0);
        return mean_estimate(v, Execution::parallel).value;
    }

    static PathField difference(const PathField& a, const PathField& b) {
        PathField out(a.paths(), a.nodes(), a.width());
        for (std::size_t i = 0; i < out.raw().size(); ++i) out.raw()[i] = a.raw()[i] - b.raw()[i];
        return out;
    }

    void solve() {
        const TimeGrid g = grid();
        const BrownianEnsemble ens = timed("ensemble", [&] {
            return sample_brownian(g, config_.paths, config_.dim_w, config_.seed);
        });
        const BSDEModel m = model();
        const BoundModel bound(m, ens);
        const RegressionPlan plan =
            timed("regression_plan", [&] { return RegressionPlan(ens, config_.basis); });
        const WeightContext weights = make_weight_context(bound, config_.variant, config_.params,
                                                          gamma(), config_.log_weight_cap);

        std::vector<std::pair<std::string, SolutionEnsemble>> solutions;
        if (config_.scheme != SolveScheme::picard_y) {
            solutions.emplace_back("direct", timed("solve_direct", [&] { return solve_direct(bound, plan); }));
        }
        if (config_.scheme != SolveScheme::direct) {
            PicardResult r = timed("solve_picard_y", [&] {
                return solve_picard_y(bound, plan, weights, config_.params, config_.picard);
            });
            table("diagnostics_picard_y.tsv",
                  [&](std::ostream& out) { write_diagnostics_table(out, r.diagnostics); });
            table("log_series_picard_y.tsv",
                  [&](std::ostream& out) { write_log_series(out, r.diagnostics); });
            check("converged_picard_y", r.solution.meta.iterations, config_.picard.max_iter,
                  r.solution.meta.converged);
            for (const auto& w : r.solution.meta.warnings) log("warning: " + w);
            solutions.emplace_back("picard_y", std::move(r.solution));
        }

        std::optional<SolutionEnsemble> oracle;
        if (has_linear_oracle(m)) {
            oracle = timed("oracle", [&] { return linear_analytic_solution(m, ens); });
        }
        const double nan = std::numeric_limits<double>::quiet_NaN();
        std::ostringstream summary;
        TableWriter t(summary, {"scheme", "y0", "y0_se", "iterations", "inner_iterations",
                                "converged", "oracle_y0", "rel_error_y0", "m2_error"});
        const std::size_t last = g.num_nodes() - 1;
        for (const auto& [name, s] : solutions) {
            table("solution_" + name + ".tsv",
                  [&](std::ostream& out) { write_solution_table(out, s, config_.max_paths); });
            std::vector<double> y0(s.y.paths());
            double terminal_gap = 0.0;
            for (std::size_t p = 0; p < y0.size(); ++p) {
                y0[p] = s.y(p, 0, 0);
                for (std::size_t j = 0; j < s.y.width(); ++j) {
                    terminal_gap = std::max(terminal_gap, std::abs(s.y(p, last, j) - bound.terminal()(p, 0, j)));
                }
            }
            check("terminal_consistency_" + name, terminal_gap, 0.0, terminal_gap == 0.0);
            const MonteCarloEstimate e = mean_estimate(y0, Execution::parallel);
            double oracle_y0 = nan, rel = nan, m2 = nan;
            if (oracle) {
                oracle_y0 = y0_mean(*oracle);
                rel = std::abs(e.value - oracle_y0) / (oracle_y0 != 0.0 ? std::abs(oracle_y0) : 1.0);
                m2 = weighted_m2_norm(difference(s.y, oracle->y), weights.weight, g).value;
                check("oracle_rel_error_" + name, rel, config_.oracle_rel_tol, rel < config_.oracle_rel_tol);
            }
            t.row(name, e.value, e.std_error, s.meta.iterations, s.meta.inner_iterations,
                  s.meta.converged, oracle_y0, rel, m2);
        }
        if (oracle) {
            t.row(std::string("oracle"), y0_mean(*oracle), 0.0, 0, 0, true, y0_mean(*oracle), 0.0, 0.0);
        }
        file("solve_summary.tsv", summary.str());
        if (solutions.size() == 2) {
            const double diff = weighted_m2_norm(difference(solutions[0].second.y, solutions[1].second.y),
                                                 weights.weight, g)
                                    .value;
            const double scale = weighted_m2_norm(solutions[1].second.y, weights.weight, g).value;
            const double ratio = scale > 0.0 ? diff / scale : diff;
            check("agreement_direct_picard_y", ratio, config_.agreement_rel_tol,
                  ratio <= config_.agreement_rel_tol);
        }
    }

    void certify() {
        const TimeGrid g = grid();
        const BSDEModel m = model();
        const std::uint64_t seed = derive_seed(config_.seed, 1);
        std::vector<CertificateReport> reports;
        if (config_.certify_both_variants) {
            VariantComparison c = timed("certificate", [&] {
                return compare_variants(m, config_.params, gamma(), g, config_.certificate, seed);
            });
            reports = {c.a1, c.a2};
            table("variants.tsv", [&](std::ostream& out) {
                TableWriter t(out, {"variant", "verdict", "estimate_terminal", "estimate_f0",
                                    "lipschitz_violations", "worst_ratio"});
                for (const auto& r : reports) {
                    t.row(to_string(r.variant), to_string(r.verdict), r.estimate_terminal.value,
                          r.estimate_f0.value, r.lipschitz_violations, r.worst_ratio);
                }
            });
        } else {
            reports.push_back(timed("certificate", [&] {
                return check_conditions(m, config_.variant, config_.params, gamma(), g,
                                        config_.certificate, seed);
            }));
        }
        for (const auto& r : reports) {
            const std::string v = to_string(r.variant);
            table("certificate_" + v + ".txt", [&](std::ostream& out) { write_certificate(out, r); });
            table("growth_" + v + ".tsv", [&](std::ostream& out) { write_growth_table(out, r); });
            const auto code = [](const std::string& verdict) {
                return verdict == "evidence-pass" ? 0.0 : verdict == "evidence-fail" ? 1.0
                       : verdict == "inconclusive"  ? 2.0 : -1.0;
            };
            const double got = code(to_string(r.verdict));
            const double want = code(config_.certify_expect);
            check("certificate_" + v, got, want, want < 0.0 || got == want);
        }
    }

    void contract() {
        const TimeGrid g = grid();
        const BrownianEnsemble ens = timed("ensemble", [&] {
            return sample_brownian(g, config_.paths, config_.dim_w, config_.seed);
        });
        const BoundModel bound(model(), ens);
        const RegressionPlan plan =
            timed("regression_plan", [&] { return RegressionPlan(ens, config_.basis); });
        const WeightContext weights = make_weight_context(bound, config_.variant, config_.params,
                                                          gamma(), config_.log_weight_cap);
        PicardResult r = timed("iteration", [&] {
            if (config_.contract_scheme == "z") {
                const PathField phi(ens.num_paths(), g.num_nodes(), bound.dim_y());
                return solve_picard_z(bound, phi, plan, weights, config_.params, config_.picard);
            }
            return solve_picard_y(bound, plan, weights, config_.params, config_.picard);
        });
        for (const auto& w : r.solution.meta.warnings) log("warning: " + w);
        table("diagnostics.tsv", [&](std::ostream& out) { write_diagnostics_table(out, r.diagnostics); });
        table("log_series.tsv", [&](std::ostream& out) { write_log_series(out, r.diagnostics); });

        const int usable = usable_count(r.diagnostics);
        check("usable_iterations", usable, config_.contract_min_usable,
              usable >= config_.contract_min_usable);
        const RatioCheck ratios = check_step_ratios(r.diagnostics, config_.picard.slack);
        check("step_ratios", ratios.worst, 1.0, ratios.pass);
        if (r.diagnostics.scheme == SchemeKind::y_picard_a1) {
            const RatioCheck mono = check_envelope_monotone(r.diagnostics);
            check("envelope_monotone", mono.worst, 1.0, mono.pass);
        } else {
            // Log-linear decay no slower than the per-step factor, additive slack 0.5.
            const double slope = log_decay_slope(r.diagnostics);
            const double bound_slope = std::log(r.diagnostics.step_factor(1)) + 0.5;
            check("log_slope", slope, bound_slope, std::isfinite(slope) && slope <= bound_slope);
        }
    }

    void compare() {
        if (!config_.dominating) {
            throw std::invalid_argument("compare needs a [dominating] section");
        }
        ComparisonCase c{model(),
                         make_catalog_model(config_.dominating->name, config_.dominating->params,
                                            config_.dim_w),
                         config_.variant, config_.params, gamma()};
        const ComparisonReport r = timed("comparison", [&] {
            return run_comparison(c, grid(), config_.paths, config_.seed, config_.basis,
                                  config_.comparison);
        });
        table("comparison.txt", [&](std::ostream& out) { write_comparison_report(out, r); });
        table("comparison_nodes.tsv", [&](std::ostream& out) { write_node_table(out, r); });
        const double want = config_.compare_expect == "pass" ? 1.0
                            : config_.compare_expect == "fail" ? 0.0 : -1.0;
        const double got = r.pass ? 1.0 : 0.0;
        check("comparison_verdict", got, want, want < 0.0 || got == want);
    }

    void bounds() {
        const double threshold = timed("bisection", [&] {
            return constants::kh_beta_threshold(config_.bounds_tolerance, config_.bounds_lo,
                                                config_.bounds_hi);
        });
        const double closed = constants::kh_beta_threshold_closed_form();
        const double u_star = (std::sqrt(13.0) - 3.0) / 6.0;
        table("bounds_threshold.tsv", [&](std::ostream& out) {
            TableWriter t(out, {"quantity", "value"});
            t.row(std::string("bisection_threshold"), threshold);
            t.row(std::string("closed_form_threshold"), closed);
            t.row(std::string("u_star"), u_star);
            t.row(std::string("tolerance"), config_.bounds_tolerance);
        });
        table("bounds.tsv", [&](std::ostream& out) {
            TableWriter t(out, {"beta", "k_prime", "k_tilde", "k_hat", "contraction_ratio", "feasible"});
            for (double beta : config_.bounds_betas) {
                const auto r = constants::kh_constants(beta);
                t.row(r.beta, r.k_prime, r.k_tilde, r.k_hat, r.contraction_ratio, r.feasible);
            }
        });
        check("threshold_vs_446.05", std::abs(threshold - 446.05), 0.01,
              std::abs(threshold - 446.05) < 0.01);
        check("threshold_vs_closed_form", std::abs(threshold - closed), 0.01,
              std::abs(threshold - closed) < 0.01);
        const auto above = constants::kh_constants(threshold);
        const auto below = constants::kh_constants(threshold - config_.bounds_tolerance);
        check("bisection_bracket", above.contraction_ratio, 1.0, above.feasible && !below.feasible);
    }

    void conditions_table() {
        const auto rows = timed("table", [&] { return constants::conditions_comparison_table(config_.table); });
        table("conditions_table.tsv",
              [&](std::ostream& out) { constants::write_comparison_table(out, rows); });
        for (const auto& row : rows) {
            const double boundary = constants::kappa(row.beta1_bar, row.min_beta2);
            check("kappa_boundary_" + format_number(row.beta1_bar), std::abs(boundary - 1.0), 1e-12,
                  std::abs(boundary - 1.0) < 1e-12);
            check("kappa_reference_" + format_number(row.beta1_bar), row.kappa_at_reference, 1.0,
                  row.kappa_at_reference < 1.0);
        }
    }

    const ExperimentConfig& config_;
    ExperimentKind kind_;
    const RunOptions& options_;
    RunManifest& manifest_;
    std::filesystem::path dir_;
};

}  // namespace

RunManifest run_experiment(const ExperimentConfig& config, ExperimentKind kind,
                           const RunOptions& options) {
    RunManifest manifest;
    manifest.kind = to_string(kind);
    manifest.label = config.label;
    manifest.seed = config.seed;
    manifest.version = version_string();
    const std::string canonical = canonical_text(config);
    manifest.config_hash = fnv1a_hex(canonical);

    std::filesystem::create_directories(config.out_dir);
    const auto start = Clock::now();
    Run run(config, kind, options, manifest);
    try {
        run.file("config.resolved.ini", canonical);
        run.dispatch();
        run.write_checks();
        manifest.status = exit_code(manifest) == 0 ? "ok" : "checks_failed";
    } catch (const std::exception& e) {
        manifest.status = "error";
        manifest.error = e.what();
        run.log(std::string("error: ") + e.what());
    }
    manifest.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    write_file_atomic((std::filesystem::path(config.out_dir) / "manifest.json").string(),
                      manifest_json(manifest));
    return manifest;
}

}  // namespace ubsde
