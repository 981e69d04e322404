#include "ubsde/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ubsde/table.hpp"

namespace ubsde {

std::string to_string(SchemeKind s) {
    switch (s) {
        case SchemeKind::z_picard: return "z_picard";
        case SchemeKind::y_picard_a1: return "y_picard_A1";
        case SchemeKind::y_picard_a2: return "y_picard_A2";
    }
    return "unknown";
}

double IterationDiagnostics::step_factor(int n) const {
    switch (scheme) {
        case SchemeKind::z_picard: return 1.0 / rate;
        case SchemeKind::y_picard_a1: return 1.0 / (rate * static_cast<double>(n));
        case SchemeKind::y_picard_a2: return rate;
    }
    return 1.0;
}

namespace {

PathField difference(const PathField& a, const PathField& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("diagnostics: iterate shape mismatch");
    PathField out(a.paths(), a.nodes(), a.width());
    auto o = out.raw();
    auto x = a.raw();
    auto y = b.raw();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = x[i] - y[i];
    return out;
}

double envelope_for(const IterationDiagnostics& diag, int n, double first) {
    const double steps = static_cast<double>(n - 1);
    switch (diag.scheme) {
        case SchemeKind::z_picard: return first * std::pow(diag.rate, -steps);
        case SchemeKind::y_picard_a1:
            return first * std::pow(diag.rate, -steps) / std::tgamma(steps + 1.0);
        case SchemeKind::y_picard_a2: return first * std::pow(diag.rate, steps);
    }
    return first;
}

}  // namespace

DiagnosticsBuilder::DiagnosticsBuilder(SchemeKind scheme, double rate, const WeightProcess& weight,
                                       const TimeGrid& grid, const PathField* alpha,
                                       NoiseFloor noise, Execution exec)
    : weight_(weight), grid_(grid), alpha_(alpha), exec_(exec) {
    if (scheme == SchemeKind::y_picard_a2 && !alpha) {
        throw std::invalid_argument("diagnostics: the A2 y-scheme needs alpha for lambda_n");
    }
    diag_.scheme = scheme;
    diag_.rate = rate;
    diag_.noise = noise;
}

const IterationRecord& DiagnosticsBuilder::add(const Iterate& previous, const Iterate& current) {
    IterationRecord r;
    r.n = static_cast<int>(diag_.records.size()) + 1;
    const PathField dy = difference(current.y, previous.y);
    const PathField dz = difference(current.z, previous.z);
    r.eta = weighted_m2_norm(dy, weight_, grid_, exec_);
    r.mu = weighted_m2_norm(dz, weight_, grid_, exec_);
    r.nu = r.eta;
    if (alpha_) r.lambda = weighted_m2_norm(dy, weight_, grid_, exec_, alpha_);

    const MonteCarloEstimate& active = diag_.scheme == SchemeKind::z_picard   ? r.mu
                                       : diag_.scheme == SchemeKind::y_picard_a1 ? r.nu
                                                                                 : r.lambda;
    r.active = active.value;
    r.active_se = active.std_error;
    const double first = diag_.records.empty() ? r.active : diag_.records.front().active;
    r.envelope = envelope_for(diag_, r.n, first);
    if (r.envelope > 0.0) {
        r.ratio = r.active / r.envelope;
    } else {
        r.ratio = r.active > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    r.usable = r.active > 0.0 && r.active > diag_.noise.se_factor * r.active_se &&
               r.active > diag_.noise.roundoff_floor * first;
    diag_.records.push_back(r);
    return diag_.records.back();
}

IterationDiagnostics compute_diagnostics(std::span<const Iterate> iterates, SchemeKind scheme,
                                         double rate, const WeightProcess& weight,
                                         const TimeGrid& grid, const PathField* alpha,
                                         NoiseFloor noise, Execution exec) {
    if (iterates.size() < 2) {
        throw std::invalid_argument("compute_diagnostics: needs at least two iterates");
    }
    DiagnosticsBuilder builder(scheme, rate, weight, grid, alpha, noise, exec);
    for (std::size_t n = 1; n < iterates.size(); ++n) builder.add(iterates[n - 1], iterates[n]);
    return builder.take();
}

RatioCheck check_step_ratios(const IterationDiagnostics& diag, double slack) {
    RatioCheck check;
    std::ostringstream detail;
    for (std::size_t i = 0; i + 1 < diag.records.size(); ++i) {
        const auto& a = diag.records[i];
        const auto& b = diag.records[i + 1];
        if (!a.usable || !b.usable) continue;
        const double allowed = diag.step_factor(a.n) * slack;
        const double measured = b.active / a.active;
        const double rel = measured / allowed;
        ++check.pairs;
        check.worst = std::max(check.worst, rel);
        if (measured > allowed) {
            check.pass = false;
            detail << "n=" << a.n << "->" << b.n << ": ratio " << measured << " > allowed "
                   << allowed << "; ";
        }
    }
    check.detail = detail.str();
    return check;
}

RatioCheck check_envelope_monotone(const IterationDiagnostics& diag) {
    RatioCheck check;
    std::ostringstream detail;
    for (std::size_t i = 0; i + 1 < diag.records.size(); ++i) {
        const auto& a = diag.records[i];
        const auto& b = diag.records[i + 1];
        if (!a.usable || !b.usable) continue;
        ++check.pairs;
        const double rel = a.ratio > 0.0 ? b.ratio / a.ratio : 0.0;
        check.worst = std::max(check.worst, rel);
        if (b.ratio > a.ratio) {
            check.pass = false;
            detail << "n=" << a.n << "->" << b.n << ": envelope ratio rises " << a.ratio << " -> "
                   << b.ratio << "; ";
        }
    }
    check.detail = detail.str();
    return check;
}

double log_decay_slope(const IterationDiagnostics& diag) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (const auto& r : diag.records) {
        if (!r.usable) continue;
        const double x = r.n;
        const double y = std::log(r.active);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count < 2) return std::numeric_limits<double>::quiet_NaN();
    const double c = count;
    return (c * sxy - sx * sy) / (c * sxx - sx * sx);
}

int usable_count(const IterationDiagnostics& diag) {
    int c = 0;
    for (const auto& r : diag.records) c += r.usable ? 1 : 0;
    return c;
}

void write_diagnostics_table(std::ostream& out, const IterationDiagnostics& diag) {
    TableWriter table(out, {"n", "eta", "eta_se", "mu", "mu_se", "nu", "nu_se", "lambda",
                            "lambda_se", "active", "active_se", "envelope", "ratio", "usable"});
    for (const auto& r : diag.records) {
        table.row(r.n, r.eta.value, r.eta.std_error, r.mu.value, r.mu.std_error, r.nu.value,
                  r.nu.std_error, r.lambda.value, r.lambda.std_error, r.active, r.active_se,
                  r.envelope, r.ratio, r.usable);
    }
}

void write_log_series(std::ostream& out, const IterationDiagnostics& diag) {
    TableWriter table(out, {"n", "log_active"});
    for (const auto& r : diag.records) {
        table.row(r.n, r.active > 0.0 ? std::log(r.active)
                                      : -std::numeric_limits<double>::infinity());
    }
}

}  // namespace ubsde
