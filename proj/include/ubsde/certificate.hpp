#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ubsde/coefficient.hpp"
#include "ubsde/grid.hpp"
#include "ubsde/model.hpp"
#include "ubsde/weights.hpp"

namespace ubsde {

enum class Verdict { evidence_pass, evidence_fail, inconclusive };

std::string to_string(Verdict v);

// Monte-Carlo budget of a certificate run. The paths form `batches`
// independent blocks; growth level j takes the first base_paths * 2^j paths of
// every block and reports the median of the block means, which stays stable
// for finite moments and grows for heavy tails.
struct CertificateBudget {
    std::size_t base_paths = 250;
    int doublings = 6;                 // must be >= 3
    std::size_t batches = 5;           // odd
    std::size_t probes = 10000;        // Lipschitz probes, must be >= 10^4
    double probe_radius = 10.0;        // half the probes uniform in [-r, r]
    double cauchy_scale = 1.0;         // the other half Cauchy distributed
    double growth_threshold = 1.5;     // per-doubling growth factor signalling divergence
    double lipschitz_tolerance = 1e-9; // allowed relative excess of the Lipschitz ratio
    double alpha_floor = 1e-12;        // lower clamp of alpha in condition (iii)
    double log_weight_cap = kDefaultLogWeightCap;

    void validate() const;
};

// One moment estimate per sample level.
struct GrowthSeries {
    std::vector<std::size_t> paths;  // pooled paths at the level
    std::vector<MonteCarloEstimate> estimates;
    double growth_factor = 1.0;  // (last / first)^(1 / doublings)
    bool diverging = false;
    bool unstable = false;       // factor outside [1/sqrt(threshold), sqrt(threshold)], not diverging
};

struct CertificateReport {
    Variant variant = Variant::A1;
    std::string model;
    WeightParams params{2.0, 2.0, 5.0, 2250.0};
    MonteCarloEstimate estimate_terminal;  // E p(T) |xi|^2 over all paths
    MonteCarloEstimate estimate_f0;        // E int p |f(t,0,0)|^2 / alpha dt over all paths
    std::size_t probes = 0;
    std::size_t lipschitz_violations = 0;
    double worst_ratio = 0.0;              // max |f1-f2| / (c1|y1-y2| + c2|z1-z2|)
    GrowthSeries growth_terminal;
    GrowthSeries growth_f0;
    Verdict verdict = Verdict::inconclusive;
    std::vector<std::string> reasons;
};

// Checks conditions (i)-(iii) of the chosen variant on one ensemble of
// batches * base_paths * 2^doublings paths drawn from seed:
//   (i)   E p(T) |xi|^2
//   (ii)  |f(t,y1,z1) - f(t,y2,z2)| <= c1 |y1-y2| + c2 |z1-z2| on random probes
//   (iii) E int p |f(t,0,0)|^2 / alpha dt
// Verdict: evidence_fail on any probe violation or a diverging moment series
// (per-doubling growth factor above threshold); inconclusive when a series is
// unstable; evidence_pass otherwise.
CertificateReport check_conditions(const BSDEModel& model, Variant variant,
                                   const WeightParams& params, const CoefficientProcess& gamma,
                                   const TimeGrid& grid, const CertificateBudget& budget,
                                   std::uint64_t seed);

// Both certificates on one model with the same ensemble and probes.
struct VariantComparison {
    CertificateReport a1;
    CertificateReport a2;
    bool agree = false;
};

VariantComparison compare_variants(const BSDEModel& model, const WeightParams& params,
                                   const CoefficientProcess& gamma, const TimeGrid& grid,
                                   const CertificateBudget& budget, std::uint64_t seed);

// Grid search over (beta1, beta2) for A1 or (beta1_bar, beta2_bar) for A2;
// the other variant's pair is taken from base. Infeasible pairs are skipped. Rows come back in grid order; no optimality
// is claimed.
struct BetaSearchRow {
    double first = 0.0;
    double second = 0.0;
    Verdict verdict = Verdict::inconclusive;
    double estimate_terminal = 0.0;
    double estimate_f0 = 0.0;
};

std::vector<BetaSearchRow> search_beta(const BSDEModel& model, Variant variant,
                                       const WeightParams& base,
                                       const std::vector<double>& first_grid,
                                       const std::vector<double>& second_grid,
                                       const CoefficientProcess& gamma, const TimeGrid& grid,
                                       const CertificateBudget& budget, std::uint64_t seed);

// "key: value" lines with fixed field names.
void write_certificate(std::ostream& out, const CertificateReport& report);

// Columns: sample_paths, terminal, terminal_se, f0, f0_se.
void write_growth_table(std::ostream& out, const CertificateReport& report);

}  // namespace ubsde
