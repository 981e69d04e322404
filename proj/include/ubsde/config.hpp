#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ubsde/catalog.hpp"
#include "ubsde/certificate.hpp"
#include "ubsde/comparison.hpp"
#include "ubsde/constants.hpp"
#include "ubsde/picard.hpp"
#include "ubsde/regression.hpp"
#include "ubsde/weights.hpp"

namespace ubsde {

enum class ExperimentKind { solve, certify, contract, compare, bounds, table };

std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& text);

// Parse failure with line and key context where available.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ModelSpec {
    std::string name = "bounded";
    ParamMap params;
};

enum class SolveScheme { direct, picard_y, all };

std::string to_string(SolveScheme s);

// Experiment description; every field has a documented default (docs/config.md).
struct ExperimentConfig {
    std::optional<ExperimentKind> kind;  // [experiment] kind; the subcommand when absent
    std::string label = "experiment";

    ModelSpec model;
    std::size_t dim_w = 1;
    std::optional<ModelSpec> dominating;

    Variant variant = Variant::A1;
    WeightParams params{2.0, 4.0, 5.0, 2250.0};
    double gamma = 0.5;
    double log_weight_cap = kDefaultLogWeightCap;

    double horizon = 1.0;
    std::size_t steps = 50;

    std::size_t paths = 10000;
    std::uint64_t seed = 1;

    RegressionBasis basis;

    SolveScheme scheme = SolveScheme::all;
    PicardSettings picard;
    double oracle_rel_tol = 0.02;      // |y0 - oracle| / |oracle|
    double agreement_rel_tol = 1e-3;   // direct vs picard_y, ratio of weighted M2 norms

    CertificateBudget certificate;
    bool certify_both_variants = false;
    std::string certify_expect = "evidence-pass";  // or evidence-fail, inconclusive, any

    std::string contract_scheme = "z";  // z or y
    int contract_min_usable = 3;

    ComparisonSettings comparison;
    std::string compare_expect = "pass";  // or fail, any

    double bounds_tolerance = 1e-4;
    double bounds_lo = 1.0;
    double bounds_hi = 1e4;
    std::vector<double> bounds_betas{100.0, 446.0, 446.05, 447.0, 500.0, 1000.0};

    constants::ComparisonTableSpec table;

    std::string out_dir = "out";
    std::size_t max_paths = 20;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Resolved configuration in the same grammar, every key spelled out. Parsing
// the result yields an equal configuration; the run hash is taken over it.
std::string canonical_text(const ExperimentConfig& config);

// Derived stream seed for module `stream` under the master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace ubsde
