#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ubsde/certificate.hpp"
#include "ubsde/model.hpp"
#include "ubsde/picard.hpp"
#include "ubsde/regression.hpp"
#include "ubsde/weights.hpp"

namespace ubsde {

// Paired scalar BSDEs: the base pair (f, xi) and the dominating pair
// (fhat, xihat), solved on one shared ensemble with one regression basis.
struct ComparisonCase {
    BSDEModel base;
    BSDEModel dominating;
    Variant variant = Variant::A1;  // A1 for the fhat_1 pairing, A2 for fhat_2
    WeightParams params{2.0, 2.0, 5.0, 2250.0};
    CoefficientProcess gamma = CoefficientProcess::constant(0.5);

    void validate() const;  // d = 1 on both sides, same k
};

enum class ComparisonScheme { picard, direct };

struct ComparisonSettings {
    ComparisonScheme scheme = ComparisonScheme::picard;
    PicardSettings picard;
    std::size_t probes = 10000;
    double se_factor = 5.0;              // node tolerance = se_factor * SE(node) + tol_floor
    double tol_floor = 1e-12;            // absorbs roundoff when the difference is deterministic
    double max_violation_fraction = 1e-3;
    bool waive_preconditions = false;    // run even when a hypothesis fails
    bool require_base_certificate = true;
    CertificateBudget certificate;
};

struct PreconditionReport {
    std::size_t terminal_samples = 0;
    std::size_t terminal_failures = 0;
    double terminal_min_gap = 0.0;       // min over paths of xihat - xi
    std::size_t generator_probes = 0;
    std::size_t generator_failures = 0;
    double generator_min_gap = 0.0;      // min over probes of fhat - f
    std::vector<std::string> failures;   // first few, human readable
    bool pass = false;
};

// Samples xihat - xi on every path and fhat - f on random (node, path, y, z)
// probes. Failures are report content, not errors.
PreconditionReport verify_ordering_preconditions(const ComparisonCase& c,
                                                 const BrownianEnsemble& ensemble,
                                                 std::size_t probes, std::uint64_t seed);

struct NodeDifference {
    double t = 0.0;
    double mean = 0.0;  // mean of yhat - y over paths
    double se = 0.0;
    double min = 0.0;
    double tol = 0.0;
};

struct ComparisonReport {
    PreconditionReport preconditions;
    std::optional<CertificateReport> base_certificate;
    double min_difference = 0.0;        // min over (path, node) of yhat - y
    double violation_fraction = 0.0;    // share of samples with yhat - y < -tol(node)
    std::size_t samples = 0;
    // Y = y - yhat; the proof works with Y+ = 1[Y > 0] Y.
    double positive_part_mean = 0.0;    // E over samples of Y+
    double positive_part_max = 0.0;
    double positive_part_fraction = 0.0;
    double positive_part_m2 = 0.0;      // E int |Y+|^2 dt
    std::vector<NodeDifference> nodes;
    bool pass = false;
    std::vector<std::string> reasons;
};

// Solves both sides with identical settings. Unless waived, a failed
// hypothesis or an evidence-fail certificate of the base pair throws
// std::invalid_argument before any solve.
ComparisonReport run_comparison(const ComparisonCase& c, const TimeGrid& grid,
                                std::size_t paths, std::uint64_t seed,
                                const RegressionBasis& basis, const ComparisonSettings& settings);

// "key: value" lines with fixed field names.
void write_comparison_report(std::ostream& out, const ComparisonReport& report);

// Columns: node, t, mean_diff, se, min_diff, tol.
void write_node_table(std::ostream& out, const ComparisonReport& report);

}  // namespace ubsde
