#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ubsde/catalog.hpp"
#include "ubsde/certificate.hpp"
#include "ubsde/comparison.hpp"

using namespace ubsde;

namespace {

ComparisonCase drift_case(const ParamMap& dominating) {
    ComparisonCase c;
    c.base = make_catalog_model("martingale", {});
    c.dominating = make_catalog_model("martingale", dominating);
    c.params = WeightParams(2, 4, 5, 2250);
    return c;
}

CertificateBudget quick_budget() {
    CertificateBudget b;
    b.base_paths = 100;
    b.doublings = 3;
    return b;
}

}  // namespace

TEST_SUITE("comparison") {

TEST_CASE("preconditions: ordered and violated cases") {
    const auto e = sample_brownian(make_grid(1.0, 10), 500, 1, 1);
    const PreconditionReport ok = verify_ordering_preconditions(drift_case({{"drift_offset", 1.0}}), e, 1000, 2);
    CHECK(ok.pass);
    CHECK(ok.terminal_samples == 500);
    CHECK(ok.terminal_failures == 0);
    CHECK(ok.generator_probes == 1000);
    CHECK(ok.generator_min_gap == doctest::Approx(1.0));
    const PreconditionReport bad =
        verify_ordering_preconditions(drift_case({{"terminal_shift", -1.0}}), e, 1000, 2);
    CHECK_FALSE(bad.pass);
    CHECK(bad.terminal_failures == 500);
    CHECK(bad.terminal_min_gap == doctest::Approx(-1.0));
    CHECK_FALSE(bad.failures.empty());
}

TEST_CASE("run_comparison: drift pair mean gap equals T - t") {
    ComparisonSettings s;
    s.certificate = quick_budget();
    const TimeGrid g = make_grid(1.0, 10);
    const ComparisonReport r =
        run_comparison(drift_case({{"drift_offset", 1.0}}), g, 5000, 3, RegressionBasis::polynomial(3), s);
    CHECK(r.pass);
    REQUIRE(r.base_certificate.has_value());
    CHECK(r.base_certificate->verdict == Verdict::evidence_pass);
    REQUIRE(r.nodes.size() == 11);
    for (std::size_t i = 0; i < 11; ++i) {
        const auto& n = r.nodes[i];
        CHECK(std::abs(n.mean - (1.0 - g.t(i))) <= 3.0 * n.se + 1e-12);
        CHECK(n.min >= -n.tol);
    }
    CHECK(r.violation_fraction == 0.0);
    CHECK(r.positive_part_max <= 1e-9);
    CHECK(r.samples == 5000 * 11);
}

TEST_CASE("run_comparison: direct scheme also passes") {
    ComparisonSettings s;
    s.scheme = ComparisonScheme::direct;
    s.require_base_certificate = false;
    const ComparisonReport r = run_comparison(drift_case({{"drift_abs_w", 1.0}}), make_grid(1.0, 10),
                                              3000, 4, RegressionBasis::polynomial(3), s);
    CHECK(r.pass);
    CHECK_FALSE(r.base_certificate.has_value());
}

TEST_CASE("run_comparison: violated hypothesis throws unless waived, then fails") {
    ComparisonSettings s;
    s.require_base_certificate = false;
    const auto c = drift_case({{"terminal_shift", -1.0}});
    CHECK_THROWS_AS(run_comparison(c, make_grid(1.0, 10), 2000, 5, RegressionBasis::polynomial(3), s),
                    std::invalid_argument);
    s.waive_preconditions = true;
    const ComparisonReport r = run_comparison(c, make_grid(1.0, 10), 2000, 5, RegressionBasis::polynomial(3), s);
    CHECK_FALSE(r.pass);
    CHECK(r.min_difference == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(r.violation_fraction > 0.5);
    CHECK(r.positive_part_max == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_FALSE(r.reasons.empty());
}

TEST_CASE("run_comparison: base certificate failure blocks the run") {
    ComparisonCase c;
    c.base = make_catalog_model("lipschitz_violation", {});
    c.dominating = make_catalog_model("lipschitz_violation", {{"drift_offset", 1.0}});
    ComparisonSettings s;
    s.certificate = quick_budget();
    CHECK_THROWS_WITH_AS(run_comparison(c, make_grid(1.0, 10), 1000, 6, RegressionBasis::polynomial(3), s),
                         doctest::Contains("certificate"), std::invalid_argument);
}

TEST_CASE("ComparisonCase: dimension validation") {
    ComparisonCase c = drift_case({});
    c.dominating = make_catalog_model("martingale", {}, 2);
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("report writers: fixed keys and columns") {
    ComparisonSettings s;
    s.require_base_certificate = false;
    const ComparisonReport r = run_comparison(drift_case({{"drift_offset", 1.0}}), make_grid(1.0, 4),
                                              500, 7, RegressionBasis::polynomial(3), s);
    std::ostringstream text, table;
    write_comparison_report(text, r);
    write_node_table(table, r);
    for (const char* key : {"preconditions_pass:", "min_difference:", "violation_fraction:", "verdict: pass"})
        CHECK(text.str().find(key) != std::string::npos);
    CHECK(table.str().rfind("node\tt\tmean_diff\tse\tmin_diff\ttol\n", 0) == 0);
}

TEST_CASE("certificate: bounded passes, exp-square and Lipschitz violation fail") {
    const TimeGrid g = make_grid(1.0, 20);
    const CertificateBudget budget;
    const WeightParams params(2, 4, 5, 2250);
    const auto gamma = CoefficientProcess::constant(0.5);
    const VariantComparison b = compare_variants(make_catalog_model("bounded", {}), params, gamma, g, budget, 1);
    CHECK(b.a1.verdict == Verdict::evidence_pass);
    CHECK(b.a2.verdict == Verdict::evidence_pass);
    CHECK(b.agree);
    CHECK(b.a1.lipschitz_violations == 0);
    CHECK(b.a1.probes == budget.probes);

    const CertificateReport sq =
        check_conditions(make_catalog_model("exp_square_terminal", {}), Variant::A1, params, gamma, g, budget, 1);
    CHECK(sq.verdict == Verdict::evidence_fail);
    CHECK(sq.growth_terminal.diverging);
    CHECK(sq.lipschitz_violations == 0);

    const CertificateReport lv =
        check_conditions(make_catalog_model("lipschitz_violation", {}), Variant::A1, params, gamma, g, budget, 1);
    CHECK(lv.verdict == Verdict::evidence_fail);
    CHECK(lv.lipschitz_violations > 0);
    CHECK(lv.worst_ratio == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("certificate: growth series layout and determinism") {
    const TimeGrid g = make_grid(1.0, 10);
    const CertificateBudget b = quick_budget();
    const WeightParams params(2, 4, 5, 2250);
    const auto r1 = check_conditions(make_catalog_model("bounded", {}), Variant::A2, params,
                                     CoefficientProcess::constant(0.5), g, b, 9);
    const auto r2 = check_conditions(make_catalog_model("bounded", {}), Variant::A2, params,
                                     CoefficientProcess::constant(0.5), g, b, 9);
    REQUIRE(r1.growth_terminal.paths.size() == 4);
    CHECK(r1.growth_terminal.paths.front() == 5 * 100);
    CHECK(r1.growth_terminal.paths.back() == 5 * 800);
    std::ostringstream a, c;
    write_certificate(a, r1);
    write_certificate(c, r2);
    CHECK(a.str() == c.str());
    CHECK(a.str().find("verdict: evidence-pass") != std::string::npos);
    std::ostringstream t;
    write_growth_table(t, r1);
    CHECK(t.str().rfind("sample_paths\tterminal\tterminal_se\tf0\tf0_se\n", 0) == 0);
}

TEST_CASE("certificate: budget validation") {
    CertificateBudget b;
    b.doublings = 2;
    CHECK_THROWS(b.validate());
    b = {};
    b.batches = 4;
    CHECK_THROWS(b.validate());
    b = {};
    b.probes = 9999;
    CHECK_THROWS(b.validate());
    CHECK_NOTHROW(CertificateBudget{}.validate());
}

TEST_CASE("certificate: weight overflow is reported with context") {
    CertificateBudget b = quick_budget();
    const WeightParams params(2, 4, 5, 2250);
    CHECK_THROWS_AS(check_conditions(make_catalog_model("bounded", {{"c2", 1.0}}), Variant::A2, params,
                                     CoefficientProcess::constant(0.5), make_grid(1.0, 10), b, 1),
                    std::overflow_error);
}

TEST_CASE("search_beta: rows in grid order, infeasible pairs skipped") {
    CertificateBudget b = quick_budget();
    const auto rows = search_beta(make_catalog_model("bounded", {}), Variant::A2, WeightParams(2, 4, 5, 2250),
                                  {4.5, 5.0, 3.0}, {100.0, 2250.0}, CoefficientProcess::constant(0.5),
                                  make_grid(1.0, 10), b, 1);
    // min_beta2(4.5) = 428.6, min_beta2(5) = 250: (4.5,100), (5,100) and beta1_bar=3 are infeasible.
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].first == 4.5);
    CHECK(rows[0].second == 2250.0);
    CHECK(rows[1].first == 5.0);
    for (const auto& r : rows) CHECK(r.verdict == Verdict::evidence_pass);
}

}  // TEST_SUITE
