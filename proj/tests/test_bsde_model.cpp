#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "ubsde/catalog.hpp"
#include "ubsde/model.hpp"
#include "ubsde/oracle.hpp"
#include "ubsde/regression.hpp"

using namespace ubsde;

namespace {

BrownianEnsemble small_ensemble(std::size_t paths = 200, std::size_t k = 1) {
    return sample_brownian(make_grid(1.0, 10), paths, k, 42);
}

double f1(const BoundModel& m, std::size_t node, std::size_t path, double y, double z) {
    const double ya[1] = {y};
    const double za[1] = {z};
    return eval_generator(m, node, path, ya, za)[0];
}

}  // namespace

TEST_SUITE("bsde_model") {

TEST_CASE("generator kinds evaluate their formulas") {
    const auto e = small_ensemble();
    BSDEModel lin;
    lin.generator.body = Generator::Linear{CoefficientProcess::constant(-0.1, false),
                                           {CoefficientProcess::constant(2.0, false)},
                                           CoefficientProcess::constant(3.0, false)};
    lin.c1 = CoefficientProcess::constant(0.1);
    lin.c2 = CoefficientProcess::constant(2.0);
    const BoundModel bl(lin, e);
    CHECK(f1(bl, 3, 7, 2.0, 0.5) == doctest::Approx(-0.2 + 1.0 + 3.0));
    CHECK(bl.depends_on_y());
    CHECK(bl.depends_on_z());

    BSDEModel zero;
    const BoundModel bz(zero, e);
    CHECK(f1(bz, 0, 0, 5.0, 5.0) == 0.0);
    CHECK_FALSE(bz.depends_on_y());
    CHECK_FALSE(bz.depends_on_z());

    BSDEModel sc;
    sc.generator.body = Generator::SinClip{CoefficientProcess::constant(0.5),
                                           CoefficientProcess::constant(0.1), 1.0};
    sc.c1 = CoefficientProcess::constant(0.5);
    sc.c2 = CoefficientProcess::constant(0.1);
    const BoundModel bs(sc, e);
    CHECK(f1(bs, 1, 1, 1.0, 10.0) == doctest::Approx(0.5 * std::sin(1.0) + 0.1));
    CHECK(f1(bs, 1, 1, 0.0, -0.3) == doctest::Approx(-0.03));
}

TEST_CASE("terminal kinds") {
    const auto e = small_ensemble();
    const std::size_t last = e.grid().num_steps();
    const BoundModel mart(make_catalog_model("martingale", {{"intercept", 1.0}, {"slope", 2.0}}), e);
    const BoundModel sq(make_catalog_model("exp_square_terminal", {{"rate", 0.5}}), e);
    const BoundModel rmax(make_catalog_model("running_max", {{"scale", 1.0}}), e);
    for (std::size_t p = 0; p < e.num_paths(); ++p) {
        const double w = e.w(p, last);
        CHECK(mart.terminal()(p, 0) == doctest::Approx(1.0 + 2.0 * w));
        CHECK(sq.terminal()(p, 0) == doctest::Approx(std::exp(0.5 * w * w)));
        double m = 0.0;
        for (std::size_t i = 0; i <= last; ++i) m = std::max(m, e.w(p, i));
        CHECK(rmax.terminal()(p, 0) == m);
    }
}

TEST_CASE("model validation and dimension checks") {
    const auto e = small_ensemble();
    BSDEModel bad;
    bad.generator.body = Generator::Constant{{1.0, 2.0}};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    BSDEModel neg;
    neg.c1 = CoefficientProcess::constant(-1.0, false);
    CHECK_THROWS_AS(neg.validate(), std::invalid_argument);
    const BoundModel ok(make_catalog_model("bounded", {}), e);
    const double y[2] = {0.0, 0.0};
    const double z[1] = {0.0};
    CHECK_THROWS_AS(eval_generator(ok, 0, 0, std::span<const double>(y, 2), z), std::invalid_argument);
}

TEST_CASE("declared moduli bound the generator on random pairs") {
    const auto e = small_ensemble(300);
    for (const char* name : {"bounded", "unbounded", "ou_rate", "z_contraction", "linear_decay"}) {
        const BoundModel m(make_catalog_model(name, {}), e);
        std::uint64_t s = 1;
        auto next = [&s] {
            s = s * 6364136223846793005ULL + 1442695040888963407ULL;
            return static_cast<double>(s >> 11) / 9007199254740992.0 * 20.0 - 10.0;
        };
        for (int trial = 0; trial < 500; ++trial) {
            const std::size_t path = static_cast<std::size_t>(trial) % e.num_paths();
            const std::size_t node = static_cast<std::size_t>(trial) % e.grid().num_nodes();
            const double y1 = next(), y2 = next(), z1 = next(), z2 = next();
            const double lhs = std::abs(f1(m, node, path, y1, z1) - f1(m, node, path, y2, z2));
            const double rhs = m.c1()(path, node) * std::abs(y1 - y2) +
                               m.c2()(path, node) * std::abs(z1 - z2);
            CHECK(lhs <= rhs * (1.0 + 1e-12) + 1e-12);
        }
    }
}

TEST_CASE("catalog: every entry builds with defaults, errors list accepted names") {
    const auto e = small_ensemble(20);
    for (const auto& entry : model_catalog()) {
        CAPTURE(entry.name);
        const BSDEModel m = make_catalog_model(entry.name, {});
        CHECK_NOTHROW(m.validate());
        CHECK_NOTHROW(BoundModel(m, e));
    }
    CHECK_THROWS_WITH_AS(make_catalog_model("nope", {}), doctest::Contains("bounded"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(make_catalog_model("bounded", {{"bogus", 1.0}}),
                         doctest::Contains("c1"), std::invalid_argument);
    CHECK_NOTHROW(make_catalog_model("zero", {{"drift_offset", 1.0}, {"terminal_shift", 2.0}}));
}

TEST_CASE("catalog modifiers shift f and xi") {
    const auto e = small_ensemble(50);
    const BoundModel base(make_catalog_model("martingale", {}), e);
    const BoundModel shifted(
        make_catalog_model("martingale", {{"drift_offset", 1.5}, {"terminal_shift", 0.25}}), e);
    const BoundModel abs_w(make_catalog_model("martingale", {{"drift_abs_w", 2.0}}), e);
    for (std::size_t p = 0; p < 50; ++p) {
        CHECK(shifted.terminal()(p, 0) == doctest::Approx(base.terminal()(p, 0) + 0.25));
        CHECK(f1(shifted, 4, p, 0.0, 0.0) == doctest::Approx(1.5));
        CHECK(f1(abs_w, 4, p, 0.0, 0.0) == doctest::Approx(2.0 * std::abs(e.w(p, 4))));
    }
    CHECK_THROWS_WITH_AS(make_catalog_model("martingale", {{"drift_offset", 1.0}, {"drift_abs_w", 1.0}}),
                         doctest::Contains("cannot be combined"), std::invalid_argument);
}

TEST_CASE("regression: reproduces constants and polynomials in the basis") {
    const std::size_t m = 2000;
    const auto e = sample_brownian(make_grid(1.0, 4), m, 1, 5);
    Eigen::MatrixXd state(m, 1), targets(m, 2);
    for (std::size_t p = 0; p < m; ++p) {
        const double w = e.w(p, 2);
        state(p, 0) = w;
        targets(p, 0) = 3.0;
        targets(p, 1) = 1.0 - 2.0 * w + 0.5 * w * w * w;
    }
    const Eigen::MatrixXd fit = conditional_expectation(targets, state, RegressionBasis::polynomial(3));
    CHECK((fit.col(0).array() - 3.0).abs().maxCoeff() < 1e-12);
    CHECK((fit.col(1) - targets.col(1)).cwiseAbs().maxCoeff() < 1e-5);
    const Eigen::MatrixXd serial =
        conditional_expectation(targets, state, RegressionBasis::polynomial(3), Execution::serial);
    CHECK((fit - serial).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("regression: projection of noise has small mean, degenerate state handled") {
    const std::size_t m = 20000;
    const auto e = sample_brownian(make_grid(1.0, 4), m, 1, 6);
    Eigen::MatrixXd state(m, 1), targets(m, 1);
    for (std::size_t p = 0; p < m; ++p) {
        state(p, 0) = e.w(p, 2);
        targets(p, 0) = e.w(p, 4);  // E[W(1) | W(.5)] = W(.5)
    }
    const Eigen::MatrixXd fit = conditional_expectation(targets, state, RegressionBasis::polynomial(3));
    double rms = 0.0;
    for (std::size_t p = 0; p < m; ++p) rms += std::pow(fit(p, 0) - state(p, 0), 2);
    CHECK(std::sqrt(rms / m) < 0.02);

    // W(0) = 0 carries no information: the fit is the sample mean.
    Eigen::MatrixXd zero_state = Eigen::MatrixXd::Zero(m, 1);
    const Eigen::MatrixXd flat = conditional_expectation(targets, zero_state, RegressionBasis::polynomial(3));
    CHECK((flat.array() - targets.mean()).abs().maxCoeff() < 1e-12);

    const Eigen::MatrixXd pw = conditional_expectation(targets, state, RegressionBasis::piecewise(16));
    CHECK(pw.rows() == static_cast<Eigen::Index>(m));
    CHECK_THROWS(RegressionBasis::polynomial(-1).validate());
    CHECK_THROWS(RegressionBasis::piecewise(0).validate());
}

TEST_CASE("oracle: linear closed form at t=0 and T") {
    const auto e = sample_brownian(make_grid(1.0, 10), 100, 1, 9);
    const BSDEModel decay = make_catalog_model("linear_decay", {});
    REQUIRE(has_linear_oracle(decay));
    const SolutionEnsemble s = linear_analytic_solution(decay, e);
    CHECK(s.y(0, 0) == doctest::Approx(std::exp(-0.1)).epsilon(1e-14));
    CHECK(s.y(0, 10) == 1.0);
    CHECK(s.z(0, 3) == 0.0);

    const SolutionEnsemble mart = linear_analytic_solution(make_catalog_model("martingale", {}), e);
    for (std::size_t p = 0; p < 100; ++p) {
        CHECK(mart.y(p, 5) == doctest::Approx(e.w(p, 5)));
        CHECK(mart.z(p, 5) == 1.0);
    }
    const SolutionEnsemble cd = linear_analytic_solution(make_catalog_model("constant_driver", {}), e);
    CHECK(cd.y(0, 0) == doctest::Approx(1.0));

    CHECK_FALSE(has_linear_oracle(make_catalog_model("bounded", {})));
    CHECK_THROWS_WITH_AS(linear_analytic_solution(make_catalog_model("bounded", {}), e),
                         doctest::Contains("oracle unavailable"), std::invalid_argument);
}

}  // TEST_SUITE
