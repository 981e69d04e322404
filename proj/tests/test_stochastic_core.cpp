#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "ubsde/brownian.hpp"
#include "ubsde/coefficient.hpp"
#include "ubsde/grid.hpp"
#include "ubsde/kernels.hpp"
#include "ubsde/weights.hpp"

using namespace ubsde;
using ubsde::test::constant_field;

TEST_SUITE("stochastic_core") {

TEST_CASE("make_grid: uniform nodes") {
    const TimeGrid g = make_grid(1.0, 4);
    REQUIRE(g.num_nodes() == 5);
    const double expected[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (std::size_t i = 0; i < 5; ++i) CHECK(g.t(i) == expected[i]);
    CHECK(g.horizon() == 1.0);
}

TEST_CASE("make_grid: single step and endpoints") {
    const TimeGrid g = make_grid(2.0, 1);
    REQUIRE(g.num_nodes() == 2);
    CHECK(g.t(0) == 0.0);
    CHECK(g.t(1) == 2.0);
    const TimeGrid h = make_grid(0.7, 3);
    CHECK(h.t(3) == 0.7);
    for (std::size_t i = 0; i + 1 < h.num_nodes(); ++i) CHECK(h.dt(i) > 0.0);
}

TEST_CASE("make_grid: rejects bad arguments") {
    CHECK_THROWS_AS(make_grid(1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(-1.0, 4), std::invalid_argument);
}

TEST_CASE("sample_brownian: W(0) = 0 and argument checks") {
    const auto e = sample_brownian(make_grid(1.0, 8), 100, 3, 5);
    for (std::size_t p = 0; p < 100; ++p)
        for (std::size_t c = 0; c < 3; ++c) CHECK(e.w(p, 0, c) == 0.0);
    CHECK_THROWS_AS(sample_brownian(make_grid(1.0, 8), 0, 1, 5), std::invalid_argument);
    CHECK_THROWS_AS(sample_brownian(make_grid(1.0, 8), 10, 0, 5), std::invalid_argument);
}

TEST_CASE("sample_brownian: Var W(1) within 3 SE of 1") {
    const std::size_t m = 100000;
    const auto e = sample_brownian(make_grid(1.0, 4), m, 1, 2024);
    std::vector<double> sq(m);
    for (std::size_t p = 0; p < m; ++p) sq[p] = e.w(p, 4) * e.w(p, 4);
    const auto est = mean_estimate(sq, Execution::serial);
    // E W^2 = 1; W has mean 0 so the second moment is the variance.
    CHECK(std::abs(est.value - 1.0) < 3.0 * est.std_error);
}

TEST_CASE("sample_brownian: components independent at T") {
    const std::size_t m = 100000;
    const auto e = sample_brownian(make_grid(1.0, 4), m, 2, 77);
    std::vector<double> cross(m);
    for (std::size_t p = 0; p < m; ++p) cross[p] = e.w(p, 4, 0) * e.w(p, 4, 1);
    const auto est = mean_estimate(cross, Execution::serial);
    CHECK(std::abs(est.value) < 3.0 * est.std_error);
}

TEST_CASE("sample_brownian: increment statistics within 4 SE") {
    const std::size_t m = 100000;
    const TimeGrid g = make_grid(1.0, 5);
    const auto e = sample_brownian(g, m, 1, 99);
    for (std::size_t i = 0; i < g.num_steps(); ++i) {
        std::vector<double> inc(m), sq(m);
        for (std::size_t p = 0; p < m; ++p) {
            inc[p] = e.dw(p, i);
            sq[p] = inc[p] * inc[p];
        }
        const auto mean = mean_estimate(inc, Execution::serial);
        const auto var = mean_estimate(sq, Execution::serial);
        CHECK(std::abs(mean.value) < 4.0 * mean.std_error);
        CHECK(std::abs(var.value - g.dt(i)) < 4.0 * var.std_error);
    }
}

TEST_CASE("sample_brownian: reproducible and batch invariant") {
    const TimeGrid g = make_grid(1.0, 10);
    const auto a = sample_brownian(g, 5000, 2, 31337, Execution::parallel);
    const auto b = sample_brownian(g, 5000, 2, 31337, Execution::parallel);
    const auto s = sample_brownian(g, 5000, 2, 31337, Execution::serial);
    CHECK(a.values() == b.values());
    CHECK(a.values() == s.values());
    // A smaller ensemble is a prefix of a larger one.
    const auto small = sample_brownian(g, 100, 2, 31337);
    for (std::size_t p = 0; p < 100; ++p)
        for (std::size_t i = 0; i < g.num_nodes(); ++i) CHECK(small.w(p, i, 1) == a.w(p, i, 1));
    {
        kernels::ThreadScope one(1);
        const auto t1 = sample_brownian(g, 5000, 2, 31337);
        CHECK(t1.values() == a.values());
    }
    const auto other = sample_brownian(g, 5000, 2, 31338);
    CHECK_FALSE(other.values() == a.values());
}

TEST_CASE("write_ensemble_table: header and rows") {
    const auto e = sample_brownian(make_grid(1.0, 2), 3, 1, 1);
    std::ostringstream out;
    write_ensemble_table(out, e, 2);
    std::string header;
    std::istringstream in(out.str());
    std::getline(in, header);
    CHECK(header == "path\tnode_index\tt\tcomponent\tW");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 2 * 3);
}

TEST_CASE("coefficient processes: values and flags") {
    const TimeGrid g = make_grid(1.0, 4);
    const auto e = sample_brownian(g, 50, 1, 3);
    const PathField c = CoefficientProcess::constant(0.7).sample(e);
    CHECK(c(10, 2) == 0.7);
    const PathField a = CoefficientProcess::abs_brownian(2.0).sample(e);
    const PathField s = CoefficientProcess::squared_brownian(3.0).sample(e);
    for (std::size_t p = 0; p < 50; ++p) {
        for (std::size_t i = 0; i < g.num_nodes(); ++i) {
            CHECK(a(p, i) == doctest::Approx(2.0 * std::abs(e.w(p, i))));
            CHECK(s(p, i) == doctest::Approx(3.0 * e.w(p, i) * e.w(p, i)));
            CHECK(a(p, i) >= 0.0);
        }
    }
    const PathField ou = CoefficientProcess::ou_driven(0.5, 1.0, 0.3).sample(e);
    for (double v : ou.raw()) CHECK(v >= 0.0);
    CHECK(ou(0, 0) == 0.5);
    // Deterministic given the ensemble.
    CHECK(CoefficientProcess::ou_driven(0.5, 1.0, 0.3).sample(e) == ou);
    CHECK_THROWS_AS(CoefficientProcess::constant(-1.0).sample(e), std::domain_error);
    CHECK_NOTHROW(CoefficientProcess::constant(-1.0, false).sample(e));
    CHECK_THROWS_AS(CoefficientProcess::abs_brownian(-1.0).sample(e), std::domain_error);
}

TEST_CASE("coefficient table: custom samples and shape check") {
    const auto e = sample_brownian(make_grid(1.0, 2), 4, 1, 3);
    PathField t(4, 3, 1, 2.5);
    t(1, 1) = 4.0;
    const PathField s = CoefficientProcess::table(t).sample(e);
    CHECK(s(1, 1) == 4.0);
    CHECK_THROWS(CoefficientProcess::table(PathField(3, 3, 1)).sample(e));
}

TEST_CASE("WeightParams: constraints") {
    CHECK_NOTHROW(WeightParams(2, 3, 5, 251));
    CHECK_THROWS_WITH_AS(WeightParams(1, 3, 5, 300), doctest::Contains("1 < beta1"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(WeightParams(2, 1, 5, 300), doctest::Contains("1 < beta2"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(WeightParams(2, 3, 3, 300), doctest::Contains("4 < beta1_bar"),
                         std::invalid_argument);
    // 90 * 25 / 9 = 250
    CHECK_THROWS_WITH_AS(WeightParams(2, 3, 5, 250), doctest::Contains("< beta2_bar"),
                         std::invalid_argument);
}

TEST_CASE("eval_alpha: A1 and A2 arithmetic") {
    const TimeGrid g = make_grid(1.0, 4);
    const auto e = sample_brownian(g, 20, 1, 9);
    const WeightParams wp(2, 3, 5, 2250);
    const auto a1 = eval_alpha(Variant::A1, CoefficientProcess::constant(1.0),
                               CoefficientProcess::constant(0.0), CoefficientProcess::constant(0.5),
                               wp, e);
    for (double v : a1.values.raw()) CHECK(v == doctest::Approx(2.5).epsilon(1e-15));
    const auto deg = eval_alpha(Variant::A1, CoefficientProcess::constant(0.0),
                                CoefficientProcess::constant(0.0), CoefficientProcess::constant(0.3),
                                wp, e);
    for (double v : deg.values.raw()) CHECK(v == 0.3);

    // A2 with c1 = |W| at a sample where W = 2: alpha = 1 + 5 * 2 = 11.
    PathField w(1, 2, 1, 0.0);
    w(0, 1) = 2.0;
    PathField c1(1, 2, 1);
    c1(0, 0) = 0.0;
    c1(0, 1) = std::abs(w(0, 1));
    const auto a2 = eval_alpha(Variant::A2, c1, PathField(1, 2, 1, 0.0), PathField(1, 2, 1, 1.0), wp);
    CHECK(a2.values(0, 1) == 11.0);
    // A2 uses c2^2: gamma 0 + 5 * 0 + 2250 * 0.1^2 = 22.5
    const auto a2b = eval_alpha(Variant::A2, PathField(1, 2, 1, 0.0), PathField(1, 2, 1, 0.1),
                                PathField(1, 2, 1, 0.0), wp);
    CHECK(a2b.values(0, 0) == doctest::Approx(22.5));
}

TEST_CASE("eval_alpha: positivity violated names the location") {
    const WeightParams wp(2, 3, 5, 2250);
    PathField zero(2, 3, 1, 0.0);
    CHECK_THROWS_WITH_AS(eval_alpha(Variant::A1, zero, zero, zero, wp),
                         doctest::Contains("alpha positivity violated"), std::domain_error);
    PathField gamma(2, 3, 1, 1.0);
    gamma(1, 2) = -5.0;
    CHECK_THROWS_WITH_AS(eval_alpha(Variant::A1, zero, zero, gamma, wp), doctest::Contains("path 1"),
                         std::domain_error);
}

TEST_CASE("eval_weight: exact for constant alpha") {
    const TimeGrid g = make_grid(1.0, 10);
    const AlphaProcess one{Variant::A1, constant_field(3, 11, 1.0)};
    const WeightProcess w = eval_weight(one, g);
    for (std::size_t p = 0; p < 3; ++p) {
        CHECK(w.p(p, 0) == 1.0);
        for (std::size_t i = 0; i < 11; ++i) {
            CHECK(std::abs(w.p(p, i) - std::exp(g.t(i))) < 1e-12 * std::exp(g.t(i)));
        }
    }
    const TimeGrid h = make_grid(1.0, 2);
    const WeightProcess two = eval_weight({Variant::A1, constant_field(1, 3, 2.0)}, h);
    CHECK(two.p(0, 1) == doctest::Approx(2.718281828).epsilon(1e-9));
}

TEST_CASE("eval_weight: nondecreasing and overflow guard") {
    const TimeGrid g = make_grid(1.0, 20);
    const auto e = sample_brownian(g, 200, 1, 4);
    const auto alpha = eval_alpha(Variant::A1, CoefficientProcess::abs_brownian(1.0),
                                  CoefficientProcess::constant(0.0),
                                  CoefficientProcess::constant(0.1), WeightParams(2, 3, 5, 2250), e);
    const WeightProcess w = eval_weight(alpha, g);
    for (std::size_t p = 0; p < 200; ++p) {
        CHECK(w.p(p, 0) == 1.0);
        for (std::size_t i = 1; i < g.num_nodes(); ++i) CHECK(w.p(p, i) >= w.p(p, i - 1));
    }
    const AlphaProcess big{Variant::A1, constant_field(1, 21, 800.0)};
    CHECK_THROWS_WITH_AS(eval_weight(big, g), doctest::Contains("weight overflow"), std::overflow_error);
    CHECK_THROWS_WITH_AS(eval_weight(big, g), doctest::Contains("node"), std::overflow_error);
    CHECK_NOTHROW(eval_weight(big, g, 900.0));
}

TEST_CASE("weighted_m2_norm: closed forms and quadrature order") {
    const auto err = [](std::size_t n) {
        const TimeGrid g = make_grid(1.0, n);
        const WeightProcess w = eval_weight({Variant::A1, constant_field(2, n + 1, 1.0)}, g);
        return std::abs(weighted_m2_norm(constant_field(2, n + 1, 1.0), w, g).value - (std::exp(1.0) - 1.0));
    };
    CHECK(err(50) < 1e-4);
    // Second order: doubling N cuts the error by about four.
    const double r = err(20) / err(40);
    CHECK(r == doctest::Approx(4.0).epsilon(0.02));

    const TimeGrid g = make_grid(1.0, 10);
    const WeightProcess w = eval_weight({Variant::A1, constant_field(2, 11, 1.0)}, g);
    CHECK(weighted_m2_norm(constant_field(2, 11, 0.0), w, g).value == 0.0);
    CHECK_THROWS_AS(weighted_m2_norm(constant_field(3, 11, 1.0), w, g), std::invalid_argument);
}

TEST_CASE("weighted_h2_norm and terminal norm: closed forms") {
    const TimeGrid g = make_grid(1.0, 10);
    const WeightProcess w = eval_weight({Variant::A1, constant_field(2, 11, 1.0)}, g);
    CHECK(weighted_h2_norm(constant_field(2, 11, 1.0), w, g).value == doctest::Approx(std::exp(1.0)));
    CHECK(weighted_h2_norm(constant_field(2, 11, 0.0), w, g).value == 0.0);
    CHECK(weighted_terminal_norm(constant_field(2, 1, 1.0), w, g).value == doctest::Approx(std::exp(1.0)));
    CHECK(weighted_terminal_norm(constant_field(2, 1, 0.0), w, g).value == 0.0);

    // xi = W(T) with deterministic weight: E p(T) W(T)^2 = e.
    const std::size_t m = 100000;
    const auto e = sample_brownian(g, m, 1, 8);
    const WeightProcess wm = eval_weight({Variant::A1, constant_field(m, 11, 1.0)}, g);
    PathField xi(m, 1, 1);
    for (std::size_t p = 0; p < m; ++p) xi(p, 0) = e.w(p, 10);
    const auto est = weighted_terminal_norm(xi, wm, g);
    CHECK(std::abs(est.value - std::exp(1.0)) < 3.0 * est.std_error);
}

TEST_CASE("weighted norms: sup dominates pointwise, monotone in |phi| and weight") {
    const TimeGrid g = make_grid(1.0, 10);
    const std::size_t m = 500;
    const auto e = sample_brownian(g, m, 1, 12);
    const WeightProcess w = eval_weight({Variant::A1, constant_field(m, 11, 0.7)}, g);
    const WeightProcess heavier = eval_weight({Variant::A1, constant_field(m, 11, 1.2)}, g);
    PathField phi = e.values();
    PathField bigger = phi;
    for (double& v : bigger.raw()) v *= 1.5;
    const double h2 = weighted_h2_norm(phi, w, g).value;
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
        double at_node = 0.0;
        for (std::size_t p = 0; p < m; ++p) at_node += w.p(p, i) * phi(p, i) * phi(p, i);
        CHECK(h2 >= at_node / m - 1e-12);
    }
    CHECK(weighted_m2_norm(bigger, w, g).value >= weighted_m2_norm(phi, w, g).value);
    CHECK(weighted_h2_norm(bigger, w, g).value >= h2);
    CHECK(weighted_m2_norm(phi, heavier, g).value >= weighted_m2_norm(phi, w, g).value);
    CHECK(weighted_h2_norm(phi, heavier, g).value >= h2);
}

TEST_CASE("kernels: serial and parallel reductions agree") {
    const TimeGrid g = make_grid(1.0, 30);
    const std::size_t m = 20000;
    const auto e = sample_brownian(g, m, 1, 55);
    const auto alpha = eval_alpha(Variant::A1, CoefficientProcess::abs_brownian(0.5),
                                  CoefficientProcess::constant(0.2),
                                  CoefficientProcess::constant(0.1), WeightParams(2, 3, 5, 2250), e);
    const WeightProcess w = eval_weight(alpha, g);
    const auto s = weighted_m2_norm(e.values(), w, g, Execution::serial);
    const auto p = weighted_m2_norm(e.values(), w, g, Execution::parallel);
    CHECK(s.value == doctest::Approx(p.value).epsilon(1e-12));
    CHECK(s.std_error == doctest::Approx(p.std_error).epsilon(1e-9));
    // Parallel results do not depend on the thread count.
    double one_thread = 0.0;
    {
        kernels::ThreadScope scope(1);
        one_thread = weighted_m2_norm(e.values(), w, g, Execution::parallel).value;
    }
    double three_threads = 0.0;
    {
        kernels::ThreadScope scope(3);
        three_threads = weighted_m2_norm(e.values(), w, g, Execution::parallel).value;
    }
    CHECK(one_thread == p.value);
    CHECK(three_threads == p.value);
}

TEST_CASE("mean_estimate: value and standard error") {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const auto e = mean_estimate(v, Execution::serial);
    CHECK(e.value == 2.5);
    // sample variance 5/3, SE = sqrt(5/3 / 4)
    CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 12.0)));
    const std::vector<double> c(10, 1e8 + 0.5);
    CHECK(mean_estimate(c, Execution::parallel).std_error == 0.0);
}

}  // TEST_SUITE
