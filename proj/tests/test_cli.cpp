#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "ubsde/config.hpp"
#include "ubsde/runner.hpp"

using namespace ubsde;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("ubsde_test_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config: defaults from an empty document") {
    const ExperimentConfig c = parse_config("");
    CHECK_FALSE(c.kind.has_value());
    CHECK(c.model.name == "bounded");
    CHECK(c.variant == Variant::A1);
    CHECK(c.steps == 50);
    CHECK(c.paths == 10000);
    CHECK(c.seed == 1);
    CHECK(c.certificate.base_paths == 250);
    CHECK(c.certificate.doublings == 6);
    CHECK(c.comparison.tol_floor == 1e-12);
    CHECK(c.out_dir == "out");
}

TEST_CASE("config: full document parses") {
    const ExperimentConfig c = parse_config(R"(
; comment
[experiment]
kind = solve
label = demo
[model]
name = linear_decay
r = 0.2
[weights]
variant = A2
beta1_bar = 8
beta2_bar = 500
[grid]
horizon = 2
steps = 10
[ensemble]
paths = 123
seed = 99
[basis]
kind = piecewise
bins = 8
[solver]
scheme = direct
tol = 1e-9
[output]
dir = somewhere
)");
    CHECK(*c.kind == ExperimentKind::solve);
    CHECK(c.label == "demo");
    CHECK(c.model.params.at("r") == 0.2);
    CHECK(c.variant == Variant::A2);
    CHECK(c.params.beta1_bar() == 8);
    CHECK(c.horizon == 2);
    CHECK(c.steps == 10);
    CHECK(c.paths == 123);
    CHECK(c.seed == 99);
    CHECK(c.basis.kind == RegressionBasis::Kind::piecewise);
    CHECK(c.scheme == SolveScheme::direct);
    CHECK(c.picard.tol == 1e-9);
    CHECK(c.out_dir == "somewhere");
}

TEST_CASE("config: errors carry line and key") {
    CHECK_THROWS_WITH_AS(parse_config("[grid]\nsteps = ten\n"), doctest::Contains("line 2: [grid] steps"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[grid]\nstep = 5\n"), doctest::Contains("unknown key 'step'"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[grids]\n"), doctest::Contains("unknown section [grids]"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[weights]\nbeta1_bar = 3\n"),
                         doctest::Contains("beta1_bar = 3"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[weights]\nbeta1_bar = 3\n"), doctest::Contains("4 < beta1_bar"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[model]\nname = bounded\nslope = 1\n"), doctest::Contains("slope"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[model]\nname = nothing\n"), doctest::Contains("unknown model"), ConfigError);
    CHECK_THROWS_AS(parse_config("[grid]\nsteps = 5\nsteps = 6\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[experiment]\nkind = fly\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[certify]\ndoublings = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[certify]\nprobes = 10\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[weights]\ngamma = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[grid]\nhorizon = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[ensemble]\npaths = -3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[solver]\nwarm_start = maybe\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), std::exception);
}

TEST_CASE("config: canonical text round trips") {
    const ExperimentConfig c = parse_config("[experiment]\nkind = compare\n[model]\nname = martingale\n"
                                            "[dominating]\nname = martingale\ndrift_offset = 0.1\n"
                                            "[weights]\ngamma = 0.1\n[table]\nbeta1_bar = 4.5, 7\n");
    const std::string text = canonical_text(c);
    const ExperimentConfig again = parse_config(text);
    CHECK(canonical_text(again) == text);
    CHECK(again.dominating->params.at("drift_offset") == 0.1);
    CHECK(again.gamma == 0.1);
}

TEST_CASE("derive_seed: distinct streams, stable values") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("fnv1a_hex: reference vectors") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("runner: bounds run writes files and passes") {
    const fs::path dir = scratch("bounds");
    ExperimentConfig c = parse_config("[experiment]\nkind = bounds\n");
    c.out_dir = dir.string();
    const RunManifest m = run_experiment(c, ExperimentKind::bounds, {true, nullptr});
    CHECK(m.status == "ok");
    CHECK(exit_code(m) == 0);
    for (const char* f : {"bounds_threshold.tsv", "bounds.tsv", "checks.tsv", "config.resolved.ini", "manifest.json"})
        CHECK(fs::exists(dir / f));
    const auto json = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(json["kind"] == "bounds");
    CHECK(json["status"] == "ok");
    CHECK(json["config_hash"] == fnv1a_hex(slurp(dir / "config.resolved.ini")));
    CHECK(json["checks"].size() == m.checks.size());
    // The resolved config reproduces the run.
    CHECK(canonical_text(load_config((dir / "config.resolved.ini").string())) ==
          slurp(dir / "config.resolved.ini"));
}

TEST_CASE("runner: table run is byte-identical across reruns") {
    const fs::path a = scratch("table_a"), b = scratch("table_b");
    ExperimentConfig c = parse_config("[experiment]\nkind = table\n");
    c.out_dir = a.string();
    run_experiment(c, ExperimentKind::table, {true, nullptr});
    c.out_dir = b.string();
    const RunManifest m = run_experiment(c, ExperimentKind::table, {true, nullptr});
    CHECK(exit_code(m) == 0);
    CHECK(slurp(a / "conditions_table.tsv") == slurp(b / "conditions_table.tsv"));
    CHECK(slurp(a / "checks.tsv") == slurp(b / "checks.tsv"));
}

TEST_CASE("runner: failing expectation gives exit 1, errors give exit 2") {
    const fs::path dir = scratch("expect");
    ExperimentConfig c = parse_config("[experiment]\nkind = certify\n[model]\nname = lipschitz_violation\n"
                                      "[grid]\nsteps = 5\n[certify]\nbase_paths = 50\ndoublings = 3\n");
    c.out_dir = dir.string();
    const RunManifest m = run_experiment(c, ExperimentKind::certify, {true, nullptr});
    CHECK(m.status == "checks_failed");
    CHECK(exit_code(m) == 1);

    ExperimentConfig bad = parse_config("[experiment]\nkind = solve\n[model]\nname = exp_square_terminal\n"
                                        "rate = 400\n[grid]\nsteps = 4\n[ensemble]\npaths = 500\n"
                                        "[solver]\nscheme = direct\n");
    bad.out_dir = scratch("error").string();
    const RunManifest e = run_experiment(bad, ExperimentKind::solve, {true, nullptr});
    CHECK(e.status == "error");
    CHECK(exit_code(e) == 2);
    CHECK(e.error.find("non-finite") != std::string::npos);
}

TEST_CASE("write_file_atomic: replaces content") {
    const fs::path dir = scratch("atomic");
    fs::create_directories(dir);
    write_file_atomic((dir / "x.txt").string(), "one");
    write_file_atomic((dir / "x.txt").string(), "two");
    CHECK(slurp(dir / "x.txt") == "two");
    CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}) == 1);
}

}  // TEST_SUITE
