// Command-line runner: one experiment per invocation.
#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "ubsde/config.hpp"
#include "ubsde/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Weighted-norm BSDE laboratory"};
    app.set_version_flag("--version", ubsde::version_string());
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    bool quiet = false;
    app.add_option("--config", config_path, "experiment config file (INI grammar, see docs/config.md)");
    app.add_option("--seed", seed, "master seed, overrides [ensemble] seed");
    app.add_option("--out", out_dir, "output directory, overrides [output] dir");
    app.add_flag("--quiet", quiet, "suppress progress and summary output");

    const std::pair<const char*, const char*> commands[] = {
        {"solve", "solve a catalog model with the direct and Picard schemes"},
        {"certify", "Monte-Carlo certificate for conditions A1/A2"},
        {"contract", "contraction diagnostics of the z- or y-Picard iteration"},
        {"compare", "paired comparison run of a base and a dominating model"},
        {"bounds", "constant chain of the weighted contraction argument and its beta threshold"},
        {"table", "A2 thresholds and kappa against the reference threshold"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    ubsde::ExperimentConfig config;
    try {
        config = config_path.empty() ? ubsde::parse_config("") : ubsde::load_config(config_path);
        const ubsde::ExperimentKind kind = ubsde::parse_experiment_kind(command);
        if (config.kind && *config.kind != kind) {
            throw ubsde::ConfigError("config declares kind '" + ubsde::to_string(*config.kind) +
                                     "' but the subcommand is '" + command + "'");
        }
        if (seed) config.seed = *seed;
        if (out_dir) config.out_dir = *out_dir;

        ubsde::RunOptions options;
        options.quiet = quiet;
        options.log = &std::cerr;
        const ubsde::RunManifest manifest = ubsde::run_experiment(config, kind, options);
        if (!quiet) {
            for (const auto& c : manifest.checks) {
                std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "\n";
            }
            std::cout << "status: " << manifest.status;
            if (!manifest.error.empty()) std::cout << " (" << manifest.error << ")";
            std::cout << "\noutputs: " << config.out_dir << "\n";
        }
        return ubsde::exit_code(manifest);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
