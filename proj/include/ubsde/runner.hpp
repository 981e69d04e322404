#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ubsde/config.hpp"

namespace ubsde {

// One requested check of an experiment; the run exits zero iff all pass.
struct CheckResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct RunManifest {
    std::string kind;
    std::string label;
    std::string config_hash;  // FNV-1a 64 of the canonical config text, hex
    std::uint64_t seed = 0;
    std::string version;
    double wall_seconds = 0.0;
    std::vector<std::pair<std::string, double>> timings;  // module, seconds
    std::vector<std::string> files;                       // relative to the output directory
    std::vector<CheckResult> checks;
    std::string status = "ok";  // ok, checks_failed or error
    std::string error;
};

struct RunOptions {
    bool quiet = false;
    std::ostream* log = nullptr;  // progress lines unless quiet
};

// Runs one experiment of the given kind, writes every output file plus
// manifest.json into config.out_dir and returns the manifest. Module errors
// are caught and recorded (status "error").
RunManifest run_experiment(const ExperimentConfig& config, ExperimentKind kind,
                           const RunOptions& options = {});

// 0 when every check passed, 1 when a check failed, 2 on error.
int exit_code(const RunManifest& manifest);

std::string manifest_json(const RunManifest& manifest);

std::string fnv1a_hex(const std::string& text);

// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);

const char* version_string();

}  // namespace ubsde
