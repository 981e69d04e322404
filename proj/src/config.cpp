#include "ubsde/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ubsde/brownian.hpp"

namespace ubsde {

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::solve: return "solve";
        case ExperimentKind::certify: return "certify";
        case ExperimentKind::contract: return "contract";
        case ExperimentKind::compare: return "compare";
        case ExperimentKind::bounds: return "bounds";
        case ExperimentKind::table: return "table";
    }
    return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& text) {
    for (auto k : {ExperimentKind::solve, ExperimentKind::certify, ExperimentKind::contract,
                   ExperimentKind::compare, ExperimentKind::bounds, ExperimentKind::table}) {
        if (to_string(k) == text) return k;
    }
    throw ConfigError("unknown experiment kind '" + text +
                      "' (expected solve, certify, contract, compare, bounds or table)");
}

std::string to_string(SolveScheme s) {
    switch (s) {
        case SolveScheme::direct: return "direct";
        case SolveScheme::picard_y: return "picard_y";
        case SolveScheme::all: return "all";
    }
    return "unknown";
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return path_stream_seed(master, 0x100000000ULL + stream);
}

namespace {

namespace pt = boost::property_tree;

// Keys accepted per section. [model] and [dominating] additionally take the
// catalog parameters of the named model.
const std::map<std::string, std::vector<std::string>>& grammar() {
    static const std::map<std::string, std::vector<std::string>> g{
        {"experiment", {"kind", "label"}},
        {"model", {"name", "k"}},
        {"dominating", {"name"}},
        {"weights", {"variant", "beta1", "beta2", "beta1_bar", "beta2_bar", "gamma", "log_weight_cap"}},
        {"grid", {"horizon", "steps"}},
        {"ensemble", {"paths", "seed"}},
        {"basis", {"kind", "degree", "ridge", "bins"}},
        {"solver",
         {"scheme", "tol", "max_iter", "inner_tol", "inner_max_iter", "warm_start", "slack",
          "se_factor", "roundoff_floor", "oracle_rel_tol", "agreement_rel_tol"}},
        {"certify",
         {"base_paths", "doublings", "probes", "probe_radius", "cauchy_scale", "growth_threshold",
          "lipschitz_tolerance", "alpha_floor", "both_variants", "expect"}},
        {"contract", {"scheme", "min_usable"}},
        {"compare",
         {"scheme", "probes", "se_factor", "tol_floor", "max_violation_fraction",
          "waive_preconditions", "require_base_certificate", "expect"}},
        {"bounds", {"tolerance", "lo", "hi", "betas"}},
        {"table", {"beta1_bar", "reference_factor", "sample_c1", "sample_c2", "horizon", "kh_tolerance"}},
        {"output", {"dir", "max_paths"}},
    };
    return g;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

class Reader {
public:
    explicit Reader(const std::string& text) {
        scan_lines(text);
        std::istringstream in(text);
        try {
            pt::read_ini(in, tree_);
        } catch (const pt::ini_parser_error& e) {
            throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
        }
        for (const auto& [section, body] : tree_) {
            if (body.empty() && !body.data().empty()) {
                throw ConfigError(where(section, section) + "key '" + section +
                                  "' outside any [section]");
            }
            if (!grammar().count(section)) {
                std::string known;
                for (const auto& [name, keys] : grammar()) known += " [" + name + "]";
                throw ConfigError(section_where(section) + "unknown section [" + section +
                                  "]; known:" + known);
            }
        }
        // The ini reader drops empty sections; check the scanned headers too.
        for (const auto& [section, line] : section_lines_) {
            if (!grammar().count(section)) {
                std::string known;
                for (const auto& [name, keys] : grammar()) known += " [" + name + "]";
                throw ConfigError("line " + std::to_string(line) + ": unknown section [" + section +
                                  "]; known:" + known);
            }
        }
    }

    bool has_section(const std::string& section) const { return tree_.count(section) > 0; }

    // Keys of a section that are not part of the fixed grammar.
    std::vector<std::string> extra_keys(const std::string& section) const {
        std::vector<std::string> out;
        const auto it = tree_.find(section);
        if (it == tree_.not_found()) return out;
        const auto& allowed = grammar().at(section);
        for (const auto& [key, value] : it->second) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) out.push_back(key);
        }
        return out;
    }

    void reject_unknown(const std::string& section) const {
        for (const auto& key : extra_keys(section)) {
            std::string accepted;
            for (const auto& k : grammar().at(section)) accepted += " " + k;
            throw ConfigError(where(section, key) + "unknown key '" + key + "' in [" + section +
                              "]; accepted:" + accepted);
        }
    }

    std::optional<std::string> raw(const std::string& section, const std::string& key) const {
        const auto s = tree_.find(section);
        if (s == tree_.not_found()) return std::nullopt;
        const auto k = s->second.find(key);
        if (k == s->second.not_found()) return std::nullopt;
        return trim(k->second.data());
    }

    std::string where(const std::string& section, const std::string& key) const {
        const auto it = lines_.find(section + "." + key);
        if (it == lines_.end()) return "[" + section + "] " + key + ": ";
        return "line " + std::to_string(it->second) + ": [" + section + "] " + key + ": ";
    }

    std::string section_where(const std::string& section) const {
        const auto it = section_lines_.find(section);
        return it == section_lines_.end() ? std::string() : "line " + std::to_string(it->second) + ": ";
    }

    [[noreturn]] void fail(const std::string& section, const std::string& key,
                           const std::string& message) const {
        throw ConfigError(where(section, key) + message);
    }

    double real(const std::string& section, const std::string& key, double fallback) const {
        const auto v = raw(section, key);
        if (!v) return fallback;
        return to_real(section, key, *v);
    }

    double to_real(const std::string& section, const std::string& key, const std::string& v) const {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(v, &used);
        } catch (const std::exception&) {
            fail(section, key, "expected a number, got '" + v + "'");
        }
        if (used != v.size()) fail(section, key, "expected a number, got '" + v + "'");
        if (std::isnan(x)) fail(section, key, "NaN is not allowed");
        return x;
    }

    std::uint64_t integer(const std::string& section, const std::string& key,
                          std::uint64_t fallback, std::uint64_t min = 0) const {
        const auto v = raw(section, key);
        if (!v) return fallback;
        std::size_t used = 0;
        unsigned long long x = 0;
        if (v->empty() || (*v)[0] == '-' || (*v)[0] == '+') {
            fail(section, key, "expected a nonnegative integer, got '" + *v + "'");
        }
        try {
            x = std::stoull(*v, &used);
        } catch (const std::exception&) {
            fail(section, key, "expected a nonnegative integer, got '" + *v + "'");
        }
        if (used != v->size()) fail(section, key, "expected a nonnegative integer, got '" + *v + "'");
        if (x < min) fail(section, key, "must be >= " + std::to_string(min));
        return x;
    }

    bool boolean(const std::string& section, const std::string& key, bool fallback) const {
        const auto v = raw(section, key);
        if (!v) return fallback;
        if (*v == "true") return true;
        if (*v == "false") return false;
        fail(section, key, "expected true or false, got '" + *v + "'");
    }

    std::string text(const std::string& section, const std::string& key,
                     const std::string& fallback, const std::vector<std::string>& choices = {}) const {
        const auto v = raw(section, key);
        if (!v) return fallback;
        if (!choices.empty() && std::find(choices.begin(), choices.end(), *v) == choices.end()) {
            std::string list;
            for (const auto& c : choices) list += (list.empty() ? "" : ", ") + c;
            fail(section, key, "expected one of " + list + ", got '" + *v + "'");
        }
        return *v;
    }

    std::vector<double> reals(const std::string& section, const std::string& key,
                              const std::vector<double>& fallback) const {
        const auto v = raw(section, key);
        if (!v) return fallback;
        std::vector<double> out;
        std::stringstream s(*v);
        std::string item;
        while (std::getline(s, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            out.push_back(to_real(section, key, item));
        }
        return out;
    }

private:
    void scan_lines(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        std::string section;
        int n = 0;
        while (std::getline(in, line)) {
            ++n;
            const std::string t = trim(line);
            if (t.empty() || t[0] == ';' || t[0] == '#') continue;
            if (t.front() == '[' && t.back() == ']') {
                section = trim(t.substr(1, t.size() - 2));
                section_lines_.emplace(section, n);
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = trim(t.substr(0, eq));
            lines_.emplace(section.empty() ? key + "." + key : section + "." + key, n);
        }
    }

    pt::ptree tree_;
    std::map<std::string, int> lines_;
    std::map<std::string, int> section_lines_;
};

ModelSpec read_model(const Reader& r, const std::string& section, const std::string& fallback_name) {
    ModelSpec spec;
    spec.name = r.text(section, "name", fallback_name);
    for (const auto& key : r.extra_keys(section)) {
        if (section == "model" && key == "k") continue;
        spec.params[key] = r.real(section, key, 0.0);
    }
    return spec;
}

void check_model(const Reader& r, const std::string& section, const ModelSpec& spec,
                 std::size_t k) {
    try {
        (void)make_catalog_model(spec.name, spec.params, k);
    } catch (const std::invalid_argument& e) {
        // Point at the offending parameter line when there is one.
        std::string key = "name";
        const std::string msg = e.what();
        const auto q = msg.find("parameter '");
        if (q != std::string::npos) {
            const auto start = q + 11;
            key = msg.substr(start, msg.find('\'', start) - start);
        }
        throw ConfigError(r.where(section, key) + msg);
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    const Reader r(text);
    for (const auto& [section, keys] : grammar()) {
        if (section != "model" && section != "dominating") r.reject_unknown(section);
    }
    ExperimentConfig c;

    if (const auto kind = r.raw("experiment", "kind")) {
        try {
            c.kind = parse_experiment_kind(*kind);
        } catch (const ConfigError& e) {
            r.fail("experiment", "kind", e.what());
        }
    }
    c.label = r.text("experiment", "label", c.label);

    c.dim_w = r.integer("model", "k", c.dim_w, 1);
    if (c.dim_w > 64) r.fail("model", "k", "must be <= 64");
    c.model = read_model(r, "model", c.model.name);
    check_model(r, "model", c.model, c.dim_w);
    if (r.has_section("dominating")) {
        c.dominating = read_model(r, "dominating", c.model.name);
        check_model(r, "dominating", *c.dominating, c.dim_w);
    }

    const std::string variant = r.text("weights", "variant", "A1", {"A1", "A2"});
    c.variant = parse_variant(variant);
    const double b1 = r.real("weights", "beta1", c.params.beta1());
    const double b2 = r.real("weights", "beta2", c.params.beta2());
    const double b1bar = r.real("weights", "beta1_bar", c.params.beta1_bar());
    const double b2bar = r.real("weights", "beta2_bar", c.params.beta2_bar());
    try {
        c.params = WeightParams(b1, b2, b1bar, b2bar);
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        const std::string key = msg.substr(0, msg.find(' '));
        throw ConfigError(r.where("weights", key) + msg);
    }
    c.gamma = r.real("weights", "gamma", c.gamma);
    if (!(c.gamma >= 0.0)) r.fail("weights", "gamma", "gamma must be >= 0 (a nonnegative process)");
    c.log_weight_cap = r.real("weights", "log_weight_cap", c.log_weight_cap);
    if (!(c.log_weight_cap > 0.0) || c.log_weight_cap > 709.0) {
        r.fail("weights", "log_weight_cap", "must lie in (0, 709]");
    }

    c.horizon = r.real("grid", "horizon", c.horizon);
    if (!(c.horizon > 0.0) || !std::isfinite(c.horizon)) r.fail("grid", "horizon", "must be > 0");
    c.steps = r.integer("grid", "steps", c.steps, 1);

    c.paths = r.integer("ensemble", "paths", c.paths, 2);
    c.seed = r.integer("ensemble", "seed", c.seed);

    const std::string basis_kind =
        r.text("basis", "kind", "polynomial", {"polynomial", "piecewise"});
    c.basis.kind = basis_kind == "polynomial" ? RegressionBasis::Kind::polynomial
                                              : RegressionBasis::Kind::piecewise;
    c.basis.degree = static_cast<int>(r.integer("basis", "degree", 3));
    c.basis.bins = static_cast<int>(r.integer("basis", "bins", 16, 1));
    c.basis.ridge = r.real("basis", "ridge", c.basis.kind == RegressionBasis::Kind::piecewise ? 0.0 : 1e-8);
    try {
        c.basis.validate();
    } catch (const std::invalid_argument& e) {
        r.fail("basis", "kind", e.what());
    }

    const std::string scheme =
        r.text("solver", "scheme", "all", {"direct", "picard_y", "all"});
    c.scheme = scheme == "direct"     ? SolveScheme::direct
               : scheme == "picard_y" ? SolveScheme::picard_y
                                      : SolveScheme::all;
    PicardSettings& p = c.picard;
    p.tol = r.real("solver", "tol", p.tol);
    if (!(p.tol > 0.0)) r.fail("solver", "tol", "must be > 0");
    p.max_iter = static_cast<int>(r.integer("solver", "max_iter", p.max_iter, 1));
    p.inner_tol = r.real("solver", "inner_tol", p.inner_tol);
    if (!(p.inner_tol > 0.0)) r.fail("solver", "inner_tol", "must be > 0");
    p.inner_max_iter = static_cast<int>(r.integer("solver", "inner_max_iter", p.inner_max_iter, 1));
    p.warm_start = r.boolean("solver", "warm_start", p.warm_start);
    p.slack = r.real("solver", "slack", p.slack);
    if (!(p.slack >= 1.0)) r.fail("solver", "slack", "must be >= 1");
    p.noise.se_factor = r.real("solver", "se_factor", p.noise.se_factor);
    if (!(p.noise.se_factor >= 0.0)) r.fail("solver", "se_factor", "must be >= 0");
    p.noise.roundoff_floor = r.real("solver", "roundoff_floor", p.noise.roundoff_floor);
    if (!(p.noise.roundoff_floor >= 0.0)) r.fail("solver", "roundoff_floor", "must be >= 0");
    c.oracle_rel_tol = r.real("solver", "oracle_rel_tol", c.oracle_rel_tol);
    if (!(c.oracle_rel_tol > 0.0)) r.fail("solver", "oracle_rel_tol", "must be > 0");
    c.agreement_rel_tol = r.real("solver", "agreement_rel_tol", c.agreement_rel_tol);
    if (!(c.agreement_rel_tol > 0.0)) r.fail("solver", "agreement_rel_tol", "must be > 0");

    CertificateBudget& b = c.certificate;
    b.base_paths = r.integer("certify", "base_paths", b.base_paths, 2);
    b.doublings = static_cast<int>(r.integer("certify", "doublings", b.doublings, 3));
    if (b.doublings > 20) r.fail("certify", "doublings", "must be <= 20");
    b.probes = r.integer("certify", "probes", b.probes, 10000);
    b.probe_radius = r.real("certify", "probe_radius", b.probe_radius);
    b.cauchy_scale = r.real("certify", "cauchy_scale", b.cauchy_scale);
    b.growth_threshold = r.real("certify", "growth_threshold", b.growth_threshold);
    b.lipschitz_tolerance = r.real("certify", "lipschitz_tolerance", b.lipschitz_tolerance);
    b.alpha_floor = r.real("certify", "alpha_floor", b.alpha_floor);
    b.log_weight_cap = c.log_weight_cap;
    try {
        b.validate();
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        const auto colon = msg.find(": ");
        const std::string key = msg.substr(colon + 2, msg.find(' ', colon + 2) - colon - 2);
        r.fail("certify", key, msg);
    }
    c.certify_both_variants = r.boolean("certify", "both_variants", c.certify_both_variants);
    c.certify_expect = r.text("certify", "expect", c.certify_expect,
                              {"evidence-pass", "evidence-fail", "inconclusive", "any"});

    c.contract_scheme = r.text("contract", "scheme", c.contract_scheme, {"z", "y"});
    c.contract_min_usable = static_cast<int>(r.integer("contract", "min_usable", 3, 1));

    ComparisonSettings& s = c.comparison;
    s.scheme = r.text("compare", "scheme", "picard", {"picard", "direct"}) == "picard"
                   ? ComparisonScheme::picard
                   : ComparisonScheme::direct;
    s.probes = r.integer("compare", "probes", s.probes);
    s.se_factor = r.real("compare", "se_factor", s.se_factor);
    if (!(s.se_factor >= 0.0)) r.fail("compare", "se_factor", "must be >= 0");
    s.tol_floor = r.real("compare", "tol_floor", s.tol_floor);
    if (!(s.tol_floor >= 0.0)) r.fail("compare", "tol_floor", "must be >= 0");
    s.max_violation_fraction = r.real("compare", "max_violation_fraction", s.max_violation_fraction);
    if (!(s.max_violation_fraction >= 0.0 && s.max_violation_fraction <= 1.0)) {
        r.fail("compare", "max_violation_fraction", "must lie in [0, 1]");
    }
    s.waive_preconditions = r.boolean("compare", "waive_preconditions", s.waive_preconditions);
    s.require_base_certificate =
        r.boolean("compare", "require_base_certificate", s.require_base_certificate);
    c.compare_expect = r.text("compare", "expect", c.compare_expect, {"pass", "fail", "any"});
    s.picard = c.picard;
    s.certificate = c.certificate;

    c.bounds_tolerance = r.real("bounds", "tolerance", c.bounds_tolerance);
    if (!(c.bounds_tolerance > 0.0)) r.fail("bounds", "tolerance", "must be > 0");
    c.bounds_lo = r.real("bounds", "lo", c.bounds_lo);
    c.bounds_hi = r.real("bounds", "hi", c.bounds_hi);
    if (!(c.bounds_lo > 0.0) || !(c.bounds_hi > c.bounds_lo)) {
        r.fail("bounds", "lo", "bracket needs 0 < lo < hi");
    }
    c.bounds_betas = r.reals("bounds", "betas", c.bounds_betas);
    for (double beta : c.bounds_betas) {
        if (!(beta > 0.0)) r.fail("bounds", "betas", "every beta must be > 0");
    }

    c.table.beta1_bar_grid = r.reals("table", "beta1_bar", {4.1, 4.5, 5.0, 8.0, 20.0});
    for (double v : c.table.beta1_bar_grid) {
        if (!(v > 4.0)) {
            r.fail("table", "beta1_bar",
                   "value " + fmt(v) + " violates the constraint 4 < beta1_bar");
        }
    }
    c.table.reference_factor = r.real("table", "reference_factor", c.table.reference_factor);
    if (!(c.table.reference_factor > 1.0)) {
        r.fail("table", "reference_factor", "must be > 1 so the reference beta2_bar is feasible");
    }
    c.table.sample_c1 = r.real("table", "sample_c1", c.table.sample_c1);
    c.table.sample_c2 = r.real("table", "sample_c2", c.table.sample_c2);
    c.table.horizon = r.real("table", "horizon", c.table.horizon);
    c.table.kh_tolerance = r.real("table", "kh_tolerance", c.table.kh_tolerance);
    if (!(c.table.kh_tolerance > 0.0)) r.fail("table", "kh_tolerance", "must be > 0");

    c.out_dir = r.text("output", "dir", c.out_dir);
    if (c.out_dir.empty()) r.fail("output", "dir", "must not be empty");
    c.max_paths = r.integer("output", "max_paths", c.max_paths);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_config(buffer.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string canonical_text(const ExperimentConfig& c) {
    std::ostringstream o;
    const auto b = [](bool v) { return v ? "true" : "false"; };
    o << "[experiment]\n";
    if (c.kind) o << "kind = " << to_string(*c.kind) << "\n";
    o << "label = " << c.label << "\n";
    o << "\n[model]\nname = " << c.model.name << "\nk = " << c.dim_w << "\n";
    for (const auto& [k, v] : c.model.params) o << k << " = " << fmt(v) << "\n";
    if (c.dominating) {
        o << "\n[dominating]\nname = " << c.dominating->name << "\n";
        for (const auto& [k, v] : c.dominating->params) o << k << " = " << fmt(v) << "\n";
    }
    o << "\n[weights]\nvariant = " << to_string(c.variant) << "\nbeta1 = " << fmt(c.params.beta1())
      << "\nbeta2 = " << fmt(c.params.beta2()) << "\nbeta1_bar = " << fmt(c.params.beta1_bar())
      << "\nbeta2_bar = " << fmt(c.params.beta2_bar()) << "\ngamma = " << fmt(c.gamma)
      << "\nlog_weight_cap = " << fmt(c.log_weight_cap) << "\n";
    o << "\n[grid]\nhorizon = " << fmt(c.horizon) << "\nsteps = " << c.steps << "\n";
    o << "\n[ensemble]\npaths = " << c.paths << "\nseed = " << c.seed << "\n";
    o << "\n[basis]\nkind = "
      << (c.basis.kind == RegressionBasis::Kind::polynomial ? "polynomial" : "piecewise")
      << "\ndegree = " << c.basis.degree << "\nridge = " << fmt(c.basis.ridge)
      << "\nbins = " << c.basis.bins << "\n";
    const PicardSettings& p = c.picard;
    o << "\n[solver]\nscheme = " << to_string(c.scheme) << "\ntol = " << fmt(p.tol)
      << "\nmax_iter = " << p.max_iter << "\ninner_tol = " << fmt(p.inner_tol)
      << "\ninner_max_iter = " << p.inner_max_iter << "\nwarm_start = " << b(p.warm_start)
      << "\nslack = " << fmt(p.slack) << "\nse_factor = " << fmt(p.noise.se_factor)
      << "\nroundoff_floor = " << fmt(p.noise.roundoff_floor)
      << "\noracle_rel_tol = " << fmt(c.oracle_rel_tol)
      << "\nagreement_rel_tol = " << fmt(c.agreement_rel_tol) << "\n";
    const CertificateBudget& cb = c.certificate;
    o << "\n[certify]\nbase_paths = " << cb.base_paths << "\ndoublings = " << cb.doublings
      << "\nprobes = " << cb.probes << "\nprobe_radius = " << fmt(cb.probe_radius)
      << "\ncauchy_scale = " << fmt(cb.cauchy_scale)
      << "\ngrowth_threshold = " << fmt(cb.growth_threshold)
      << "\nlipschitz_tolerance = " << fmt(cb.lipschitz_tolerance)
      << "\nalpha_floor = " << fmt(cb.alpha_floor) << "\nboth_variants = " << b(c.certify_both_variants)
      << "\nexpect = " << c.certify_expect << "\n";
    o << "\n[contract]\nscheme = " << c.contract_scheme << "\nmin_usable = " << c.contract_min_usable
      << "\n";
    const ComparisonSettings& s = c.comparison;
    o << "\n[compare]\nscheme = " << (s.scheme == ComparisonScheme::picard ? "picard" : "direct")
      << "\nprobes = " << s.probes << "\nse_factor = " << fmt(s.se_factor)
      << "\ntol_floor = " << fmt(s.tol_floor)
      << "\nmax_violation_fraction = " << fmt(s.max_violation_fraction)
      << "\nwaive_preconditions = " << b(s.waive_preconditions)
      << "\nrequire_base_certificate = " << b(s.require_base_certificate)
      << "\nexpect = " << c.compare_expect << "\n";
    o << "\n[bounds]\ntolerance = " << fmt(c.bounds_tolerance) << "\nlo = " << fmt(c.bounds_lo)
      << "\nhi = " << fmt(c.bounds_hi) << "\nbetas = " << fmt_list(c.bounds_betas) << "\n";
    o << "\n[table]\nbeta1_bar = " << fmt_list(c.table.beta1_bar_grid)
      << "\nreference_factor = " << fmt(c.table.reference_factor)
      << "\nsample_c1 = " << fmt(c.table.sample_c1) << "\nsample_c2 = " << fmt(c.table.sample_c2)
      << "\nhorizon = " << fmt(c.table.horizon) << "\nkh_tolerance = " << fmt(c.table.kh_tolerance)
      << "\n";
    o << "\n[output]\ndir = " << c.out_dir << "\nmax_paths = " << c.max_paths << "\n";
    return o.str();
}

}  // namespace ubsde
