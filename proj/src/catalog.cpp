#include "ubsde/catalog.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ubsde {

namespace {

const ParamMap kModifiers{{"drift_offset", 0.0}, {"drift_abs_w", 0.0}, {"terminal_shift", 0.0}};

using CP = CoefficientProcess;

std::vector<CP> constant_b(double value, std::size_t k) {
    return std::vector<CP>(k, CP::constant(value, false));
}

}  // namespace

const std::vector<CatalogEntry>& model_catalog() {
    static const std::vector<CatalogEntry> entries{
        {"zero", "f = 0, xi = value", {{"value", 0.0}}},
        {"martingale", "f = 0, xi = intercept + slope W1(T)", {{"intercept", 0.0}, {"slope", 1.0}}},
        {"constant_driver", "f = value, xi = terminal", {{"value", 1.0}, {"terminal", 0.0}}},
        {"linear_decay", "f = -r y, xi = terminal", {{"r", 0.1}, {"terminal", 1.0}}},
        {"linear",
         "f = a y + b sum_l z_l + c, xi = intercept + slope W1(T)",
         {{"a", 0.0}, {"b", 0.0}, {"c", 0.0}, {"intercept", 0.0}, {"slope", 1.0}}},
        {"bounded",
         "f = c1 sin(y) + c2 clip(z), xi = amplitude sin(frequency W1(T))",
         {{"c1", 0.5}, {"c2", 0.1}, {"level", 1.0}, {"amplitude", 1.0}, {"frequency", 1.0}}},
        {"z_contraction", "f = b sum_l z_l, xi = sin(W1(T))", {{"b", 1.0}}},
        {"unbounded",
         "f = scale |W1(t)| sin(y) + c2 clip(z), xi = sin(W1(T))",
         {{"scale", 0.5}, {"c2", 0.1}}},
        {"ou_rate",
         "f = |X(t)| sin(y) + c2 clip(z), X an OU process on W1, xi = sin(W1(T))",
         {{"mean", 0.5}, {"rate", 1.0}, {"vol", 0.3}, {"c2", 0.1}}},
        {"running_max",
         "f = c1 sin(y), xi = scale max_i W1(t_i)",
         {{"c1", 0.5}, {"scale", 1.0}}},
        {"exp_square_terminal", "f = 0, xi = exp(rate W1(T)^2)", {{"rate", 1.0}}},
        {"lipschitz_violation",
         "f = factor c1 y with declared modulus c1, xi = 1",
         {{"c1", 0.5}, {"factor", 2.0}}},
    };
    return entries;
}

BSDEModel make_catalog_model(const std::string& name, const ParamMap& params, std::size_t dim_w) {
    const CatalogEntry* entry = nullptr;
    for (const auto& e : model_catalog()) {
        if (e.name == name) entry = &e;
    }
    if (!entry) {
        std::ostringstream s;
        s << "unknown model '" << name << "'; known:";
        for (const auto& e : model_catalog()) s << " " << e.name;
        throw std::invalid_argument(s.str());
    }
    ParamMap values = entry->defaults;
    values.insert(kModifiers.begin(), kModifiers.end());
    for (const auto& [key, value] : params) {
        auto it = values.find(key);
        if (it == values.end()) {
            std::ostringstream s;
            s << "model '" << name << "': unknown parameter '" << key << "'; accepted:";
            for (const auto& [k, v] : values) s << " " << k;
            throw std::invalid_argument(s.str());
        }
        if (!std::isfinite(value)) {
            throw std::invalid_argument("model '" + name + "': parameter '" + key + "' must be finite");
        }
        it->second = value;
    }
    const auto v = [&](const char* key) { return values.at(key); };
    const std::size_t k = dim_w;
    if (k == 0) throw std::invalid_argument("model '" + name + "': k must be positive");

    BSDEModel m;
    m.name = name;
    m.dim_y = 1;
    m.dim_w = k;
    const auto affine = [&](double intercept, double slope) {
        std::vector<double> s(k, 0.0);
        s[0] = slope;
        return Terminal::Affine{{intercept}, s};
    };
    const auto sin_clip = [&](CP c1, double c2, double level) {
        m.c1 = c1;
        m.c2 = CP::constant(c2);
        m.generator.body = Generator::SinClip{c1, CP::constant(c2), level};
    };

    if (name == "zero") {
        m.terminal.body = Terminal::Constant{{v("value")}};
    } else if (name == "martingale") {
        m.terminal.body = affine(v("intercept"), v("slope"));
    } else if (name == "constant_driver") {
        m.generator.body = Generator::Constant{{v("value")}};
        m.terminal.body = Terminal::Constant{{v("terminal")}};
    } else if (name == "linear_decay") {
        m.generator.body =
            Generator::Linear{CP::constant(-v("r"), false), constant_b(0.0, k), CP::constant(0.0, false)};
        m.terminal.body = Terminal::Constant{{v("terminal")}};
        m.c1 = CP::constant(std::abs(v("r")));
    } else if (name == "linear") {
        m.generator.body = Generator::Linear{CP::constant(v("a"), false), constant_b(v("b"), k),
                                             CP::constant(v("c"), false)};
        m.terminal.body = affine(v("intercept"), v("slope"));
        m.c1 = CP::constant(std::abs(v("a")));
        // |b sum_l z_l| <= |b| sqrt(k) |z|
        m.c2 = CP::constant(std::abs(v("b")) * std::sqrt(static_cast<double>(k)));
    } else if (name == "bounded") {
        if (v("c1") < 0 || v("c2") < 0) throw std::invalid_argument("model 'bounded': c1, c2 must be >= 0");
        sin_clip(CP::constant(v("c1")), v("c2"), v("level"));
        m.terminal.body = Terminal::Sine{v("amplitude"), v("frequency")};
    } else if (name == "z_contraction") {
        m.generator.body =
            Generator::Linear{CP::constant(0.0, false), constant_b(v("b"), k), CP::constant(0.0, false)};
        m.terminal.body = Terminal::Sine{1.0, 1.0};
        m.c2 = CP::constant(std::abs(v("b")) * std::sqrt(static_cast<double>(k)));
    } else if (name == "unbounded") {
        if (v("scale") < 0 || v("c2") < 0) throw std::invalid_argument("model 'unbounded': scale, c2 must be >= 0");
        sin_clip(CP::abs_brownian(v("scale")), v("c2"), 1.0);
        m.terminal.body = Terminal::Sine{1.0, 1.0};
    } else if (name == "ou_rate") {
        if (v("c2") < 0) throw std::invalid_argument("model 'ou_rate': c2 must be >= 0");
        sin_clip(CP::ou_driven(v("mean"), v("rate"), v("vol")), v("c2"), 1.0);
        m.terminal.body = Terminal::Sine{1.0, 1.0};
    } else if (name == "running_max") {
        if (v("c1") < 0) throw std::invalid_argument("model 'running_max': c1 must be >= 0");
        sin_clip(CP::constant(v("c1")), 0.0, 1.0);
        m.terminal.body = Terminal::RunningMax{v("scale")};
    } else if (name == "exp_square_terminal") {
        m.terminal.body = Terminal::ExpSquare{v("rate")};
    } else if (name == "lipschitz_violation") {
        if (v("c1") < 0) throw std::invalid_argument("model 'lipschitz_violation': c1 must be >= 0");
        m.generator.body = Generator::Linear{CP::constant(v("factor") * v("c1"), false),
                                             constant_b(0.0, k), CP::constant(0.0, false)};
        m.terminal.body = Terminal::Constant{{1.0}};
        m.c1 = CP::constant(v("c1"));
    }

    if (v("drift_abs_w") < 0) throw std::invalid_argument("drift_abs_w must be >= 0");
    if (v("drift_abs_w") != 0.0) {
        if (v("drift_offset") != 0.0) {
            throw std::invalid_argument("drift_offset and drift_abs_w cannot be combined");
        }
        m.generator.offset = CP::abs_brownian(v("drift_abs_w"));
    } else if (v("drift_offset") != 0.0) {
        m.generator.offset = CP::constant(v("drift_offset"), false);
    }
    m.terminal.offset = v("terminal_shift");
    m.validate();
    return m;
}

}  // namespace ubsde
