#pragma once

#include <memory>
#include <string>
#include <variant>

#include "ubsde/brownian.hpp"
#include "ubsde/field.hpp"

namespace ubsde {

// Scalar adapted process evaluated on a Brownian ensemble, e.g. the Lipschitz
// moduli c1, c2 or the dials gamma, gamma_bar. All Brownian-driven kinds read
// the first Brownian component.
class CoefficientProcess {
public:
    struct Constant {
        double value;
    };
    struct AbsBrownian {
        double scale;  // scale * |W1(t)|
    };
    struct SquaredBrownian {
        double scale;  // scale * W1(t)^2
    };
    struct OuDriven {
        double mean;  // X(0) = mean
        double rate;
        double vol;
    };
    struct Table {
        std::shared_ptr<const PathField> samples;  // (paths, nodes, 1)
    };
    using Kind = std::variant<Constant, AbsBrownian, SquaredBrownian, OuDriven, Table>;

    CoefficientProcess() : kind_(Constant{0.0}) {}
    CoefficientProcess(Kind kind, bool nonneg);

    static CoefficientProcess constant(double value, bool nonneg = true) {
        return {Constant{value}, nonneg};
    }
    static CoefficientProcess abs_brownian(double scale) { return {AbsBrownian{scale}, true}; }
    static CoefficientProcess squared_brownian(double scale) {
        return {SquaredBrownian{scale}, true};
    }
    static CoefficientProcess ou_driven(double mean, double rate, double vol, bool nonneg = true) {
        return {OuDriven{mean, rate, vol}, nonneg};
    }
    static CoefficientProcess table(PathField samples, bool nonneg = true) {
        return {Table{std::make_shared<const PathField>(std::move(samples))}, nonneg};
    }

    const Kind& kind() const { return kind_; }
    bool nonneg() const { return nonneg_; }
    bool is_constant() const { return std::holds_alternative<Constant>(kind_); }
    // Value of a Constant process; throws for other kinds.
    double constant_value() const;

    // Samples on every (path, node) of the ensemble: a (paths, nodes, 1) field.
    // The OU kind integrates X by Euler steps on the ensemble increments and
    // reports |X| when the nonneg flag is set. Throws std::domain_error when a
    // nonneg process evaluates negative.
    PathField sample(const BrownianEnsemble& ensemble) const;

    std::string describe() const;

private:
    Kind kind_;
    bool nonneg_ = true;
};

}  // namespace ubsde
