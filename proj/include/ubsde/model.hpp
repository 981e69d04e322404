#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ubsde/brownian.hpp"
#include "ubsde/coefficient.hpp"
#include "ubsde/field.hpp"

namespace ubsde {

// Generator f(t, y, z) with y in R^d and z in R^{d x k} stored row-major
// (z[j * k + l]).
struct Generator {
    struct Zero {};
    struct Constant {
        std::vector<double> value;  // size d
    };
    // f_j = a(t) y_j + sum_l b_l(t) z_jl + c(t)
    struct Linear {
        CoefficientProcess a;
        std::vector<CoefficientProcess> b;  // size k
        CoefficientProcess c;
    };
    // f_j = c1(t) sin(y_j) + c2(t) clip(sum_l z_jl / sqrt(k), -level, level).
    // Both maps are 1-Lipschitz in the Euclidean norm, so the moduli are
    // exactly (c1, c2).
    struct SinClip {
        CoefficientProcess c1;
        CoefficientProcess c2;
        double level = 1.0;
    };
    using Body = std::variant<Zero, Constant, Linear, SinClip>;

    Body body = Zero{};
    std::optional<CoefficientProcess> offset;  // added to every component

    std::string describe() const;
};

// Terminal condition xi, a functional of the Brownian path up to T.
struct Terminal {
    struct Constant {
        std::vector<double> value;  // size d
    };
    // xi_j = intercept_j + sum_l slope_jl W_l(T)
    struct Affine {
        std::vector<double> intercept;  // size d
        std::vector<double> slope;      // size d * k, row-major
    };
    // xi_j = amplitude sin(frequency W1(T))
    struct Sine {
        double amplitude = 1.0;
        double frequency = 1.0;
    };
    // xi_j = exp(rate W1(T)^2)
    struct ExpSquare {
        double rate = 1.0;
    };
    // xi_j = scale max_i W1(t_i)
    struct RunningMax {
        double scale = 1.0;
    };
    using Body = std::variant<Constant, Affine, Sine, ExpSquare, RunningMax>;

    Body body = Constant{{0.0}};
    double offset = 0.0;  // added to every component

    std::string describe() const;
};

// A BSDE instance y(t) = xi + int_t^T f ds - int_t^T z dW together with the
// declared Lipschitz moduli (c1, c2).
struct BSDEModel {
    std::string name;
    std::size_t dim_y = 1;
    std::size_t dim_w = 1;
    Generator generator;
    Terminal terminal;
    CoefficientProcess c1 = CoefficientProcess::constant(0.0);
    CoefficientProcess c2 = CoefficientProcess::constant(0.0);

    // Throws std::invalid_argument when vector sizes disagree with (d, k) or a
    // declared modulus is not flagged nonnegative.
    void validate() const;
};

// A model with every process sampled on one ensemble. Generator evaluation is
// then a pure function of (node, path, y, z).
class BoundModel {
public:
    BoundModel(BSDEModel model, const BrownianEnsemble& ensemble);

    const BSDEModel& model() const { return model_; }
    const BrownianEnsemble& ensemble() const { return *ensemble_; }
    std::size_t dim_y() const { return model_.dim_y; }
    std::size_t dim_w() const { return model_.dim_w; }

    // out = f(t_node, y, z) on the given path. Sizes: y d, z d*k, out d.
    void generator(std::size_t node, std::size_t path, std::span<const double> y,
                   std::span<const double> z, std::span<double> out) const;

    const PathField& terminal() const { return terminal_; }  // (paths, 1, d)
    const PathField& c1() const { return c1_; }
    const PathField& c2() const { return c2_; }

    bool depends_on_y() const;
    bool depends_on_z() const;

private:
    BSDEModel model_;
    const BrownianEnsemble* ensemble_;
    PathField terminal_;
    PathField c1_;
    PathField c2_;
    std::vector<PathField> body_fields_;  // kind-specific, see model.cpp
    std::optional<PathField> offset_;
};

// Checked single evaluation; throws on dimension mismatch.
std::vector<double> eval_generator(const BoundModel& model, std::size_t node, std::size_t path,
                                   std::span<const double> y, std::span<const double> z);

}  // namespace ubsde
