#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "ubsde/kernels.hpp"

namespace ubsde {

struct RegressionBasis {
    enum class Kind { polynomial, piecewise };
    Kind kind = Kind::polynomial;
    int degree = 3;   // total degree of the monomials in the state components
    int bins = 16;    // piecewise: equal-width bins of the first standardized component
    double ridge = 1e-8;

    static RegressionBasis polynomial(int degree, double ridge = 1e-8) {
        return {Kind::polynomial, degree, 16, ridge};
    }
    static RegressionBasis piecewise(int bins) { return {Kind::piecewise, 0, bins, 0.0}; }

    void validate() const;
    std::string describe() const;
};

// Least-squares projection onto functions of a per-path state, built once per
// time node and reused for every target (Picard iterations share the design).
//
// The state columns are standardized by their sample mean and deviation;
// columns with zero spread carry no information and are dropped. The
// polynomial fit has an unpenalized intercept: targets and basis columns are
// centered, the ridge acts on the centered Gram matrix only. A constant target
// is therefore reproduced exactly. Piecewise bases fit bin means directly.
class NodeRegressor {
public:
    NodeRegressor(const Eigen::MatrixXd& state, const RegressionBasis& basis,
                  Execution exec = Execution::parallel);

    std::size_t num_paths() const { return paths_; }
    // Number of basis functions including the constant.
    std::size_t basis_size() const;

    // targets: (paths x m); returns the fitted values, same shape.
    Eigen::MatrixXd fit(const Eigen::MatrixXd& targets) const;

private:
    void row(std::size_t path, double* out) const;  // centered non-constant basis row
    std::size_t bin_of(std::size_t path) const;

    RegressionBasis basis_;
    Execution exec_;
    std::size_t paths_;
    Eigen::MatrixXd x_;                      // standardized active state, paths x active
    std::vector<std::vector<int>> powers_;   // exponent vectors of non-constant monomials
    Eigen::VectorXd column_means_;
    Eigen::LDLT<Eigen::MatrixXd> gram_;
    std::vector<std::size_t> bin_;
    std::size_t num_bins_ = 1;
};

// One-shot form: fitted E[target | state] per path.
Eigen::MatrixXd conditional_expectation(const Eigen::MatrixXd& targets,
                                        const Eigen::MatrixXd& state,
                                        const RegressionBasis& basis,
                                        Execution exec = Execution::parallel);

}  // namespace ubsde
