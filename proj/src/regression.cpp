#include "ubsde/regression.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ubsde {

void RegressionBasis::validate() const {
    if (kind == Kind::polynomial && degree < 0) {
        throw std::invalid_argument("regression basis: degree must be >= 0");
    }
    if (kind == Kind::piecewise && bins < 1) {
        throw std::invalid_argument("regression basis: bins must be >= 1");
    }
    if (!(ridge >= 0.0)) throw std::invalid_argument("regression basis: ridge must be >= 0");
}

std::string RegressionBasis::describe() const {
    std::ostringstream s;
    if (kind == Kind::polynomial) {
        s << "polynomial(degree=" << degree << ",ridge=" << ridge << ")";
    } else {
        s << "piecewise(bins=" << bins << ")";
    }
    return s.str();
}

namespace {

constexpr std::size_t kMaxBasis = 256;

void enumerate_powers(std::size_t dims, int max_degree, std::vector<int>& current,
                      std::size_t pos, int used, std::vector<std::vector<int>>& out) {
    if (pos == dims) {
        if (used > 0) out.push_back(current);
        return;
    }
    for (int e = 0; e + used <= max_degree; ++e) {
        current[pos] = e;
        enumerate_powers(dims, max_degree, current, pos + 1, used + e, out);
    }
    current[pos] = 0;
}

}  // namespace

NodeRegressor::NodeRegressor(const Eigen::MatrixXd& state, const RegressionBasis& basis,
                             Execution exec)
    : basis_(basis), exec_(exec), paths_(static_cast<std::size_t>(state.rows())) {
    basis_.validate();
    if (paths_ == 0) throw std::invalid_argument("regression: no paths");

    // Standardize and drop degenerate state columns.
    std::vector<Eigen::Index> active;
    std::vector<double> means, scales;
    for (Eigen::Index c = 0; c < state.cols(); ++c) {
        const double shift = state(0, c);
        double s1 = 0.0, s2 = 0.0;
        for (Eigen::Index p = 0; p < state.rows(); ++p) {
            const double d = state(p, c) - shift;
            s1 += d;
            s2 += d * d;
        }
        const double m = static_cast<double>(paths_);
        const double mean_d = s1 / m;
        const double var = std::max(0.0, s2 / m - mean_d * mean_d);
        const double mean = shift + mean_d;
        const double sd = std::sqrt(var);
        if (sd > 1e-12 * std::max(1.0, std::abs(mean))) {
            active.push_back(c);
            means.push_back(mean);
            scales.push_back(1.0 / sd);
        }
    }
    x_.resize(state.rows(), static_cast<Eigen::Index>(active.size()));
    for (std::size_t a = 0; a < active.size(); ++a) {
        x_.col(static_cast<Eigen::Index>(a)) =
            (state.col(active[a]).array() - means[a]) * scales[a];
    }

    if (basis_.kind == RegressionBasis::Kind::piecewise) {
        num_bins_ = active.empty() ? 1 : static_cast<std::size_t>(basis_.bins);
        if (paths_ < static_cast<std::size_t>(basis_.bins) + 1) {
            throw std::invalid_argument("regression: " + std::to_string(paths_) +
                                        " paths is below basis size + 1 = " +
                                        std::to_string(basis_.bins + 1));
        }
        bin_.resize(paths_);
        for (std::size_t p = 0; p < paths_; ++p) bin_[p] = bin_of(p);
        return;
    }

    std::vector<int> current(active.size(), 0);
    if (!active.empty()) enumerate_powers(active.size(), basis_.degree, current, 0, 0, powers_);
    const std::size_t np = powers_.size();
    if (np >= kMaxBasis) {
        throw std::invalid_argument("regression: basis with " + std::to_string(np + 1) +
                                    " functions is too large");
    }
    if (paths_ < np + 2) {
        throw std::invalid_argument("regression: " + std::to_string(paths_) +
                                    " paths is below basis size + 1 = " + std::to_string(np + 2));
    }
    column_means_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(np));
    if (np == 0) return;

    // Column means, then the centered Gram matrix. row() subtracts the means.
    const auto sums = kernels::reduce(exec_, paths_, np, [&](std::size_t p, std::span<double> acc) {
        double r[kMaxBasis];
        row(p, r);
        for (std::size_t a = 0; a < np; ++a) acc[a] += r[a];
    });
    for (std::size_t a = 0; a < np; ++a) {
        column_means_(static_cast<Eigen::Index>(a)) = sums[a] / static_cast<double>(paths_);
    }
    const auto gram_sums =
        kernels::reduce(exec_, paths_, np * np, [&](std::size_t p, std::span<double> acc) {
            double r[kMaxBasis];
            row(p, r);
            for (std::size_t a = 0; a < np; ++a)
                for (std::size_t b = 0; b <= a; ++b) acc[a * np + b] += r[a] * r[b];
        });
    Eigen::MatrixXd gram(static_cast<Eigen::Index>(np), static_cast<Eigen::Index>(np));
    const double inv_m = 1.0 / static_cast<double>(paths_);
    for (std::size_t a = 0; a < np; ++a) {
        for (std::size_t b = 0; b <= a; ++b) {
            const double v = gram_sums[a * np + b] * inv_m;
            gram(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
            gram(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = v;
        }
        gram(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) += basis_.ridge;
    }
    gram_.compute(gram);
    if (gram_.info() != Eigen::Success || !gram_.isPositive() || !(gram_.rcond() > 1e-14)) {
        throw std::runtime_error("regression singular: design matrix is rank deficient (rcond " +
                                 std::to_string(gram_.rcond()) + ", ridge " +
                                 std::to_string(basis_.ridge) + ")");
    }
}

std::size_t NodeRegressor::basis_size() const {
    if (basis_.kind == RegressionBasis::Kind::piecewise) return num_bins_;
    return powers_.size() + 1;
}

void NodeRegressor::row(std::size_t path, double* out) const {
    const auto p = static_cast<Eigen::Index>(path);
    const std::size_t dims = static_cast<std::size_t>(x_.cols());
    for (std::size_t a = 0; a < powers_.size(); ++a) {
        double v = 1.0;
        for (std::size_t l = 0; l < dims; ++l) {
            const double x = x_(p, static_cast<Eigen::Index>(l));
            for (int e = 0; e < powers_[a][l]; ++e) v *= x;
        }
        out[a] = v - (column_means_.size() ? column_means_(static_cast<Eigen::Index>(a)) : 0.0);
    }
}

std::size_t NodeRegressor::bin_of(std::size_t path) const {
    if (num_bins_ == 1) return 0;
    constexpr double lo = -3.0, hi = 3.0;
    const double x = x_(static_cast<Eigen::Index>(path), 0);
    const double u = (x - lo) / (hi - lo) * static_cast<double>(num_bins_);
    if (!(u > 0.0)) return 0;
    return std::min(num_bins_ - 1, static_cast<std::size_t>(u));
}

Eigen::MatrixXd NodeRegressor::fit(const Eigen::MatrixXd& targets) const {
    if (static_cast<std::size_t>(targets.rows()) != paths_) {
        throw std::invalid_argument("regression: target rows do not match path count");
    }
    const std::size_t m = static_cast<std::size_t>(targets.cols());
    Eigen::MatrixXd fitted(targets.rows(), targets.cols());
    if (m == 0) return fitted;
    const Eigen::RowVectorXd shift = targets.row(0);

    if (basis_.kind == RegressionBasis::Kind::piecewise) {
        const std::size_t width = num_bins_ * (m + 1);
        const auto sums = kernels::reduce(exec_, paths_, width, [&](std::size_t p, std::span<double> acc) {
            const std::size_t b = bin_[p];
            acc[b * (m + 1)] += 1.0;
            for (std::size_t j = 0; j < m; ++j) {
                const auto jj = static_cast<Eigen::Index>(j);
                acc[b * (m + 1) + 1 + j] += targets(static_cast<Eigen::Index>(p), jj) - shift(jj);
            }
        });
        kernels::for_each(exec_, paths_, [&](std::size_t p) {
            const std::size_t b = bin_[p];
            const double count = sums[b * (m + 1)];
            for (std::size_t j = 0; j < m; ++j) {
                const auto jj = static_cast<Eigen::Index>(j);
                fitted(static_cast<Eigen::Index>(p), jj) = shift(jj) + sums[b * (m + 1) + 1 + j] / count;
            }
        });
        return fitted;
    }

    const std::size_t np = powers_.size();
    const std::size_t width = m + np * m;
    const auto sums = kernels::reduce(exec_, paths_, width, [&](std::size_t p, std::span<double> acc) {
        double r[kMaxBasis];
        row(p, r);
        for (std::size_t j = 0; j < m; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            const double d = targets(static_cast<Eigen::Index>(p), jj) - shift(jj);
            acc[j] += d;
            for (std::size_t a = 0; a < np; ++a) acc[m + a * m + j] += r[a] * d;
        }
    });
    const double inv_m = 1.0 / static_cast<double>(paths_);
    Eigen::RowVectorXd mean(static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) {
        mean(static_cast<Eigen::Index>(j)) = shift(static_cast<Eigen::Index>(j)) + sums[j] * inv_m;
    }
    Eigen::MatrixXd coef;
    if (np > 0) {
        Eigen::MatrixXd rhs(static_cast<Eigen::Index>(np), static_cast<Eigen::Index>(m));
        for (std::size_t a = 0; a < np; ++a)
            for (std::size_t j = 0; j < m; ++j)
                rhs(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(j)) =
                    sums[m + a * m + j] * inv_m;
        coef = gram_.solve(rhs);
    }
    kernels::for_each(exec_, paths_, [&](std::size_t p) {
        double r[kMaxBasis];
        row(p, r);
        for (std::size_t j = 0; j < m; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            double v = mean(jj);
            for (std::size_t a = 0; a < np; ++a) v += r[a] * coef(static_cast<Eigen::Index>(a), jj);
            fitted(static_cast<Eigen::Index>(p), jj) = v;
        }
    });
    return fitted;
}

Eigen::MatrixXd conditional_expectation(const Eigen::MatrixXd& targets,
                                        const Eigen::MatrixXd& state,
                                        const RegressionBasis& basis, Execution exec) {
    return NodeRegressor(state, basis, exec).fit(targets);
}

}  // namespace ubsde
