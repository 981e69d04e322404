#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ubsde/brownian.hpp"
#include "ubsde/diagnostics.hpp"
#include "ubsde/field.hpp"
#include "ubsde/model.hpp"
#include "ubsde/regression.hpp"
#include "ubsde/weights.hpp"

namespace ubsde {

// Sampled solution pair. y is (paths, nodes, d) and z is (paths, nodes, d*k)
// with z row-major in (j, l). z on the last node repeats the last step's
// value so that trapezoid integrals cover [0, T].
struct SolutionEnsemble {
    TimeGrid grid;
    PathField y;
    PathField z;
    struct Meta {
        std::string scheme;
        int iterations = 0;
        int inner_iterations = 0;
        bool converged = true;
        std::uint64_t seed = 0;
        std::vector<std::string> warnings;
    } meta;

    std::size_t dim_y() const { return y.width(); }
};

// Per-node regressors on the Brownian state W(t_i), i = 0..N-1. Built once per
// ensemble; every backward sweep on that ensemble reuses them.
class RegressionPlan {
public:
    RegressionPlan(const BrownianEnsemble& ensemble, const RegressionBasis& basis,
                   Execution exec = Execution::parallel);

    const BrownianEnsemble& ensemble() const { return *ensemble_; }
    const NodeRegressor& at(std::size_t node) const { return regressors_[node]; }
    const RegressionBasis& basis() const { return basis_; }
    Execution exec() const { return exec_; }

private:
    const BrownianEnsemble* ensemble_;
    RegressionBasis basis_;
    Execution exec_;
    std::vector<NodeRegressor> regressors_;
};

// Weight geometry of one variant: alpha and p = exp(int alpha).
struct WeightContext {
    Variant variant;
    AlphaProcess alpha;
    WeightProcess weight;
};

WeightContext make_weight_context(const BoundModel& model, Variant variant,
                                  const WeightParams& params, const CoefficientProcess& gamma,
                                  double log_cap = kDefaultLogWeightCap);

// Backward sweep of y(t) = xi + int_t^T f(s, phi, psi) ds - int_t^T z dW:
//   y_N = xi
//   yhat_i = E_i[y_{i+1}]
//   z_i = E_i[(y_{i+1} - yhat_i) dW_i'] / dt_i
//   y_i = yhat_i + f(t_i, phi_i, psi_i) dt_i
// phi is (paths, nodes, d), psi is (paths, nodes, d*k).
SolutionEnsemble inner_solve(const BoundModel& model, const PathField& phi, const PathField& psi,
                             const RegressionPlan& plan);

// Explicit one-pass scheme: z_i as above, then y_i = yhat_i + f(t_i, yhat_i, z_i) dt_i.
SolutionEnsemble solve_direct(const BoundModel& model, const RegressionPlan& plan);

struct PicardSettings {
    double tol = 1e-8;          // stop when the active weighted increment is below tol
    int max_iter = 50;
    double inner_tol = 1e-10;   // z-iteration tolerance inside the y-scheme
    int inner_max_iter = 200;
    bool warm_start = true;     // y-scheme: start each z-iteration from the previous z
    double slack = 1.5;         // envelope check slack (diagnostic only)
    NoiseFloor noise;
};

struct PicardResult {
    SolutionEnsemble solution;
    IterationDiagnostics diagnostics;
    RatioCheck envelope_check;  // step-ratio check at the configured slack
};

// z-iteration with phi frozen: psi = z_{n-1}, z_0 = 0 (or z_start). The
// increment metric is mu_n in the given weight; the envelope uses beta2
// (or beta2_bar when the context is A2).
PicardResult solve_picard_z(const BoundModel& model, const PathField& phi,
                            const RegressionPlan& plan, const WeightContext& weights,
                            const WeightParams& params, const PicardSettings& settings,
                            const PathField* z_start = nullptr);

// y-iteration: y_0 = 0, each outer step solves the z-iteration with
// phi = y_{n-1}. Stops on nu_n (A1) or lambda_n (A2) below tol.
PicardResult solve_picard_y(const BoundModel& model, const RegressionPlan& plan,
                            const WeightContext& weights, const WeightParams& params,
                            const PicardSettings& settings);

// Numeric check of the frozen-argument estimate chain
//   E|int_0^T f(phi, psi) ds|^2
//     <= E[(int p^{-1} alpha ds)(int p |f(phi,psi)|^2 / alpha ds)]
//     <= (max_path int p^{-1} alpha ds) E int p |f|^2 / alpha ds
//     <= bound
// with bound = 3/beta1 |phi|_p + 3/beta2 |psi|_p + 3 |f0/sqrt(alpha)|_p (A1) or
// 3/beta1_bar^2 |sqrt(alpha) phi|_p + 3/beta2_bar |psi|_p + 3 |f0/sqrt(alpha)|_p (A2).
struct EstimateChain {
    double drift_square = 0.0;
    double cauchy_schwarz = 0.0;
    double inverse_weight_mass = 0.0;  // max over paths of int p^{-1} alpha ds
    double weighted_generator = 0.0;
    double bound = 0.0;
    bool holds = false;
};

EstimateChain frozen_estimate_chain(const BoundModel& model, const PathField& phi,
                                    const PathField& psi, const WeightContext& weights,
                                    const WeightParams& params);

// Columns: path, node, t, y_0..y_{d-1}, z_0..z_{dk-1}; first max_paths paths.
void write_solution_table(std::ostream& out, const SolutionEnsemble& solution,
                          std::size_t max_paths);

}  // namespace ubsde
