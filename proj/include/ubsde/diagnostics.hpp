#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ubsde/field.hpp"
#include "ubsde/grid.hpp"
#include "ubsde/weights.hpp"

namespace ubsde {

// Contraction bookkeeping for the Picard schemes.
//
// For consecutive iterates (y_{n-1}, z_{n-1}) -> (y_n, z_n):
//   eta_n    = E int p |y_n - y_{n-1}|^2 dt
//   mu_n     = E int p |z_n - z_{n-1}|^2 dt
//   nu_n     = eta_n, named separately when it is the active y-scheme sequence
//   lambda_n = E int p alpha |y_n - y_{n-1}|^2 dt
// The active sequence a_n depends on the scheme and is compared against
//   z-scheme:      beta2^{-(n-1)} a_1
//   y-scheme (A1): beta1^{-(n-1)} a_1 / (n-1)!
//   y-scheme (A2): kappa^{n-1} a_1
enum class SchemeKind { z_picard, y_picard_a1, y_picard_a2 };

std::string to_string(SchemeKind s);

struct IterationRecord {
    int n = 0;
    MonteCarloEstimate eta;
    MonteCarloEstimate mu;
    MonteCarloEstimate nu;
    MonteCarloEstimate lambda;
    double active = 0.0;
    double active_se = 0.0;
    double envelope = 0.0;
    double ratio = 0.0;  // active / envelope
    bool usable = false;
};

struct NoiseFloor {
    double se_factor = 10.0;        // usable only if a_n > se_factor * SE(a_n)
    double roundoff_floor = 1e-20;  // ... and a_n > roundoff_floor * a_1
};

struct IterationDiagnostics {
    SchemeKind scheme = SchemeKind::z_picard;
    double rate = 1.0;  // beta2, beta1 or kappa
    NoiseFloor noise;
    std::vector<IterationRecord> records;

    // Theoretical per-step factor of the active sequence (1/beta2, kappa);
    // for the A1 y-scheme it is 1/(beta1 n) and depends on n.
    double step_factor(int n) const;
};

struct Iterate {
    PathField y;
    PathField z;
};

// Incremental form used by solvers that keep only the last two iterates.
class DiagnosticsBuilder {
public:
    DiagnosticsBuilder(SchemeKind scheme, double rate, const WeightProcess& weight,
                       const TimeGrid& grid, const PathField* alpha = nullptr,
                       NoiseFloor noise = {}, Execution exec = Execution::parallel);

    const IterationRecord& add(const Iterate& previous, const Iterate& current);
    const IterationDiagnostics& diagnostics() const { return diag_; }
    IterationDiagnostics take() { return std::move(diag_); }

private:
    const WeightProcess& weight_;
    const TimeGrid& grid_;
    const PathField* alpha_;
    Execution exec_;
    IterationDiagnostics diag_;
};

// iterates[0] is the starting point (y_0, z_0); one record per later iterate.
// lambda needs alpha; without it lambda is reported as 0.
IterationDiagnostics compute_diagnostics(std::span<const Iterate> iterates, SchemeKind scheme,
                                         double rate, const WeightProcess& weight,
                                         const TimeGrid& grid, const PathField* alpha = nullptr,
                                         NoiseFloor noise = {},
                                         Execution exec = Execution::parallel);

struct RatioCheck {
    bool pass = true;
    int pairs = 0;          // consecutive usable pairs examined
    double worst = 0.0;     // max of measured ratio / allowed ratio
    std::string detail;
};

// a_{n+1}/a_n <= factor * slack over consecutive usable records. For the A1
// y-scheme the factor is the per-step envelope factor 1/(beta1 n).
RatioCheck check_step_ratios(const IterationDiagnostics& diag, double slack);

// active/envelope is non-increasing over consecutive usable records.
RatioCheck check_envelope_monotone(const IterationDiagnostics& diag);

// Least-squares slope of log a_n against n over usable records; NaN if fewer
// than two usable records.
double log_decay_slope(const IterationDiagnostics& diag);

int usable_count(const IterationDiagnostics& diag);

// Columns: n, eta, eta_se, mu, mu_se, nu, nu_se, lambda, lambda_se, active,
// active_se, envelope, ratio, usable.
void write_diagnostics_table(std::ostream& out, const IterationDiagnostics& diag);

// Two-column plot series: n, log(active).
void write_log_series(std::ostream& out, const IterationDiagnostics& diag);

}  // namespace ubsde
