#pragma once

#include <cstddef>
#include <vector>

#include "catex/matrix.hpp"

namespace catex {

// Error metrics for one-shot prediction and autoregressive rollouts. All
// functions are pure. Matrices are (samples x targets); rollout fields are
// per-step (cells x 3 cations) concentration snapshots.

struct ErrorReport {
    std::vector<double> mse_per_target;   // one entry per column
    std::vector<double> rmse_per_target;
    double mse = 0.0;    // pooled over targets
    double rmse = 0.0;
    double r2 = 0.0;     // pooled coefficient of determination
    std::size_t n_samples = 0;
};

// Pooled mean square error: (1 / (N * n_targets)) * sum of squared residuals.
// Throws LengthMismatch on shape disagreement or empty input.
double mse(const Matrix& truth, const Matrix& pred);

// sqrt(mse)
double rmse(const Matrix& truth, const Matrix& pred);

// Coefficient of determination pooled over targets: 1 - SS_res / SS_tot with
// per-target means in SS_tot. Throws DegenerateTruth when every target column
// is constant, LengthMismatch as above plus when fewer than 2 samples.
double r2(const Matrix& truth, const Matrix& pred);

// Full per-target + pooled report in one pass.
ErrorReport error_report(const Matrix& truth, const Matrix& pred);

// Mean over time steps of the per-step RMSE between two rollouts' fields.
// Each element of the vectors is one step's (cells x 3) cation snapshot.
// With outflow_only, only the last cell (outlet) of each snapshot enters.
// Throws GridMismatch when step counts or shapes disagree or input is empty.
double rollout_error(const std::vector<Matrix>& ref, const std::vector<Matrix>& test,
                     bool outflow_only = false);

}  // namespace catex
