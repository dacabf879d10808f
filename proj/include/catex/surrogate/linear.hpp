#pragma once

#include <vector>

#include "catex/matrix.hpp"

namespace catex {

// Ordinary least squares for one scalar target: y ~ coef . x + intercept.
// Solved by the normal equations with a tiny ridge term as a singularity
// guard; exact for well-posed problems, graceful for collinear features.
struct LinearModel {
    std::vector<double> coef;
    double intercept = 0.0;

    double predict_one(const double* x) const {
        double s = intercept;
        for (std::size_t i = 0; i < coef.size(); ++i) s += coef[i] * x[i];
        return s;
    }
};

// Fit on (x rows, y entries); ridge defaults to 1e-12 on the normal-equation
// diagonal (intercept included via an augmented constant column).
LinearModel fit_linear(const Matrix& x, const std::vector<double>& y, double ridge = 1e-12);

}  // namespace catex
