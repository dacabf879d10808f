#pragma once

#include <vector>

#include "catex/matrix.hpp"

namespace catex {

// Per-column min-max scaler onto [-1, 1]. Columns with max = min carry no
// information and are mapped to 0 (and inverted back to their min), so
// constant features degrade gracefully instead of dividing by zero.
struct MinMaxScaler {
    std::vector<double> min;
    std::vector<double> max;

    void fit(const Matrix& x);
    bool fitted() const { return !min.empty(); }

    void transform_row(const double* in, double* out) const;
    void inverse_row(const double* in, double* out) const;

    Matrix transform(const Matrix& x) const;
    Matrix inverse(const Matrix& x) const;
};

}  // namespace catex
