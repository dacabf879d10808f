#include "catex/surrogate/scaler.hpp"

#include "catex/errors.hpp"

namespace catex {

void MinMaxScaler::fit(const Matrix& x) {
    if (x.rows == 0 || x.cols == 0) throw InvalidInput("MinMaxScaler::fit: empty matrix");
    min.assign(x.cols, 0.0);
    max.assign(x.cols, 0.0);
    for (std::size_t c = 0; c < x.cols; ++c) {
        double lo = x.at(0, c), hi = x.at(0, c);
        for (std::size_t r = 1; r < x.rows; ++r) {
            double v = x.at(r, c);
            if (v < lo) lo = v;
            if (v > hi) hi = v;
        }
        min[c] = lo;
        max[c] = hi;
    }
}

void MinMaxScaler::transform_row(const double* in, double* out) const {
    for (std::size_t c = 0; c < min.size(); ++c) {
        double span = max[c] - min[c];
        out[c] = (span > 0.0) ? (in[c] - min[c]) / span * 2.0 - 1.0 : 0.0;
    }
}

void MinMaxScaler::inverse_row(const double* in, double* out) const {
    for (std::size_t c = 0; c < min.size(); ++c) {
        double span = max[c] - min[c];
        out[c] = (span > 0.0) ? (in[c] + 1.0) * 0.5 * span + min[c] : min[c];
    }
}

Matrix MinMaxScaler::transform(const Matrix& x) const {
    if (x.cols != min.size()) throw ShapeMismatch("MinMaxScaler::transform: column count");
    Matrix out(x.rows, x.cols);
    for (std::size_t r = 0; r < x.rows; ++r) transform_row(x.row(r), out.row(r));
    return out;
}

Matrix MinMaxScaler::inverse(const Matrix& x) const {
    if (x.cols != min.size()) throw ShapeMismatch("MinMaxScaler::inverse: column count");
    Matrix out(x.rows, x.cols);
    for (std::size_t r = 0; r < x.rows; ++r) inverse_row(x.row(r), out.row(r));
    return out;
}

}  // namespace catex
