#include "catex/surrogate/linear.hpp"

#include <cmath>
#include <vector>

#include "catex/errors.hpp"

namespace catex {

LinearModel fit_linear(const Matrix& x, const std::vector<double>& y, double ridge) {
    if (x.rows == 0 || x.cols == 0) throw InvalidInput("fit_linear: empty matrix");
    if (y.size() != x.rows) throw ShapeMismatch("fit_linear: target length");
    const std::size_t d = x.cols + 1;  // augmented with the constant column

    // normal equations A beta = b, A = Xa^T Xa + ridge I, b = Xa^T y
    std::vector<double> a(d * d, 0.0), b(d, 0.0);
    for (std::size_t r = 0; r < x.rows; ++r) {
        const double* row = x.row(r);
        for (std::size_t i = 0; i < d; ++i) {
            double xi = (i < x.cols) ? row[i] : 1.0;
            b[i] += xi * y[r];
            for (std::size_t j = i; j < d; ++j) {
                double xj = (j < x.cols) ? row[j] : 1.0;
                a[i * d + j] += xi * xj;
            }
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        a[i * d + i] += ridge;
        for (std::size_t j = 0; j < i; ++j) a[i * d + j] = a[j * d + i];
    }

    // Cholesky A = L L^T (A is SPD once ridged)
    std::vector<double> l(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i * d + j];
            for (std::size_t k = 0; k < j; ++k) s -= l[i * d + k] * l[j * d + k];
            if (i == j) {
                if (s <= 0.0) throw NonConvergence("fit_linear: normal equations not SPD");
                l[i * d + i] = std::sqrt(s);
            } else {
                l[i * d + j] = s / l[j * d + j];
            }
        }
    }
    // forward then backward substitution
    std::vector<double> z(d, 0.0), beta(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l[i * d + k] * z[k];
        z[i] = s / l[i * d + i];
    }
    for (std::size_t ii = d; ii-- > 0;) {
        double s = z[ii];
        for (std::size_t k = ii + 1; k < d; ++k) s -= l[k * d + ii] * beta[k];
        beta[ii] = s / l[ii * d + ii];
    }

    LinearModel m;
    m.coef.assign(beta.begin(), beta.begin() + static_cast<std::ptrdiff_t>(x.cols));
    m.intercept = beta[d - 1];
    return m;
}

}  // namespace catex
