#include "catex/metrics.hpp"

#include <cmath>

#include "catex/errors.hpp"

namespace catex {

namespace {

void check_pair(const Matrix& truth, const Matrix& pred) {
    if (!truth.same_shape(pred)) throw LengthMismatch("metrics: truth/pred shapes differ");
    if (truth.rows == 0 || truth.cols == 0) throw LengthMismatch("metrics: empty input");
}

}  // namespace

double mse(const Matrix& truth, const Matrix& pred) {
    check_pair(truth, pred);
    double acc = 0.0;
    for (std::size_t i = 0; i < truth.data.size(); ++i) {
        double d = truth.data[i] - pred.data[i];
        acc += d * d;
    }
    return acc / static_cast<double>(truth.data.size());
}

double rmse(const Matrix& truth, const Matrix& pred) { return std::sqrt(mse(truth, pred)); }

double r2(const Matrix& truth, const Matrix& pred) {
    check_pair(truth, pred);
    if (truth.rows < 2) throw LengthMismatch("r2: needs at least 2 samples");
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t c = 0; c < truth.cols; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < truth.rows; ++r) mean += truth.at(r, c);
        mean /= static_cast<double>(truth.rows);
        for (std::size_t r = 0; r < truth.rows; ++r) {
            double res = truth.at(r, c) - pred.at(r, c);
            double dev = truth.at(r, c) - mean;
            ss_res += res * res;
            ss_tot += dev * dev;
        }
    }
    if (ss_tot == 0.0) throw DegenerateTruth("r2: constant truth has no variance to explain");
    return 1.0 - ss_res / ss_tot;
}

ErrorReport error_report(const Matrix& truth, const Matrix& pred) {
    check_pair(truth, pred);
    ErrorReport rep;
    rep.n_samples = truth.rows;
    rep.mse_per_target.assign(truth.cols, 0.0);
    for (std::size_t c = 0; c < truth.cols; ++c) {
        double acc = 0.0;
        for (std::size_t r = 0; r < truth.rows; ++r) {
            double d = truth.at(r, c) - pred.at(r, c);
            acc += d * d;
        }
        rep.mse_per_target[c] = acc / static_cast<double>(truth.rows);
    }
    rep.rmse_per_target.resize(truth.cols);
    double pooled = 0.0;
    for (std::size_t c = 0; c < truth.cols; ++c) {
        rep.rmse_per_target[c] = std::sqrt(rep.mse_per_target[c]);
        pooled += rep.mse_per_target[c];
    }
    rep.mse = pooled / static_cast<double>(truth.cols);
    rep.rmse = std::sqrt(rep.mse);
    if (truth.rows >= 2) {
        try {
            rep.r2 = r2(truth, pred);
        } catch (const DegenerateTruth&) {
            rep.r2 = 0.0;
        }
    }
    return rep;
}

double rollout_error(const std::vector<Matrix>& ref, const std::vector<Matrix>& test,
                     bool outflow_only) {
    if (ref.size() != test.size()) throw GridMismatch("rollout_error: step counts differ");
    if (ref.empty()) throw GridMismatch("rollout_error: empty rollout");
    double acc = 0.0;
    for (std::size_t s = 0; s < ref.size(); ++s) {
        const Matrix& a = ref[s];
        const Matrix& b = test[s];
        if (!a.same_shape(b) || a.rows == 0)
            throw GridMismatch("rollout_error: snapshot shapes differ");
        double step_acc = 0.0;
        std::size_t n = 0;
        std::size_t r0 = outflow_only ? a.rows - 1 : 0;
        for (std::size_t r = r0; r < a.rows; ++r)
            for (std::size_t c = 0; c < a.cols; ++c) {
                double d = a.at(r, c) - b.at(r, c);
                step_acc += d * d;
                ++n;
            }
        acc += std::sqrt(step_acc / static_cast<double>(n));
    }
    return acc / static_cast<double>(ref.size());
}

}  // namespace catex
