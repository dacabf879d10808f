#include "catex/surrogate/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "catex/errors.hpp"
#include "catex/rng.hpp"

namespace catex {

Mlp::Mlp(std::vector<int> sizes, std::uint64_t init_seed) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) throw InvalidInput("Mlp: need at least input and output sizes");
    for (int s : sizes_)
        if (s <= 0) throw InvalidInput("Mlp: layer sizes must be positive");
    build_offsets();
    // Xavier/Glorot uniform init, biases at zero
    SplitMix64 rng(init_seed);
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        int fan_in = sizes_[l], fan_out = sizes_[l + 1];
        double scale = std::sqrt(6.0 / (fan_in + fan_out));
        int w0 = w_offset_[l];
        for (int i = 0; i < fan_in * fan_out; ++i) params_[w0 + i] = rng.uniform(-scale, scale);
    }
}

void Mlp::build_offsets() {
    w_offset_.clear();
    b_offset_.clear();
    int total = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        w_offset_.push_back(total);
        total += sizes_[l] * sizes_[l + 1];
        b_offset_.push_back(total);
        total += sizes_[l + 1];
    }
    params_.assign(total, 0.0);
}

void Mlp::forward_one(const double* x, double* y) const {
    std::vector<double> cur(x, x + sizes_[0]);
    std::vector<double> next;
    const std::size_t n_layers = sizes_.size() - 1;
    for (std::size_t l = 0; l < n_layers; ++l) {
        int in = sizes_[l], out = sizes_[l + 1];
        next.assign(out, 0.0);
        const double* w = params_.data() + w_offset_[l];
        const double* b = params_.data() + b_offset_[l];
        for (int o = 0; o < out; ++o) {
            double s = b[o];
            const double* wrow = w + o * in;
            for (int i = 0; i < in; ++i) s += wrow[i] * cur[i];
            next[o] = (l + 1 < n_layers) ? std::tanh(s) : s;  // linear output layer
        }
        cur.swap(next);
    }
    for (int o = 0; o < sizes_.back(); ++o) y[o] = cur[o];
}

double Mlp::loss_and_grad(const Matrix& x, const Matrix& y, const std::vector<int>& rows,
                          std::vector<double>& grad) const {
    const std::size_t n_layers = sizes_.size() - 1;
    if (x.cols != static_cast<std::size_t>(sizes_.front()) ||
        y.cols != static_cast<std::size_t>(sizes_.back()) || x.rows != y.rows)
        throw ShapeMismatch("Mlp::loss_and_grad: data shape");
    if (rows.empty()) throw InvalidInput("Mlp::loss_and_grad: empty batch");
    grad.assign(params_.size(), 0.0);

    std::vector<std::vector<double>> act(n_layers + 1);   // post-activation per layer
    std::vector<std::vector<double>> delta(n_layers + 1); // dLoss/d(activation input)
    const double norm = 1.0 / (static_cast<double>(rows.size()) * sizes_.back());
    double loss = 0.0;
    for (int r : rows) {
        act[0].assign(x.row(r), x.row(r) + sizes_[0]);
        for (std::size_t l = 0; l < n_layers; ++l) {
            int in = sizes_[l], out = sizes_[l + 1];
            act[l + 1].assign(out, 0.0);
            const double* w = params_.data() + w_offset_[l];
            const double* b = params_.data() + b_offset_[l];
            for (int o = 0; o < out; ++o) {
                double s = b[o];
                const double* wrow = w + o * in;
                for (int i = 0; i < in; ++i) s += wrow[i] * act[l][i];
                act[l + 1][o] = (l + 1 < n_layers) ? std::tanh(s) : s;
            }
        }
        // output delta from the pooled-MSE loss
        delta[n_layers].assign(sizes_.back(), 0.0);
        for (int o = 0; o < sizes_.back(); ++o) {
            double diff = act[n_layers][o] - y.at(static_cast<std::size_t>(r), o);
            loss += norm * diff * diff;
            delta[n_layers][o] = 2.0 * norm * diff;
        }
        // backpropagate
        for (std::size_t l = n_layers; l-- > 0;) {
            int in = sizes_[l], out = sizes_[l + 1];
            double* gw = grad.data() + w_offset_[l];
            double* gb = grad.data() + b_offset_[l];
            const double* w = params_.data() + w_offset_[l];
            for (int o = 0; o < out; ++o) {
                double d = delta[l + 1][o];
                gb[o] += d;
                double* gwrow = gw + o * in;
                for (int i = 0; i < in; ++i) gwrow[i] += d * act[l][i];
            }
            if (l > 0) {
                delta[l].assign(in, 0.0);
                for (int o = 0; o < out; ++o) {
                    double d = delta[l + 1][o];
                    const double* wrow = w + o * in;
                    for (int i = 0; i < in; ++i) delta[l][i] += d * wrow[i];
                }
                // tanh' = 1 - tanh^2, expressed via the stored activation
                for (int i = 0; i < in; ++i) delta[l][i] *= 1.0 - act[l][i] * act[l][i];
            }
        }
    }
    return loss;
}

std::vector<double> Mlp::train(const Matrix& x, const Matrix& y, int epochs, int batch_size,
                               double learning_rate, double momentum,
                               std::uint64_t shuffle_seed) {
    if (epochs <= 0 || batch_size <= 0) throw InvalidInput("Mlp::train: bad schedule");
    std::vector<int> order(x.rows);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> velocity(params_.size(), 0.0), grad;
    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(epochs));
    std::vector<int> batch;
    std::vector<double> out(static_cast<std::size_t>(sizes_.back()));
    for (int e = 0; e < epochs; ++e) {
        SplitMix64 rng = derived_stream(shuffle_seed, static_cast<std::uint64_t>(e));
        shuffle_indices(order, rng);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(batch_size)) {
            std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(batch_size));
            batch.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(stop));
            loss_and_grad(x, y, batch, grad);
            for (std::size_t p = 0; p < params_.size(); ++p) {
                velocity[p] = momentum * velocity[p] - learning_rate * grad[p];
                params_[p] += velocity[p];
            }
        }
        // full-pass training loss for the epoch history
        double loss = 0.0;
        for (std::size_t r = 0; r < x.rows; ++r) {
            forward_one(x.row(r), out.data());
            for (int o = 0; o < sizes_.back(); ++o) {
                double diff = out[static_cast<std::size_t>(o)] - y.at(r, o);
                loss += diff * diff;
            }
        }
        history.push_back(loss / (static_cast<double>(x.rows) * sizes_.back()));
    }
    return history;
}

}  // namespace catex
