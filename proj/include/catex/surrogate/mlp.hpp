#pragma once

#include <cstdint>
#include <vector>

#include "catex/matrix.hpp"

namespace catex {

// Fully connected multilayer perceptron regressor: tanh hidden layers,
// linear output, trained by mini-batch gradient descent with momentum on the
// mean-square-error loss. Parameters live in one flat vector (layer by layer,
// weights row-major then biases), which keeps serialization trivial and lets
// tests compare backpropagation against finite differences parameter-wise.
class Mlp {
  public:
    Mlp() = default;
    // sizes: input, hidden..., output; e.g. {6, 64, 64, 3}
    Mlp(std::vector<int> sizes, std::uint64_t init_seed);

    const std::vector<int>& sizes() const { return sizes_; }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    void forward_one(const double* x, double* y) const;

    // Mean MSE over the given rows (pooled over outputs) and its gradient
    // with respect to every parameter. grad is resized and overwritten.
    double loss_and_grad(const Matrix& x, const Matrix& y, const std::vector<int>& rows,
                         std::vector<double>& grad) const;

    // SGD with momentum; returns per-epoch full-dataset training loss.
    std::vector<double> train(const Matrix& x, const Matrix& y, int epochs, int batch_size,
                              double learning_rate, double momentum, std::uint64_t shuffle_seed);

  private:
    std::vector<int> sizes_;
    std::vector<double> params_;
    std::vector<int> w_offset_;  // per layer: start of weight block
    std::vector<int> b_offset_;  // per layer: start of bias block

    void build_offsets();
};

}  // namespace catex
