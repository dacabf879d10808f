#pragma once

#include <cstdint>
#include <vector>

#include "catex/matrix.hpp"
#include "catex/rng.hpp"

namespace catex {

// CART regression tree grown breadth-first with variance-reduction splits.
// feature < 0 marks a leaf; internal nodes route x[feature] <= threshold to
// left, else to right. Thresholds are midpoints between adjacent distinct
// training values (rounded back to the left value if the midpoint collapses
// onto the right one), ties between equal-gain splits break toward the first
// candidate in (feature order, ascending threshold) — fully deterministic.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // mean target of the node's training rows
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double predict_one(const double* x) const {
        int i = 0;
        while (nodes[i].feature >= 0)
            i = (x[nodes[i].feature] <= nodes[i].threshold) ? nodes[i].left : nodes[i].right;
        return nodes[i].value;
    }
};

// Grows trees over one fixed feature matrix. The per-feature row orderings
// are sorted once in the constructor and reused by every fit call, which is
// what makes boosting hundreds of rounds affordable: each round only changes
// the targets, never the geometry of the split candidates.
class TreeTrainer {
  public:
    explicit TreeTrainer(const Matrix& x);

    // y: one target per row of x. weights: per-row non-negative counts
    // (bootstrap multiplicities), empty means all ones. max_depth <= 0 means
    // unlimited. feature_k > 0 draws that many distinct candidate features
    // per node from rng (random-forest mode; rng required then). leaf_of, if
    // given, receives the leaf node index of every row with weight > 0
    // (-1 for zero-weight rows) so boosting can update fitted values in O(n).
    RegressionTree fit(const std::vector<double>& y, int max_depth, int min_samples_leaf,
                       const std::vector<int>* weights = nullptr, int feature_k = 0,
                       SplitMix64* rng = nullptr, std::vector<int>* leaf_of = nullptr) const;

    std::size_t n_rows() const { return x_->rows; }
    std::size_t n_features() const { return x_->cols; }

  private:
    const Matrix* x_;
    std::vector<std::vector<int>> sorted_;  // [feature] -> rows ascending by value
};

}  // namespace catex
