#include "catex/surrogate/tree.hpp"

#include <algorithm>
#include <numeric>

#include "catex/errors.hpp"

namespace catex {

namespace {

constexpr int kUnlimitedDepthCap = 64;

// scratch state for one frontier node during a level scan
struct NodeScan {
    double weight = 0.0;       // total weight W
    double sum = 0.0;          // total weighted target S
    double left_weight = 0.0;  // running prefix along the current feature
    double left_sum = 0.0;
    double prev_value = 0.0;   // last x value consumed on this feature
    bool seen_any = false;
    bool splittable = false;
    std::uint32_t feature_mask = 0xffffffffu;  // bit f set: feature f is a candidate
    double best_gain = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;
};

}  // namespace

TreeTrainer::TreeTrainer(const Matrix& x) : x_(&x) {
    if (x.rows == 0 || x.cols == 0) throw InvalidInput("TreeTrainer: empty feature matrix");
    sorted_.resize(x.cols);
    for (std::size_t f = 0; f < x.cols; ++f) {
        auto& order = sorted_[f];
        order.resize(x.rows);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return x.at(a, f) < x.at(b, f); });
    }
}

RegressionTree TreeTrainer::fit(const std::vector<double>& y, int max_depth,
                                int min_samples_leaf, const std::vector<int>* weights,
                                int feature_k, SplitMix64* rng,
                                std::vector<int>* leaf_of) const {
    const Matrix& x = *x_;
    const std::size_t n = x.rows;
    const int n_feat = static_cast<int>(x.cols);
    if (y.size() != n) throw ShapeMismatch("TreeTrainer::fit: target length");
    if (weights && weights->size() != n) throw ShapeMismatch("TreeTrainer::fit: weight length");
    if (feature_k > 0 && rng == nullptr)
        throw InvalidInput("TreeTrainer::fit: feature subsampling needs an rng");
    if (n_feat > 32) throw InvalidInput("TreeTrainer::fit: more than 32 features unsupported");
    if (min_samples_leaf < 1) min_samples_leaf = 1;
    if (max_depth <= 0) max_depth = kUnlimitedDepthCap;

    auto w_of = [&](int r) { return weights ? static_cast<double>((*weights)[r]) : 1.0; };

    RegressionTree tree;
    std::vector<int> node_of(n, -1);
    double root_w = 0.0, root_s = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double w = w_of(static_cast<int>(r));
        if (w > 0.0) {
            node_of[r] = 0;
            root_w += w;
            root_s += w * y[r];
        }
    }
    if (root_w <= 0.0) throw InvalidInput("TreeTrainer::fit: all weights are zero");
    tree.nodes.push_back(TreeNode{});
    tree.nodes[0].value = root_s / root_w;

    int level_begin = 0;
    int level_end = 1;
    std::vector<NodeScan> scan;
    for (int depth = 0; depth < max_depth && level_begin < level_end; ++depth) {
        const int width = level_end - level_begin;
        scan.assign(width, NodeScan{});

        // node totals for this level
        for (std::size_t r = 0; r < n; ++r) {
            int nd = node_of[r];
            if (nd < level_begin) continue;
            double w = w_of(static_cast<int>(r));
            scan[nd - level_begin].weight += w;
            scan[nd - level_begin].sum += w * y[r];
        }
        bool any_splittable = false;
        for (int i = 0; i < width; ++i) {
            scan[i].splittable = scan[i].weight >= 2.0 * min_samples_leaf;
            if (scan[i].splittable && feature_k > 0 && feature_k < n_feat) {
                std::uint32_t mask = 0;
                int chosen = 0;
                while (chosen < feature_k) {
                    auto f = static_cast<unsigned>(rng->uniform_index(n_feat));
                    if (!(mask & (1u << f))) {
                        mask |= 1u << f;
                        ++chosen;
                    }
                }
                scan[i].feature_mask = mask;
            }
            any_splittable = any_splittable || scan[i].splittable;
        }
        if (!any_splittable) break;

        // one pass per feature over the global sorted order; each frontier
        // node sees its own rows in ascending feature order and evaluates the
        // prefix/suffix variance-reduction gain at every distinct-value gap
        for (int f = 0; f < n_feat; ++f) {
            for (int i = 0; i < width; ++i) {
                scan[i].left_weight = 0.0;
                scan[i].left_sum = 0.0;
                scan[i].seen_any = false;
            }
            for (int r : sorted_[f]) {
                int nd = node_of[r];
                if (nd < level_begin) continue;
                NodeScan& s = scan[nd - level_begin];
                if (!s.splittable || !(s.feature_mask & (1u << f))) continue;
                double w = w_of(r);
                if (w <= 0.0) continue;
                double v = x.at(static_cast<std::size_t>(r), static_cast<std::size_t>(f));
                if (s.seen_any && v > s.prev_value && s.left_weight >= min_samples_leaf &&
                    s.weight - s.left_weight >= min_samples_leaf) {
                    double wl = s.left_weight, wr = s.weight - wl;
                    double sl = s.left_sum, sr = s.sum - sl;
                    double gain = sl * sl / wl + sr * sr / wr - s.sum * s.sum / s.weight;
                    if (gain > s.best_gain) {
                        double thr = 0.5 * (s.prev_value + v);
                        if (thr >= v) thr = s.prev_value;  // midpoint collapsed up
                        s.best_gain = gain;
                        s.best_feature = f;
                        s.best_threshold = thr;
                    }
                }
                s.left_weight += w;
                s.left_sum += w * y[r];
                s.prev_value = v;
                s.seen_any = true;
            }
        }

        // materialize children of every node that found a positive-gain split
        int next_begin = static_cast<int>(tree.nodes.size());
        for (int i = 0; i < width; ++i) {
            if (scan[i].best_feature < 0 || !(scan[i].best_gain > 0.0)) continue;
            TreeNode& parent = tree.nodes[level_begin + i];
            parent.feature = scan[i].best_feature;
            parent.threshold = scan[i].best_threshold;
            parent.left = static_cast<int>(tree.nodes.size());
            parent.right = parent.left + 1;
            tree.nodes.push_back(TreeNode{});
            tree.nodes.push_back(TreeNode{});
        }
        if (static_cast<int>(tree.nodes.size()) == next_begin) break;

        // route rows to children and accumulate child means
        std::vector<double> child_w(tree.nodes.size() - next_begin, 0.0);
        std::vector<double> child_s(tree.nodes.size() - next_begin, 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            int nd = node_of[r];
            if (nd < level_begin) continue;
            const TreeNode& parent = tree.nodes[nd];
            if (parent.feature < 0) continue;  // stayed a leaf
            int child = (x.at(r, static_cast<std::size_t>(parent.feature)) <= parent.threshold)
                            ? parent.left
                            : parent.right;
            node_of[r] = child;
            double w = w_of(static_cast<int>(r));
            child_w[child - next_begin] += w;
            child_s[child - next_begin] += w * y[r];
        }
        for (std::size_t c = 0; c < child_w.size(); ++c)
            tree.nodes[next_begin + c].value = (child_w[c] > 0.0) ? child_s[c] / child_w[c] : 0.0;

        level_begin = next_begin;
        level_end = static_cast<int>(tree.nodes.size());
    }

    if (leaf_of) *leaf_of = std::move(node_of);
    return tree;
}

}  // namespace catex
