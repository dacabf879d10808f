#include "catex/surrogate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "internal/json_convert.hpp"

#include "catex/errors.hpp"
#include "catex/metrics.hpp"
#include "catex/rng.hpp"

namespace catex {

using nlohmann::json;

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Linear: return "linear";
        case ModelKind::DecisionTree: return "decision_tree";
        case ModelKind::RandomForest: return "random_forest";
        case ModelKind::GradientBoostedTrees: return "gbdt";
        case ModelKind::MultilayerPerceptron: return "mlp";
    }
    return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "linear") return ModelKind::Linear;
    if (name == "decision_tree") return ModelKind::DecisionTree;
    if (name == "random_forest") return ModelKind::RandomForest;
    if (name == "gbdt") return ModelKind::GradientBoostedTrees;
    if (name == "mlp") return ModelKind::MultilayerPerceptron;
    throw InvalidSpec("unknown model kind: " + name);
}

ModelSpec ModelSpec::defaults_for(ModelKind kind) {
    ModelSpec s;  // field initializers carry the GBDT/MLP defaults
    s.kind = kind;
    switch (kind) {
        case ModelKind::Linear:
            break;
        case ModelKind::DecisionTree:
            s.max_depth = 0;  // grow until pure
            break;
        case ModelKind::RandomForest:
            s.n_trees = 100;
            s.max_depth = 12;
            s.min_samples_leaf = 2;
            s.feature_subsample = 0;  // round(sqrt(d)) at fit time
            break;
        case ModelKind::GradientBoostedTrees:
        case ModelKind::MultilayerPerceptron:
            break;
    }
    return s;
}

void ModelSpec::validate() const {
    const bool ensemble =
        kind == ModelKind::RandomForest || kind == ModelKind::GradientBoostedTrees;
    const bool tree_kind = ensemble || kind == ModelKind::DecisionTree;
    if (ensemble && n_trees <= 0) throw InvalidSpec("ModelSpec: n_trees must be positive");
    if (tree_kind && min_samples_leaf < 1)
        throw InvalidSpec("ModelSpec: min_samples_leaf must be >= 1");
    if (kind == ModelKind::GradientBoostedTrees &&
        !(learning_rate > 0.0 && learning_rate < 2.0))
        throw InvalidSpec("ModelSpec: boosting learning_rate must lie in (0, 2)");
    if (kind == ModelKind::RandomForest && feature_subsample < 0)
        throw InvalidSpec("ModelSpec: feature_subsample must be >= 0");
    if (kind == ModelKind::MultilayerPerceptron) {
        if (hidden_layers.empty()) throw InvalidSpec("ModelSpec: mlp needs hidden layers");
        for (int h : hidden_layers)
            if (h <= 0) throw InvalidSpec("ModelSpec: hidden layer sizes must be positive");
        if (epochs <= 0 || batch_size <= 0)
            throw InvalidSpec("ModelSpec: mlp epochs/batch_size must be positive");
        if (!(mlp_learning_rate > 0.0)) throw InvalidSpec("ModelSpec: mlp learning rate");
        if (!(momentum >= 0.0 && momentum < 1.0))
            throw InvalidSpec("ModelSpec: momentum must lie in [0, 1)");
    }
}

namespace {

void check_finite(const Matrix& m, const char* what) {
    for (double v : m.data)
        if (!std::isfinite(v)) throw InvalidInput(std::string("non-finite value in ") + what);
}

std::vector<double> column(const Matrix& m, std::size_t c) {
    std::vector<double> out(m.rows);
    for (std::size_t r = 0; r < m.rows; ++r) out[r] = m.at(r, c);
    return out;
}

}  // namespace

TrainedModel TrainedModel::fit(const ModelSpec& spec, const Matrix& x, const Matrix& y) {
    spec.validate();
    if (x.rows == 0 || x.cols == 0 || y.cols == 0)
        throw InvalidInput("TrainedModel::fit: empty training data");
    if (x.rows != y.rows) throw ShapeMismatch("TrainedModel::fit: row counts differ");
    if (spec.residual_connection && y.cols > x.cols)
        throw InvalidSpec("TrainedModel::fit: residual connection maps target j to feature j");
    check_finite(x, "features");
    check_finite(y, "targets");

    TrainedModel m;
    m.spec_ = spec;
    m.n_features_ = x.cols;
    m.n_targets_ = y.cols;
    m.in_scaler_.fit(x);
    Matrix xs = m.in_scaler_.transform(x);

    Matrix d = y;
    if (spec.residual_connection)
        for (std::size_t r = 0; r < y.rows; ++r)
            for (std::size_t t = 0; t < y.cols; ++t) d.at(r, t) -= x.at(r, t);
    m.target_scaler_.fit(d);
    Matrix ts = m.target_scaler_.transform(d);

    const std::size_t n = x.rows;
    const std::size_t n_t = y.cols;

    auto scaled_training_mse = [&]() {
        Matrix raw;
        m.predict_scaled(xs, raw);
        double acc = 0.0;
        for (std::size_t i = 0; i < raw.data.size(); ++i) {
            double diff = raw.data[i] - ts.data[i];
            acc += diff * diff;
        }
        return acc / static_cast<double>(raw.data.size());
    };

    switch (spec.kind) {
        case ModelKind::Linear: {
            for (std::size_t t = 0; t < n_t; ++t)
                m.linear_.push_back(fit_linear(xs, column(ts, t)));
            m.loss_history_ = {scaled_training_mse()};
            break;
        }
        case ModelKind::DecisionTree: {
            TreeTrainer trainer(xs);
            for (std::size_t t = 0; t < n_t; ++t)
                m.tree_.push_back(
                    trainer.fit(column(ts, t), spec.max_depth, spec.min_samples_leaf));
            m.loss_history_ = {scaled_training_mse()};
            break;
        }
        case ModelKind::RandomForest: {
            TreeTrainer trainer(xs);
            int k = spec.feature_subsample;
            if (k == 0) k = std::max(1, static_cast<int>(std::lround(std::sqrt(
                                            static_cast<double>(x.cols)))));
            k = std::min(k, static_cast<int>(x.cols));
            m.ensemble_.assign(n_t, {});
            std::vector<int> w(n);
            for (std::size_t t = 0; t < n_t; ++t) {
                std::vector<double> yt = column(ts, t);
                for (int i = 0; i < spec.n_trees; ++i) {
                    SplitMix64 rng = derived_stream(
                        spec.seed, t * static_cast<std::uint64_t>(spec.n_trees) + i);
                    std::fill(w.begin(), w.end(), 0);
                    for (std::size_t j = 0; j < n; ++j) ++w[rng.uniform_index(n)];
                    m.ensemble_[t].push_back(trainer.fit(yt, spec.max_depth,
                                                         spec.min_samples_leaf, &w, k, &rng));
                }
            }
            m.loss_history_ = {scaled_training_mse()};
            break;
        }
        case ModelKind::GradientBoostedTrees: {
            TreeTrainer trainer(xs);
            m.ensemble_.assign(n_t, {});
            m.gbdt_base_.assign(n_t, 0.0);
            std::vector<std::vector<double>> resid(n_t);
            for (std::size_t t = 0; t < n_t; ++t) {
                resid[t] = column(ts, t);
                double mean =
                    std::accumulate(resid[t].begin(), resid[t].end(), 0.0) / resid[t].size();
                m.gbdt_base_[t] = mean;
                for (double& v : resid[t]) v -= mean;
                m.ensemble_[t].reserve(static_cast<std::size_t>(spec.n_trees));
            }
            std::vector<int> leaf_of;
            m.loss_history_.reserve(static_cast<std::size_t>(spec.n_trees));
            for (int round = 0; round < spec.n_trees; ++round) {
                double sse = 0.0;
                for (std::size_t t = 0; t < n_t; ++t) {
                    RegressionTree tree = trainer.fit(resid[t], spec.max_depth,
                                                      spec.min_samples_leaf, nullptr, 0,
                                                      nullptr, &leaf_of);
                    // bake the shrinkage into the stored values so prediction
                    // is a plain sum over trees
                    for (TreeNode& nd : tree.nodes) nd.value *= spec.learning_rate;
                    std::vector<double>& rt = resid[t];
                    for (std::size_t r = 0; r < n; ++r) {
                        rt[r] -= tree.nodes[static_cast<std::size_t>(leaf_of[r])].value;
                        sse += rt[r] * rt[r];
                    }
                    m.ensemble_[t].push_back(std::move(tree));
                }
                m.loss_history_.push_back(sse / static_cast<double>(n * n_t));
            }
            break;
        }
        case ModelKind::MultilayerPerceptron: {
            std::vector<int> sizes;
            sizes.push_back(static_cast<int>(x.cols));
            for (int h : spec.hidden_layers) sizes.push_back(h);
            sizes.push_back(static_cast<int>(n_t));
            std::uint64_t init_seed = derived_stream(spec.seed, 0).next_u64();
            std::uint64_t shuffle_seed = derived_stream(spec.seed, 1).next_u64();
            m.mlp_ = Mlp(sizes, init_seed);
            m.loss_history_ = m.mlp_.train(xs, ts, spec.epochs, spec.batch_size,
                                           spec.mlp_learning_rate, spec.momentum, shuffle_seed);
            break;
        }
    }
    return m;
}

void TrainedModel::predict_scaled(const Matrix& xs, Matrix& raw) const {
    raw = Matrix(xs.rows, n_targets_);
    switch (spec_.kind) {
        case ModelKind::Linear:
            for (std::size_t r = 0; r < xs.rows; ++r)
                for (std::size_t t = 0; t < n_targets_; ++t)
                    raw.at(r, t) = linear_[t].predict_one(xs.row(r));
            break;
        case ModelKind::DecisionTree:
            for (std::size_t r = 0; r < xs.rows; ++r)
                for (std::size_t t = 0; t < n_targets_; ++t)
                    raw.at(r, t) = tree_[t].predict_one(xs.row(r));
            break;
        case ModelKind::RandomForest:
            for (std::size_t r = 0; r < xs.rows; ++r)
                for (std::size_t t = 0; t < n_targets_; ++t) {
                    double s = 0.0;
                    for (const RegressionTree& tree : ensemble_[t])
                        s += tree.predict_one(xs.row(r));
                    raw.at(r, t) = s / static_cast<double>(ensemble_[t].size());
                }
            break;
        case ModelKind::GradientBoostedTrees:
            for (std::size_t r = 0; r < xs.rows; ++r)
                for (std::size_t t = 0; t < n_targets_; ++t) {
                    double s = gbdt_base_[t];
                    for (const RegressionTree& tree : ensemble_[t])
                        s += tree.predict_one(xs.row(r));
                    raw.at(r, t) = s;
                }
            break;
        case ModelKind::MultilayerPerceptron:
            for (std::size_t r = 0; r < xs.rows; ++r) mlp_.forward_one(xs.row(r), raw.row(r));
            break;
    }
}

Matrix TrainedModel::predict(const Matrix& x) const {
    if (!fitted()) throw InvalidInput("TrainedModel::predict: model not fitted");
    if (x.cols != n_features_) throw ShapeMismatch("TrainedModel::predict: feature count");
    check_finite(x, "prediction inputs");
    Matrix xs = in_scaler_.transform(x);
    Matrix raw;
    predict_scaled(xs, raw);
    Matrix out = target_scaler_.inverse(raw);
    for (std::size_t r = 0; r < out.rows; ++r)
        for (std::size_t t = 0; t < out.cols; ++t) {
            if (spec_.residual_connection) out.at(r, t) += x.at(r, t);
            if (out.at(r, t) < 0.0) out.at(r, t) = 0.0;
        }
    return out;
}

std::vector<double> TrainedModel::predict_one(const std::vector<double>& x) const {
    Matrix xm(1, x.size());
    std::copy(x.begin(), x.end(), xm.data.begin());
    Matrix out = predict(xm);
    return {out.data.begin(), out.data.end()};
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

namespace {

json scaler_to_json(const MinMaxScaler& s) { return json{{"min", s.min}, {"max", s.max}}; }

MinMaxScaler scaler_from_json(const json& j) {
    MinMaxScaler s;
    s.min = j.at("min").get<std::vector<double>>();
    s.max = j.at("max").get<std::vector<double>>();
    if (s.min.size() != s.max.size()) throw InvalidInput("model file: scaler min/max lengths");
    return s;
}

json tree_to_json(const RegressionTree& t) {
    json nodes = json::array();
    for (const TreeNode& nd : t.nodes)
        nodes.push_back(json::array({nd.feature, nd.threshold, nd.left, nd.right, nd.value}));
    return nodes;
}

RegressionTree tree_from_json(const json& j) {
    RegressionTree t;
    t.nodes.reserve(j.size());
    for (const json& nd : j) {
        TreeNode node;
        node.feature = nd.at(0).get<int>();
        node.threshold = nd.at(1).get<double>();
        node.left = nd.at(2).get<int>();
        node.right = nd.at(3).get<int>();
        node.value = nd.at(4).get<double>();
        t.nodes.push_back(node);
    }
    if (t.nodes.empty()) throw InvalidInput("model file: empty tree");
    return t;
}

}  // namespace

struct ModelSerde {
    static json to_json(const TrainedModel& m) {
        json j{{"format", "catex-model"},
               {"version", 1},
               {"spec", model_spec_to_json(m.spec_)},
               {"n_features", m.n_features_},
               {"n_targets", m.n_targets_},
               {"dataset_id", m.dataset_id_},
               {"loss_history", m.loss_history_},
               {"input_scaler", scaler_to_json(m.in_scaler_)},
               {"target_scaler", scaler_to_json(m.target_scaler_)}};
        switch (m.spec_.kind) {
            case ModelKind::Linear: {
                json arr = json::array();
                for (const LinearModel& lm : m.linear_)
                    arr.push_back(json{{"coef", lm.coef}, {"intercept", lm.intercept}});
                j["linear"] = std::move(arr);
                break;
            }
            case ModelKind::DecisionTree: {
                json arr = json::array();
                for (const RegressionTree& t : m.tree_) arr.push_back(tree_to_json(t));
                j["trees"] = std::move(arr);
                break;
            }
            case ModelKind::RandomForest:
            case ModelKind::GradientBoostedTrees: {
                json targets = json::array();
                for (const auto& chain : m.ensemble_) {
                    json arr = json::array();
                    for (const RegressionTree& t : chain) arr.push_back(tree_to_json(t));
                    targets.push_back(std::move(arr));
                }
                j["ensemble"] = std::move(targets);
                if (m.spec_.kind == ModelKind::GradientBoostedTrees)
                    j["gbdt_base"] = m.gbdt_base_;
                break;
            }
            case ModelKind::MultilayerPerceptron:
                j["mlp"] = json{{"sizes", m.mlp_.sizes()}, {"params", m.mlp_.params()}};
                break;
        }
        return j;
    }

    static TrainedModel from_json(const json& j) {
        if (j.value("format", "") != std::string("catex-model"))
            throw InvalidInput("model file: unrecognized format tag");
        if (j.value("version", 0) != 1) throw InvalidInput("model file: unsupported version");
        TrainedModel m;
        m.spec_ = model_spec_from_json(j.at("spec"));
        m.n_features_ = j.at("n_features").get<std::size_t>();
        m.n_targets_ = j.at("n_targets").get<std::size_t>();
        m.dataset_id_ = j.value("dataset_id", "");
        m.loss_history_ = j.at("loss_history").get<std::vector<double>>();
        m.in_scaler_ = scaler_from_json(j.at("input_scaler"));
        m.target_scaler_ = scaler_from_json(j.at("target_scaler"));
        switch (m.spec_.kind) {
            case ModelKind::Linear:
                for (const json& lj : j.at("linear")) {
                    LinearModel lm;
                    lm.coef = lj.at("coef").get<std::vector<double>>();
                    lm.intercept = lj.at("intercept").get<double>();
                    m.linear_.push_back(std::move(lm));
                }
                break;
            case ModelKind::DecisionTree:
                for (const json& tj : j.at("trees")) m.tree_.push_back(tree_from_json(tj));
                break;
            case ModelKind::RandomForest:
            case ModelKind::GradientBoostedTrees:
                for (const json& cj : j.at("ensemble")) {
                    std::vector<RegressionTree> chain;
                    for (const json& tj : cj) chain.push_back(tree_from_json(tj));
                    m.ensemble_.push_back(std::move(chain));
                }
                if (m.spec_.kind == ModelKind::GradientBoostedTrees)
                    m.gbdt_base_ = j.at("gbdt_base").get<std::vector<double>>();
                break;
            case ModelKind::MultilayerPerceptron: {
                auto sizes = j.at("mlp").at("sizes").get<std::vector<int>>();
                Mlp mlp(sizes, 0);
                auto params = j.at("mlp").at("params").get<std::vector<double>>();
                if (params.size() != mlp.params().size())
                    throw InvalidInput("model file: mlp parameter count");
                mlp.params() = std::move(params);
                m.mlp_ = std::move(mlp);
                break;
            }
        }
        return m;
    }
};

std::string TrainedModel::to_json_string() const { return ModelSerde::to_json(*this).dump(); }

TrainedModel TrainedModel::from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("model file: ") + e.what());
    }
    try {
        return ModelSerde::from_json(j);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("model file: ") + e.what());
    }
}

void TrainedModel::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("TrainedModel::save: cannot open " + path);
    out << to_json_string() << "\n";
    if (!out) throw InvalidInput("TrainedModel::save: write failed for " + path);
}

TrainedModel TrainedModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("TrainedModel::load: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_string(buf.str());
}

// ---------------------------------------------------------------------------
// cross-validation / grid search / benchmarking
// ---------------------------------------------------------------------------

double cross_validate_mse(const ModelSpec& spec, const Matrix& x, const Matrix& y,
                          int k_folds, std::uint64_t seed) {
    if (k_folds < 2) throw InvalidInput("cross_validate_mse: need k >= 2");
    if (x.rows < static_cast<std::size_t>(k_folds))
        throw InvalidInput("cross_validate_mse: fewer rows than folds");
    std::vector<int> order(x.rows);
    std::iota(order.begin(), order.end(), 0);
    SplitMix64 rng(seed);
    shuffle_indices(order, rng);

    double acc = 0.0;
    for (int f = 0; f < k_folds; ++f) {
        std::size_t lo = x.rows * static_cast<std::size_t>(f) / k_folds;
        std::size_t hi = x.rows * static_cast<std::size_t>(f + 1) / k_folds;
        Matrix xtr(x.rows - (hi - lo), x.cols), ytr(x.rows - (hi - lo), y.cols);
        Matrix xte(hi - lo, x.cols), yte(hi - lo, y.cols);
        std::size_t rtr = 0, rte = 0;
        for (std::size_t i = 0; i < order.size(); ++i) {
            auto src = static_cast<std::size_t>(order[i]);
            bool in_test = i >= lo && i < hi;
            Matrix& xdst = in_test ? xte : xtr;
            Matrix& ydst = in_test ? yte : ytr;
            std::size_t r = in_test ? rte++ : rtr++;
            std::copy(x.row(src), x.row(src) + x.cols, xdst.row(r));
            std::copy(y.row(src), y.row(src) + y.cols, ydst.row(r));
        }
        TrainedModel m = TrainedModel::fit(spec, xtr, ytr);
        acc += mse(yte, m.predict(xte));
    }
    return acc / k_folds;
}

GridSearchResult grid_search(const std::vector<ModelSpec>& candidates, const Matrix& x,
                             const Matrix& y, int k_folds, std::uint64_t seed) {
    if (candidates.empty()) throw InvalidSpec("grid_search: empty candidate list");
    GridSearchResult res;
    bool first = true;
    for (const ModelSpec& c : candidates) {
        double v = cross_validate_mse(c, x, y, k_folds, seed);
        res.table.push_back(GridSearchEntry{c, v});
        if (first || v < res.best_mse) {
            res.best = c;
            res.best_mse = v;
            first = false;
        }
    }
    return res;
}

std::vector<ModelSpec> default_grid(const ModelSpec& base) {
    std::vector<ModelSpec> grid;
    auto add = [&](auto&& tweak) {
        ModelSpec s = base;
        tweak(s);
        grid.push_back(s);
    };
    switch (base.kind) {
        case ModelKind::Linear:
            grid.push_back(base);
            break;
        case ModelKind::DecisionTree:
            for (int depth : {8, 12, 0})
                for (int leaf : {1, 4})
                    add([&](ModelSpec& s) {
                        s.max_depth = depth;
                        s.min_samples_leaf = leaf;
                    });
            break;
        case ModelKind::RandomForest:
            for (int nt : {50, 100})
                for (int depth : {8, 12})
                    add([&](ModelSpec& s) {
                        s.n_trees = nt;
                        s.max_depth = depth;
                    });
            break;
        case ModelKind::GradientBoostedTrees:
            for (int nt : {200, 400})
                for (int depth : {4, 6})
                    add([&](ModelSpec& s) {
                        s.n_trees = nt;
                        s.max_depth = depth;
                    });
            break;
        case ModelKind::MultilayerPerceptron:
            for (int width : {32, 64})
                for (double lr : {0.01, 0.003})
                    add([&](ModelSpec& s) {
                        s.hidden_layers = {width, width};
                        s.mlp_learning_rate = lr;
                    });
            break;
    }
    return grid;
}

std::vector<BenchRow> benchmark_predict(const TrainedModel& model,
                                        const std::vector<std::size_t>& batch_sizes,
                                        int repeats, std::uint64_t seed) {
    using clock = std::chrono::steady_clock;
    if (!model.fitted()) throw InvalidInput("benchmark_predict: model not fitted");
    if (repeats < 1) throw InvalidInput("benchmark_predict: repeats must be >= 1");
    std::vector<BenchRow> rows;
    double sink = 0.0;
    for (std::size_t b : batch_sizes) {
        if (b == 0) throw InvalidInput("benchmark_predict: zero batch size");
        Matrix xb(b, model.n_features());
        SplitMix64 rng(seed ^ b);
        for (double& v : xb.data) v = rng.uniform(0.0, 0.0015);
        sink += model.predict(xb).at(0, 0);  // warmup, result consumed
        double total = 0.0;
        for (int rep = 0; rep < repeats; ++rep) {
            auto t0 = clock::now();
            Matrix out = model.predict(xb);
            auto t1 = clock::now();
            sink += out.at(out.rows - 1, out.cols - 1);
            total += std::chrono::duration<double>(t1 - t0).count();
        }
        BenchRow row;
        row.batch_size = b;
        row.repeats = repeats;
        row.mean_seconds = total / repeats;
        row.seconds_per_instance = row.mean_seconds / static_cast<double>(b);
        rows.push_back(row);
    }
    // keep the accumulated sink observable so the timed calls cannot be elided
    if (!std::isfinite(sink)) throw NonConvergence("benchmark_predict: non-finite predictions");
    return rows;
}

}  // namespace catex
