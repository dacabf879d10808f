#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "catex/matrix.hpp"
#include "catex/surrogate/linear.hpp"
#include "catex/surrogate/mlp.hpp"
#include "catex/surrogate/scaler.hpp"
#include "catex/surrogate/tree.hpp"

namespace catex {

// Regression surrogates for the chemistry step. Features are the 6 pre-
// reaction quantities (aqueous na, k, ca; exchanger na_x, k_x, ca_x2),
// targets the 3 equilibrated aqueous concentrations. All models share the
// same prediction pipeline:
//
//   scale features to [-1,1] -> model -> inverse-scale targets
//   -> (+ input aqueous when residual_connection) -> clip at 0
//
// With residual_connection the model is fitted to concentration deltas
// (target - input aqueous) and prediction adds the delta back to the input;
// the target scaler is fitted on the deltas in that case.

enum class ModelKind : int {
    Linear,
    DecisionTree,
    RandomForest,
    GradientBoostedTrees,
    MultilayerPerceptron,
};

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct ModelSpec {
    ModelKind kind = ModelKind::GradientBoostedTrees;
    bool residual_connection = true;

    // tree family (GBDT defaults; see defaults_for)
    int n_trees = 400;           // boosting rounds / forest size
    int max_depth = 6;           // <= 0 means unlimited
    double learning_rate = 0.1;  // boosting shrinkage
    int min_samples_leaf = 1;
    int feature_subsample = 0;   // forest features per node; 0 = round(sqrt(d))

    // mlp
    std::vector<int> hidden_layers = {64, 64};
    int epochs = 40;
    int batch_size = 128;
    double mlp_learning_rate = 0.01;
    double momentum = 0.9;

    std::uint64_t seed = 42;

    // per-kind default hyperparameters (single source of truth for configs)
    static ModelSpec defaults_for(ModelKind kind);
    void validate() const;  // throws InvalidSpec
};

class TrainedModel {
  public:
    TrainedModel() = default;

    // Fit a model of spec.kind on raw (unscaled) features/targets. Tree and linear
    // kinds train one single-output model per target column behind the shared
    // scaler; the MLP is natively multi-output. Reproducible given spec.seed.
    static TrainedModel fit(const ModelSpec& spec, const Matrix& x, const Matrix& y);

    // Batch prediction; row i of the result corresponds to row i of x, and a
    // batch of n gives bit-identical results to n single-row calls.
    Matrix predict(const Matrix& x) const;
    std::vector<double> predict_one(const std::vector<double>& x) const;

    bool fitted() const { return n_features_ > 0; }
    std::size_t n_features() const { return n_features_; }
    std::size_t n_targets() const { return n_targets_; }
    const ModelSpec& spec() const { return spec_; }
    const MinMaxScaler& input_scaler() const { return in_scaler_; }

    // training-loss trace: per boosting round (GBDT), per epoch (MLP), else
    // a single final value; in scaled target space
    const std::vector<double>& loss_history() const { return loss_history_; }

    const std::string& dataset_id() const { return dataset_id_; }
    void set_dataset_id(std::string id) { dataset_id_ = std::move(id); }

    // JSON model container; load(save(m)) predicts bit-identically to m
    void save(const std::string& path) const;
    static TrainedModel load(const std::string& path);
    std::string to_json_string() const;
    static TrainedModel from_json_string(const std::string& text);

  private:
    ModelSpec spec_;
    MinMaxScaler in_scaler_;
    MinMaxScaler target_scaler_;
    std::size_t n_features_ = 0;
    std::size_t n_targets_ = 0;
    std::string dataset_id_;
    std::vector<double> loss_history_;

    std::vector<LinearModel> linear_;                    // [target]
    std::vector<RegressionTree> tree_;                   // [target]
    std::vector<std::vector<RegressionTree>> ensemble_;  // [target][tree]
    std::vector<double> gbdt_base_;                      // [target] F0
    Mlp mlp_;

    void predict_scaled(const Matrix& xs, Matrix& raw) const;
    friend struct ModelSerde;
};

// Mean validation MSE (raw target space) of a spec under k-fold CV with a
// seeded shuffle; folds are contiguous chunks of the shuffled order.
double cross_validate_mse(const ModelSpec& spec, const Matrix& x, const Matrix& y,
                          int k_folds, std::uint64_t seed);

struct GridSearchEntry {
    ModelSpec spec;
    double cv_mse = 0.0;
};

struct GridSearchResult {
    ModelSpec best;
    double best_mse = 0.0;
    std::vector<GridSearchEntry> table;
};

// Evaluates every candidate with cross_validate_mse and returns the argmin
// (first wins ties). Candidates are tried in order; fully deterministic.
GridSearchResult grid_search(const std::vector<ModelSpec>& candidates, const Matrix& x,
                             const Matrix& y, int k_folds, std::uint64_t seed);

// The documented default hyperparameter grid per kind (small, fixed).
std::vector<ModelSpec> default_grid(const ModelSpec& base);

struct BenchRow {
    std::size_t batch_size = 0;
    int repeats = 0;
    double mean_seconds = 0.0;          // per predict() call on the whole batch
    double seconds_per_instance = 0.0;  // mean_seconds / batch_size
};

// Wall-clock inference timing over seeded uniform random inputs; one warmup
// call per batch size, then the mean over `repeats` timed calls.
std::vector<BenchRow> benchmark_predict(const TrainedModel& model,
                                        const std::vector<std::size_t>& batch_sizes,
                                        int repeats, std::uint64_t seed);

}  // namespace catex
