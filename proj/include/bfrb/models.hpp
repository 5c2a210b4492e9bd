#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bfrb {

/// Dense row-major matrix of feature values.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

    /// Copy holding only the listed rows / columns, in the given order.
    Matrix select_rows(std::span<const std::size_t> rows) const;
    Matrix select_cols(std::span<const std::size_t> cols) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

enum class ModelKind { Logistic, RandomForest, GradientBoost };

std::string_view to_string(ModelKind kind);
/// "logistic"/"lr", "random-forest"/"rf", "gradient-boost"/"gbt".
ModelKind parse_model_kind(std::string_view name);

struct LogisticParams {
    double learning_rate = 0.1;
    double l2 = 1e-4;
    int max_iterations = 5000;
    double tolerance = 1e-6;
};

struct ForestParams {
    int n_trees = 100;
    int max_depth = 8;
    int min_samples_split = 2;
    /// Features tried per split; 0 means floor(sqrt(p)).
    int max_features = 0;
    bool bootstrap = true;
};

struct BoostParams {
    int n_trees = 100;
    int max_depth = 3;
    double learning_rate = 0.1;
    int min_samples_split = 2;
};

struct ModelConfig {
    ModelKind kind = ModelKind::Logistic;
    LogisticParams logistic;
    ForestParams forest;
    BoostParams boost;
    std::uint64_t seed = 0;

    /// Throws InvalidConfig for out-of-range hyperparameters.
    void validate() const;
};

/// FNV-1a over the ordered feature names, as 16 hex digits.
std::string schema_fingerprint(std::span<const std::string> names);

// ---------------------------------------------------------------------------
// Decision trees

enum class SplitCriterion { Gini, SquaredError };

struct TreeNode {
    int feature = -1; // -1 for a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
    double weight = 0.0;
    double gain = 0.0;

    bool is_leaf() const { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    /// Leaf value reached by `x` (go left when x[feature] <= threshold).
    double predict(std::span<const double> x) const;
    int depth() const;
};

struct SplitCandidate {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

/// Impurity "mass" of a node: weight * impurity.
/// Gini: W - (P^2 + N^2)/W with P, N the weighted class totals.
/// Squared error: sum w r^2 - (sum w r)^2 / W.
double node_impurity(SplitCriterion criterion, double weight, double sum, double sum_sq);

/// Two candidates whose gains differ by at most this are ties.
inline constexpr double kGainTieTolerance = 1e-12;

/// Best (feature, threshold) among `features` for the weighted rows `rows`.
/// Thresholds are midpoints between consecutive distinct values. Ties go to
/// the lowest feature index, then the smallest threshold. Zero-gain splits are
/// returned; nullopt only when every candidate feature is constant.
std::optional<SplitCandidate> best_split(SplitCriterion criterion, const Matrix& X, std::span<const double> target,
                                         std::span<const double> weights, std::span<const std::size_t> rows,
                                         std::vector<std::size_t> features);

struct TreeOptions {
    SplitCriterion criterion = SplitCriterion::Gini;
    int max_depth = 8;
    int min_samples_split = 2;
    /// 0 means every feature at every split.
    int max_features = 0;
};

class Rng;

/// Leaf value for a set of weighted rows.
using LeafValueFn = std::function<double(std::span<const std::size_t> rows, std::span<const double> weights)>;

/// Grows one tree depth-first (left child first). When `options.max_features`
/// restricts the candidates, the subset for each split candidate node is drawn
/// from `rng` in that same order. `weights[i]` is the multiplicity of row i;
/// rows with zero weight are ignored.
DecisionTree grow_tree(const Matrix& X, std::span<const double> target, std::span<const double> weights,
                       const TreeOptions& options, Rng* rng, const LeafValueFn& leaf_value);

/// Gini classification tree with leaf value = weighted positive fraction.
DecisionTree grow_classification_tree(const Matrix& X, std::span<const int> y, std::span<const double> weights,
                                      const TreeOptions& options, Rng* rng = nullptr);

// ---------------------------------------------------------------------------
// Logistic regression

/// Mean log-loss plus (l2 / 2) * |w|^2. `params` holds the p weights followed
/// by the intercept (which is not penalized).
double logistic_loss(std::span<const double> params, const Matrix& X, std::span<const int> y, double l2);
std::vector<double> logistic_gradient(std::span<const double> params, const Matrix& X, std::span<const int> y,
                                      double l2);

double sigmoid(double z);

// ---------------------------------------------------------------------------
// Trained models

struct LogisticModel {
    /// Weights act on standardized inputs (x - center) / scale.
    std::vector<double> weights;
    double intercept = 0.0;
    std::vector<double> center;
    std::vector<double> scale;
    int iterations = 0;
    bool converged = false;
};

struct ForestModel {
    std::vector<DecisionTree> trees;
};

struct BoostModel {
    double base_score = 0.0;
    double learning_rate = 0.1;
    std::vector<DecisionTree> trees;
};

struct TrainedModel {
    ModelConfig config;
    std::vector<std::string> feature_names;
    std::string fingerprint;
    LogisticModel logistic;
    ForestModel forest;
    BoostModel boost;
    /// Unnormalized per-feature impurity decrease (trees) or |weight| (logistic).
    std::vector<double> raw_importance;

    ModelKind kind() const { return config.kind; }
    bool operator==(const TrainedModel&) const;
};

/// Deterministic in (config, X, y). Throws SchemaMismatch, NonFiniteFeature,
/// SingleClassInput (logistic only), InvalidConfig.
TrainedModel train(const ModelConfig& config, std::span<const std::string> feature_names, const Matrix& X,
                   std::span<const int> y);

/// Probabilities in [0, 1]. Throws SchemaMismatch when `feature_names` differ
/// from the training schema.
std::vector<double> predict_scores(const TrainedModel& model, std::span<const std::string> feature_names,
                                   const Matrix& X);

enum class Modality { Accelerometer, Gyroscope, Heart };

std::string_view to_string(Modality m);
std::optional<Modality> parse_modality(std::string_view name);
/// acc* -> Accelerometer, gyr* -> Gyroscope, HR* / RMSSD* -> Heart.
Modality modality_of(std::string_view feature_name);

struct FeatureImportanceReport {
    std::vector<std::string> names;
    std::vector<double> importance;
    std::map<Modality, double> per_modality;
};

/// Trees: impurity decrease normalized to sum 1. Logistic: |standardized weight|.
FeatureImportanceReport feature_importances(const TrainedModel& model);

/// Versioned JSON: kind, hyperparameters, parameters, schema fingerprint.
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(std::string_view text);

} // namespace bfrb
