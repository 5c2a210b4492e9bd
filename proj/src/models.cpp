#include "bfrb/models.hpp"

#include "bfrb/error.hpp"
#include "bfrb/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace bfrb {

namespace {

constexpr int kModelFormatVersion = 1;

struct SortedEntry {
    double x;
    double t;
    double w;
    std::size_t row;
};

void check_inputs(std::span<const std::string> names, const Matrix& X, std::span<const int> y) {
    if (X.rows() == 0) {
        throw Error(ErrorKind::InsufficientData, "empty training matrix");
    }
    if (X.cols() != names.size()) {
        throw Error(ErrorKind::SchemaMismatch, std::to_string(X.cols()) + " columns for " +
                                                   std::to_string(names.size()) + " feature names");
    }
    if (y.size() != X.rows()) {
        throw Error(ErrorKind::SchemaMismatch, "label count differs from row count");
    }
    for (std::size_t r = 0; r < X.rows(); ++r) {
        for (std::size_t c = 0; c < X.cols(); ++c) {
            if (!std::isfinite(X(r, c))) {
                throw Error(ErrorKind::NonFiniteFeature, names[c] + " at row " + std::to_string(r));
            }
        }
        if (y[r] != 0 && y[r] != 1) {
            throw Error(ErrorKind::InvalidConfig, "labels must be 0 or 1");
        }
    }
}

double log1p_exp(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

int subtree_depth(const DecisionTree& tree, int node) {
    const auto& n = tree.nodes[static_cast<std::size_t>(node)];
    if (n.is_leaf()) {
        return 0;
    }
    return 1 + std::max(subtree_depth(tree, n.left), subtree_depth(tree, n.right));
}

class TreeGrower {
public:
    TreeGrower(const Matrix& X, std::span<const double> target, std::span<const double> weights,
               const TreeOptions& options, Rng* rng, const LeafValueFn& leaf_value)
        : X_(X), target_(target), weights_(weights), options_(options), rng_(rng), leaf_value_(leaf_value) {}

    DecisionTree grow() {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < X_.rows(); ++i) {
            if (weights_[i] > 0.0) {
                rows.push_back(i);
            }
        }
        if (!rows.empty()) {
            grow_node(rows, 0);
        }
        return std::move(tree_);
    }

private:
    int grow_node(const std::vector<std::size_t>& rows, int depth) {
        double w = 0.0, s = 0.0, ss = 0.0;
        for (std::size_t r : rows) {
            w += weights_[r];
            s += weights_[r] * target_[r];
            ss += weights_[r] * target_[r] * target_[r];
        }
        const int index = static_cast<int>(tree_.nodes.size());
        TreeNode node;
        node.value = leaf_value_(rows, weights_);
        node.weight = w;
        tree_.nodes.push_back(node);

        const double impurity = node_impurity(options_.criterion, w, s, ss);
        if (depth >= options_.max_depth || w < options_.min_samples_split || impurity <= 1e-12) {
            return index;
        }

        const std::size_t p = X_.cols();
        std::vector<std::size_t> features;
        if (options_.max_features > 0 && static_cast<std::size_t>(options_.max_features) < p && rng_ != nullptr) {
            features = rng_->sample_without_replacement(p, static_cast<std::size_t>(options_.max_features));
        } else {
            features.resize(p);
            std::iota(features.begin(), features.end(), std::size_t{0});
        }
        const auto split = best_split(options_.criterion, X_, target_, weights_, rows, std::move(features));
        if (!split) {
            return index;
        }

        std::vector<std::size_t> left, right;
        for (std::size_t r : rows) {
            (X_(r, static_cast<std::size_t>(split->feature)) <= split->threshold ? left : right).push_back(r);
        }
        const int l = grow_node(left, depth + 1);
        const int rr = grow_node(right, depth + 1);
        auto& stored = tree_.nodes[static_cast<std::size_t>(index)];
        stored.feature = split->feature;
        stored.threshold = split->threshold;
        stored.gain = split->gain;
        stored.left = l;
        stored.right = rr;
        return index;
    }

    const Matrix& X_;
    std::span<const double> target_;
    std::span<const double> weights_;
    const TreeOptions& options_;
    Rng* rng_;
    const LeafValueFn& leaf_value_;
    DecisionTree tree_;
};

std::vector<double> standardized_row(const LogisticModel& m, std::span<const double> x) {
    std::vector<double> z(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        z[j] = (x[j] - m.center[j]) / m.scale[j];
    }
    return z;
}

LogisticModel train_logistic(const LogisticParams& params, const Matrix& X, std::span<const int> y) {
    const std::size_t n = X.rows();
    const std::size_t p = X.cols();
    LogisticModel m;
    m.center.assign(p, 0.0);
    m.scale.assign(p, 1.0);
    for (std::size_t j = 0; j < p; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += X(i, j);
        }
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ss += (X(i, j) - mean) * (X(i, j) - mean);
        }
        const double sd = std::sqrt(ss / static_cast<double>(n));
        m.center[j] = mean;
        m.scale[j] = sd > 1e-12 ? sd : 1.0;
    }
    Matrix Z(n, p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            Z(i, j) = (X(i, j) - m.center[j]) / m.scale[j];
        }
    }

    std::vector<double> theta(p + 1, 0.0);
    for (m.iterations = 0; m.iterations < params.max_iterations; ++m.iterations) {
        const auto grad = logistic_gradient(theta, Z, y, params.l2);
        double worst = 0.0;
        for (double g : grad) {
            worst = std::max(worst, std::abs(g));
        }
        if (worst < params.tolerance) {
            m.converged = true;
            break;
        }
        for (std::size_t k = 0; k <= p; ++k) {
            theta[k] -= params.learning_rate * grad[k];
        }
    }
    m.weights.assign(theta.begin(), theta.end() - 1);
    m.intercept = theta.back();
    return m;
}

ForestModel train_forest(const ForestParams& params, const Matrix& X, std::span<const int> y, Rng& rng) {
    const std::size_t n = X.rows();
    const std::size_t p = X.cols();
    TreeOptions options;
    options.criterion = SplitCriterion::Gini;
    options.max_depth = params.max_depth;
    options.min_samples_split = params.min_samples_split;
    options.max_features = params.max_features > 0
                               ? params.max_features
                               : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(p)))));
    ForestModel forest;
    forest.trees.reserve(static_cast<std::size_t>(params.n_trees));
    std::vector<double> weights(n);
    for (int t = 0; t < params.n_trees; ++t) {
        if (params.bootstrap) {
            std::fill(weights.begin(), weights.end(), 0.0);
            for (std::size_t k = 0; k < n; ++k) {
                weights[rng.index(n)] += 1.0;
            }
        } else {
            std::fill(weights.begin(), weights.end(), 1.0);
        }
        forest.trees.push_back(grow_classification_tree(X, y, weights, options, &rng));
    }
    return forest;
}

BoostModel train_boost(const BoostParams& params, const Matrix& X, std::span<const int> y) {
    const std::size_t n = X.rows();
    BoostModel model;
    model.learning_rate = params.learning_rate;
    double positives = 0.0;
    for (int v : y) {
        positives += v;
    }
    const double base_rate = std::clamp(positives / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
    model.base_score = std::log(base_rate / (1.0 - base_rate));

    TreeOptions options;
    options.criterion = SplitCriterion::SquaredError;
    options.max_depth = params.max_depth;
    options.min_samples_split = params.min_samples_split;

    std::vector<double> score(n, model.base_score);
    std::vector<double> residual(n), hessian(n);
    const std::vector<double> weights(n, 1.0);
    // Newton step for log-loss: sum(residual) / sum(p (1 - p)).
    const LeafValueFn leaf = [&](std::span<const std::size_t> rows, std::span<const double> w) {
        double num = 0.0, den = 0.0;
        for (std::size_t r : rows) {
            num += w[r] * residual[r];
            den += w[r] * hessian[r];
        }
        return den > 1e-12 ? num / den : 0.0;
    };
    for (int m = 0; m < params.n_trees; ++m) {
        for (std::size_t i = 0; i < n; ++i) {
            const double prob = sigmoid(score[i]);
            residual[i] = static_cast<double>(y[i]) - prob;
            hessian[i] = prob * (1.0 - prob);
        }
        DecisionTree tree = grow_tree(X, residual, weights, options, nullptr, leaf);
        for (std::size_t i = 0; i < n; ++i) {
            score[i] += model.learning_rate * tree.predict(X.row(i));
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

void accumulate_gains(const DecisionTree& tree, std::vector<double>& out) {
    for (const auto& node : tree.nodes) {
        if (!node.is_leaf()) {
            out[static_cast<std::size_t>(node.feature)] += node.gain;
        }
    }
}

nlohmann::json tree_to_json(const DecisionTree& tree) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes) {
        nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value, n.weight, n.gain});
    }
    return nodes;
}

DecisionTree tree_from_json(const nlohmann::json& j) {
    DecisionTree tree;
    for (const auto& a : j) {
        TreeNode n;
        n.feature = a.at(0).get<int>();
        n.threshold = a.at(1).get<double>();
        n.left = a.at(2).get<int>();
        n.right = a.at(3).get<int>();
        n.value = a.at(4).get<double>();
        n.weight = a.at(5).get<double>();
        n.gain = a.at(6).get<double>();
        tree.nodes.push_back(n);
    }
    return tree;
}

} // namespace

Matrix Matrix::select_rows(std::span<const std::size_t> rows) const {
    Matrix out(rows.size(), cols_);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(rows[i] * cols_), cols_,
                    out.data_.begin() + static_cast<std::ptrdiff_t>(i * cols_));
    }
    return out;
}

Matrix Matrix::select_cols(std::span<const std::size_t> cols) const {
    Matrix out(rows_, cols.size());
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out(r, j) = (*this)(r, cols[j]);
        }
    }
    return out;
}

std::string_view to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::Logistic: return "logistic";
    case ModelKind::RandomForest: return "random-forest";
    case ModelKind::GradientBoost: return "gradient-boost";
    }
    return "logistic";
}

ModelKind parse_model_kind(std::string_view name) {
    if (name == "logistic" || name == "lr") return ModelKind::Logistic;
    if (name == "random-forest" || name == "rf") return ModelKind::RandomForest;
    if (name == "gradient-boost" || name == "gbt") return ModelKind::GradientBoost;
    throw Error(ErrorKind::InvalidConfig, "unknown model kind '" + std::string(name) + "'");
}

void ModelConfig::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidConfig, what); };
    if (!(logistic.learning_rate > 0.0 && logistic.learning_rate <= 10.0)) fail("logistic.learning_rate out of (0, 10]");
    if (!(logistic.l2 >= 0.0)) fail("logistic.l2 must be >= 0");
    if (logistic.max_iterations < 1) fail("logistic.max_iterations must be >= 1");
    if (!(logistic.tolerance > 0.0)) fail("logistic.tolerance must be > 0");
    if (forest.n_trees < 1) fail("forest.n_trees must be >= 1");
    if (forest.max_depth < 1 || forest.max_depth > 64) fail("forest.max_depth out of [1, 64]");
    if (forest.min_samples_split < 2) fail("forest.min_samples_split must be >= 2");
    if (forest.max_features < 0) fail("forest.max_features must be >= 0");
    if (boost.n_trees < 1) fail("boost.n_trees must be >= 1");
    if (boost.max_depth < 1 || boost.max_depth > 16) fail("boost.max_depth out of [1, 16]");
    if (!(boost.learning_rate > 0.0 && boost.learning_rate <= 1.0)) fail("boost.learning_rate out of (0, 1]");
    if (boost.min_samples_split < 2) fail("boost.min_samples_split must be >= 2");
}

std::string schema_fingerprint(std::span<const std::string> names) {
    std::string joined;
    for (const auto& n : names) {
        joined += n;
        joined += '\n';
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(stable_hash(joined)));
    return buf;
}

double DecisionTree::predict(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        const auto& n = nodes[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes[i].value;
}

int DecisionTree::depth() const {
    return nodes.empty() ? 0 : subtree_depth(*this, 0);
}

double node_impurity(SplitCriterion criterion, double weight, double sum, double sum_sq) {
    if (weight <= 0.0) {
        return 0.0;
    }
    if (criterion == SplitCriterion::Gini) {
        const double neg = weight - sum;
        return weight - (sum * sum + neg * neg) / weight;
    }
    return sum_sq - sum * sum / weight;
}

std::optional<SplitCandidate> best_split(SplitCriterion criterion, const Matrix& X, std::span<const double> target,
                                         std::span<const double> weights, std::span<const std::size_t> rows,
                                         std::vector<std::size_t> features) {
    std::sort(features.begin(), features.end());
    double total_w = 0.0, total_s = 0.0, total_ss = 0.0;
    for (std::size_t r : rows) {
        total_w += weights[r];
        total_s += weights[r] * target[r];
        total_ss += weights[r] * target[r] * target[r];
    }
    const double parent = node_impurity(criterion, total_w, total_s, total_ss);

    std::optional<SplitCandidate> best;
    std::vector<SortedEntry> entries(rows.size());
    for (std::size_t f : features) {
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const std::size_t r = rows[k];
            entries[k] = {X(r, f), target[r], weights[r], r};
        }
        std::sort(entries.begin(), entries.end(), [](const SortedEntry& a, const SortedEntry& b) {
            return a.x < b.x || (a.x == b.x && a.row < b.row);
        });
        double lw = 0.0, ls = 0.0, lss = 0.0;
        for (std::size_t k = 0; k + 1 < entries.size(); ++k) {
            lw += entries[k].w;
            ls += entries[k].w * entries[k].t;
            lss += entries[k].w * entries[k].t * entries[k].t;
            if (entries[k].x == entries[k + 1].x) {
                continue;
            }
            const double lo = entries[k].x;
            const double hi = entries[k + 1].x;
            double threshold = lo + (hi - lo) / 2.0;
            if (!(threshold < hi)) {
                threshold = lo;
            }
            const double gain = parent - node_impurity(criterion, lw, ls, lss) -
                                node_impurity(criterion, total_w - lw, total_s - ls, total_ss - lss);
            if (!best || gain > best->gain + kGainTieTolerance) {
                best = SplitCandidate{static_cast<int>(f), threshold, gain};
            }
        }
    }
    if (best && best->gain < 0.0) {
        best->gain = 0.0;
    }
    return best;
}

DecisionTree grow_tree(const Matrix& X, std::span<const double> target, std::span<const double> weights,
                       const TreeOptions& options, Rng* rng, const LeafValueFn& leaf_value) {
    return TreeGrower(X, target, weights, options, rng, leaf_value).grow();
}

DecisionTree grow_classification_tree(const Matrix& X, std::span<const int> y, std::span<const double> weights,
                                      const TreeOptions& options, Rng* rng) {
    std::vector<double> target(y.begin(), y.end());
    const LeafValueFn fraction = [&](std::span<const std::size_t> rows, std::span<const double> w) {
        double total = 0.0, pos = 0.0;
        for (std::size_t r : rows) {
            total += w[r];
            pos += w[r] * target[r];
        }
        return total > 0.0 ? pos / total : 0.0;
    };
    TreeOptions gini = options;
    gini.criterion = SplitCriterion::Gini;
    return grow_tree(X, target, weights, gini, rng, fraction);
}

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double logistic_loss(std::span<const double> params, const Matrix& X, std::span<const int> y, double l2) {
    const std::size_t p = X.cols();
    double loss = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        double z = params[p];
        const auto row = X.row(i);
        for (std::size_t j = 0; j < p; ++j) {
            z += params[j] * row[j];
        }
        loss += log1p_exp(z) - static_cast<double>(y[i]) * z;
    }
    loss /= static_cast<double>(X.rows());
    double norm = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        norm += params[j] * params[j];
    }
    return loss + 0.5 * l2 * norm;
}

std::vector<double> logistic_gradient(std::span<const double> params, const Matrix& X, std::span<const int> y,
                                      double l2) {
    const std::size_t p = X.cols();
    std::vector<double> grad(p + 1, 0.0);
    for (std::size_t i = 0; i < X.rows(); ++i) {
        double z = params[p];
        const auto row = X.row(i);
        for (std::size_t j = 0; j < p; ++j) {
            z += params[j] * row[j];
        }
        const double err = sigmoid(z) - static_cast<double>(y[i]);
        for (std::size_t j = 0; j < p; ++j) {
            grad[j] += err * row[j];
        }
        grad[p] += err;
    }
    const double inv_n = 1.0 / static_cast<double>(X.rows());
    for (std::size_t j = 0; j < p; ++j) {
        grad[j] = grad[j] * inv_n + l2 * params[j];
    }
    grad[p] *= inv_n;
    return grad;
}

TrainedModel train(const ModelConfig& config, std::span<const std::string> feature_names, const Matrix& X,
                   std::span<const int> y) {
    config.validate();
    check_inputs(feature_names, X, y);
    TrainedModel model;
    model.config = config;
    model.feature_names.assign(feature_names.begin(), feature_names.end());
    model.fingerprint = schema_fingerprint(feature_names);
    model.raw_importance.assign(X.cols(), 0.0);

    switch (config.kind) {
    case ModelKind::Logistic: {
        const auto positives = std::count(y.begin(), y.end(), 1);
        if (positives == 0 || positives == static_cast<std::ptrdiff_t>(y.size())) {
            throw Error(ErrorKind::SingleClassInput, "logistic regression needs both classes");
        }
        model.logistic = train_logistic(config.logistic, X, y);
        for (std::size_t j = 0; j < X.cols(); ++j) {
            model.raw_importance[j] = std::abs(model.logistic.weights[j]);
        }
        break;
    }
    case ModelKind::RandomForest: {
        Rng rng(config.seed);
        model.forest = train_forest(config.forest, X, y, rng);
        for (const auto& tree : model.forest.trees) {
            accumulate_gains(tree, model.raw_importance);
        }
        break;
    }
    case ModelKind::GradientBoost:
        model.boost = train_boost(config.boost, X, y);
        for (const auto& tree : model.boost.trees) {
            accumulate_gains(tree, model.raw_importance);
        }
        break;
    }
    return model;
}

std::vector<double> predict_scores(const TrainedModel& model, std::span<const std::string> feature_names,
                                   const Matrix& X) {
    if (schema_fingerprint(feature_names) != model.fingerprint || X.cols() != model.feature_names.size()) {
        throw Error(ErrorKind::SchemaMismatch, "feature schema differs from the training schema");
    }
    std::vector<double> scores(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const auto x = X.row(i);
        switch (model.kind()) {
        case ModelKind::Logistic: {
            const auto z = standardized_row(model.logistic, x);
            double s = model.logistic.intercept;
            for (std::size_t j = 0; j < z.size(); ++j) {
                s += model.logistic.weights[j] * z[j];
            }
            scores[i] = sigmoid(s);
            break;
        }
        case ModelKind::RandomForest: {
            std::size_t votes = 0;
            for (const auto& tree : model.forest.trees) {
                votes += tree.predict(x) >= 0.5 ? 1 : 0;
            }
            scores[i] = static_cast<double>(votes) / static_cast<double>(model.forest.trees.size());
            break;
        }
        case ModelKind::GradientBoost: {
            double f = model.boost.base_score;
            for (const auto& tree : model.boost.trees) {
                f += model.boost.learning_rate * tree.predict(x);
            }
            scores[i] = sigmoid(f);
            break;
        }
        }
    }
    return scores;
}

std::string_view to_string(Modality m) {
    switch (m) {
    case Modality::Accelerometer: return "accelerometer";
    case Modality::Gyroscope: return "gyroscope";
    case Modality::Heart: return "heart";
    }
    return "heart";
}

std::optional<Modality> parse_modality(std::string_view name) {
    if (name == "accelerometer" || name == "acc") return Modality::Accelerometer;
    if (name == "gyroscope" || name == "gyr") return Modality::Gyroscope;
    if (name == "heart" || name == "hr") return Modality::Heart;
    return std::nullopt;
}

Modality modality_of(std::string_view feature_name) {
    if (feature_name.starts_with("acc")) return Modality::Accelerometer;
    if (feature_name.starts_with("gyr")) return Modality::Gyroscope;
    if (feature_name.starts_with("HR") || feature_name.starts_with("RMSSD")) return Modality::Heart;
    throw Error(ErrorKind::SchemaMismatch, "feature '" + std::string(feature_name) + "' has no modality");
}

FeatureImportanceReport feature_importances(const TrainedModel& model) {
    FeatureImportanceReport report;
    report.names = model.feature_names;
    report.importance = model.raw_importance;
    if (model.kind() != ModelKind::Logistic) {
        const double total = std::accumulate(report.importance.begin(), report.importance.end(), 0.0);
        if (total > 0.0) {
            for (double& v : report.importance) {
                v /= total;
            }
        }
    }
    for (std::size_t j = 0; j < report.names.size(); ++j) {
        report.per_modality[modality_of(report.names[j])] += report.importance[j];
    }
    return report;
}

std::string model_to_json(const TrainedModel& model) {
    using nlohmann::json;
    const auto& c = model.config;
    json j;
    j["format_version"] = kModelFormatVersion;
    j["kind"] = to_string(model.kind());
    j["seed"] = c.seed;
    j["hyperparameters"] = {
        {"logistic", {{"learning_rate", c.logistic.learning_rate}, {"l2", c.logistic.l2},
                      {"max_iterations", c.logistic.max_iterations}, {"tolerance", c.logistic.tolerance}}},
        {"forest", {{"n_trees", c.forest.n_trees}, {"max_depth", c.forest.max_depth},
                    {"min_samples_split", c.forest.min_samples_split}, {"max_features", c.forest.max_features},
                    {"bootstrap", c.forest.bootstrap}}},
        {"boost", {{"n_trees", c.boost.n_trees}, {"max_depth", c.boost.max_depth},
                   {"learning_rate", c.boost.learning_rate}, {"min_samples_split", c.boost.min_samples_split}}},
    };
    j["feature_names"] = model.feature_names;
    j["schema_fingerprint"] = model.fingerprint;
    j["raw_importance"] = model.raw_importance;
    json params;
    switch (model.kind()) {
    case ModelKind::Logistic:
        params = {{"weights", model.logistic.weights}, {"intercept", model.logistic.intercept},
                  {"center", model.logistic.center}, {"scale", model.logistic.scale},
                  {"iterations", model.logistic.iterations}, {"converged", model.logistic.converged}};
        break;
    case ModelKind::RandomForest: {
        json trees = json::array();
        for (const auto& t : model.forest.trees) trees.push_back(tree_to_json(t));
        params = {{"trees", trees}};
        break;
    }
    case ModelKind::GradientBoost: {
        json trees = json::array();
        for (const auto& t : model.boost.trees) trees.push_back(tree_to_json(t));
        params = {{"base_score", model.boost.base_score}, {"learning_rate", model.boost.learning_rate},
                  {"trees", trees}};
        break;
    }
    }
    j["parameters"] = params;
    return j.dump();
}

TrainedModel model_from_json(std::string_view text) {
    using nlohmann::json;
    try {
        const json j = json::parse(text);
        if (j.at("format_version").get<int>() != kModelFormatVersion) {
            throw Error(ErrorKind::InvalidConfig, "unsupported model format version");
        }
        TrainedModel m;
        auto& c = m.config;
        c.kind = parse_model_kind(j.at("kind").get<std::string>());
        c.seed = j.at("seed").get<std::uint64_t>();
        const auto& h = j.at("hyperparameters");
        c.logistic.learning_rate = h.at("logistic").at("learning_rate").get<double>();
        c.logistic.l2 = h.at("logistic").at("l2").get<double>();
        c.logistic.max_iterations = h.at("logistic").at("max_iterations").get<int>();
        c.logistic.tolerance = h.at("logistic").at("tolerance").get<double>();
        c.forest.n_trees = h.at("forest").at("n_trees").get<int>();
        c.forest.max_depth = h.at("forest").at("max_depth").get<int>();
        c.forest.min_samples_split = h.at("forest").at("min_samples_split").get<int>();
        c.forest.max_features = h.at("forest").at("max_features").get<int>();
        c.forest.bootstrap = h.at("forest").at("bootstrap").get<bool>();
        c.boost.n_trees = h.at("boost").at("n_trees").get<int>();
        c.boost.max_depth = h.at("boost").at("max_depth").get<int>();
        c.boost.learning_rate = h.at("boost").at("learning_rate").get<double>();
        c.boost.min_samples_split = h.at("boost").at("min_samples_split").get<int>();
        m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        m.fingerprint = j.at("schema_fingerprint").get<std::string>();
        if (m.fingerprint != schema_fingerprint(m.feature_names)) {
            throw Error(ErrorKind::SchemaMismatch, "fingerprint does not match feature names");
        }
        m.raw_importance = j.at("raw_importance").get<std::vector<double>>();
        const auto& p = j.at("parameters");
        switch (c.kind) {
        case ModelKind::Logistic:
            m.logistic.weights = p.at("weights").get<std::vector<double>>();
            m.logistic.intercept = p.at("intercept").get<double>();
            m.logistic.center = p.at("center").get<std::vector<double>>();
            m.logistic.scale = p.at("scale").get<std::vector<double>>();
            m.logistic.iterations = p.at("iterations").get<int>();
            m.logistic.converged = p.at("converged").get<bool>();
            break;
        case ModelKind::RandomForest:
            for (const auto& t : p.at("trees")) m.forest.trees.push_back(tree_from_json(t));
            break;
        case ModelKind::GradientBoost:
            m.boost.base_score = p.at("base_score").get<double>();
            m.boost.learning_rate = p.at("learning_rate").get<double>();
            for (const auto& t : p.at("trees")) m.boost.trees.push_back(tree_from_json(t));
            break;
        }
        return m;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidConfig, std::string("model json: ") + e.what());
    }
}

bool TrainedModel::operator==(const TrainedModel& other) const {
    return model_to_json(*this) == model_to_json(other);
}

} // namespace bfrb
