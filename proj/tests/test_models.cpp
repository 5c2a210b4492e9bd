#include "bfrb/error.hpp"
#include "bfrb/models.hpp"
#include "bfrb/random.hpp"

#include <doctest.h>

#include <cmath>

using namespace bfrb;

namespace {

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    return m;
}

std::vector<std::string> names(std::size_t p) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < p; ++i) out.push_back("accX_f" + std::to_string(i));
    return out;
}

std::size_t correct(const std::vector<double>& scores, const std::vector<int>& y) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < y.size(); ++i) n += (scores[i] >= 0.5) == (y[i] == 1);
    return n;
}

} // namespace

TEST_CASE("model kind names") {
    CHECK(parse_model_kind("rf") == ModelKind::RandomForest);
    CHECK(parse_model_kind("gradient-boost") == ModelKind::GradientBoost);
    CHECK(parse_model_kind("lr") == ModelKind::Logistic);
    CHECK_THROWS_AS(parse_model_kind("svm"), Error);
}

TEST_CASE("XOR: depth-2 tree fits, logistic cannot") {
    const auto X = from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    const std::vector<int> y{0, 1, 1, 0};
    const std::vector<double> w(4, 1.0);
    TreeOptions opts;
    opts.max_depth = 2;
    const auto tree = grow_classification_tree(X, y, w, opts);
    for (std::size_t i = 0; i < 4; ++i) CHECK((tree.predict(X.row(i)) >= 0.5) == (y[i] == 1));
    CHECK(tree.depth() <= 2);

    ModelConfig lr;
    const auto model = train(lr, names(2), X, y);
    CHECK(correct(predict_scores(model, names(2), X), y) <= 3);
}

TEST_CASE("separable toy set") {
    const auto X = from_rows({{0, 1}, {1, 0}, {1, 1}, {3, 4}, {4, 3}, {4, 4}});
    const std::vector<int> y{0, 0, 0, 1, 1, 1};
    for (ModelKind kind : {ModelKind::Logistic, ModelKind::RandomForest, ModelKind::GradientBoost}) {
        ModelConfig c;
        c.kind = kind;
        c.seed = 3;
        const auto m = train(c, names(2), X, y);
        const auto s = predict_scores(m, names(2), X);
        if (kind == ModelKind::RandomForest) {
            CHECK(correct(s, y) == 6);
        }
        CHECK(s[0] < 0.5);
        CHECK(s[5] > 0.5);
        for (double v : s) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("training preconditions") {
    const auto X = from_rows({{0}, {1}, {2}});
    ModelConfig c;
    CHECK_THROWS_AS(train(c, names(1), X, std::vector<int>{1, 1, 1}), Error);
    CHECK_THROWS_AS(train(c, names(2), X, std::vector<int>{0, 1, 1}), Error);
    auto bad = X;
    bad(1, 0) = std::nan("");
    CHECK_THROWS_AS(train(c, names(1), bad, std::vector<int>{0, 1, 1}), Error);
    c.kind = ModelKind::RandomForest;
    c.forest.n_trees = 0;
    CHECK_THROWS_AS(train(c, names(1), X, std::vector<int>{0, 1, 1}), Error);
}

TEST_CASE("zero logistic model predicts one half") {
    const auto X = from_rows({{0, 1}, {1, 0}, {5, -2}});
    const std::vector<int> y{0, 1, 0};
    auto m = train(ModelConfig{}, names(2), X, y);
    std::fill(m.logistic.weights.begin(), m.logistic.weights.end(), 0.0);
    m.logistic.intercept = 0.0;
    for (double s : predict_scores(m, names(2), X)) CHECK(s == 0.5);
}

TEST_CASE("forest where every tree votes positive scores 1") {
    const auto X = from_rows({{0}, {1}, {2}, {3}});
    const std::vector<int> y{0, 0, 1, 1};
    ModelConfig c;
    c.kind = ModelKind::RandomForest;
    c.forest.n_trees = 10;
    c.forest.bootstrap = false;
    const auto m = train(c, names(1), X, y);
    const auto s = predict_scores(m, names(1), from_rows({{10}}));
    CHECK(s[0] == 1.0);
}

TEST_CASE("schema mismatch at prediction") {
    const auto X = from_rows({{0, 1}, {1, 0}});
    const auto m = train(ModelConfig{}, names(2), X, std::vector<int>{0, 1});
    const std::vector<std::string> other{"gyrXmean", "gyrYmean"};
    CHECK_THROWS_AS(predict_scores(m, other, X), Error);
}

TEST_CASE("forest importance concentrates on the informative feature") {
    Rng rng(11);
    const std::size_t n = 300;
    Matrix X(n, 4);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < 4; ++c) X(i, c) = rng.normal();
        y[i] = X(i, 1) > 0 ? 1 : 0;
    }
    ModelConfig c;
    c.kind = ModelKind::RandomForest;
    c.forest.n_trees = 30;
    c.forest.max_features = 4;
    c.seed = 2;
    const auto m = train(c, names(4), X, y);
    const auto imp = feature_importances(m);
    CHECK(imp.importance[1] > 0.9);
    double total = 0.0;
    for (double v : imp.importance) total += v;
    CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("logistic importance picks the informative feature") {
    Rng rng(5);
    const std::size_t n = 200;
    Matrix X(n, 3);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < 3; ++c) X(i, c) = rng.normal();
        y[i] = X(i, 2) + 0.3 * rng.normal() > 0 ? 1 : 0;
    }
    const auto imp = feature_importances(train(ModelConfig{}, names(3), X, y));
    CHECK(std::max_element(imp.importance.begin(), imp.importance.end()) - imp.importance.begin() == 2);
}

TEST_CASE("modality mapping") {
    CHECK(modality_of("accXmean") == Modality::Accelerometer);
    CHECK(modality_of("gyrZstd") == Modality::Gyroscope);
    CHECK(modality_of("HRmean") == Modality::Heart);
    CHECK(modality_of("RMSSDstd") == Modality::Heart);
}

TEST_CASE("model json round trip") {
    Rng rng(8);
    Matrix X(40, 3);
    std::vector<int> y(40);
    for (std::size_t i = 0; i < 40; ++i) {
        for (std::size_t c = 0; c < 3; ++c) X(i, c) = rng.normal();
        y[i] = X(i, 0) + X(i, 2) > 0;
    }
    for (ModelKind kind : {ModelKind::Logistic, ModelKind::RandomForest, ModelKind::GradientBoost}) {
        ModelConfig c;
        c.kind = kind;
        c.forest.n_trees = 5;
        c.boost.n_trees = 5;
        const auto m = train(c, names(3), X, y);
        const auto back = model_from_json(model_to_json(m));
        CHECK(back == m);
        CHECK(predict_scores(back, names(3), X) == predict_scores(m, names(3), X));
    }
}

TEST_CASE("training is deterministic") {
    Rng rng(9);
    Matrix X(60, 4);
    std::vector<int> y(60);
    for (std::size_t i = 0; i < 60; ++i) {
        for (std::size_t c = 0; c < 4; ++c) X(i, c) = rng.normal();
        y[i] = rng.uniform() < 0.5;
    }
    ModelConfig c;
    c.kind = ModelKind::RandomForest;
    c.forest.n_trees = 10;
    c.seed = 77;
    CHECK(model_to_json(train(c, names(4), X, y)) == model_to_json(train(c, names(4), X, y)));
}
