#include "bfrb/evaluation.hpp"

#include "bfrb/error.hpp"
#include "bfrb/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bfrb {

namespace {

MetricSummary summarize(const std::vector<double>& values) {
    MetricSummary s;
    s.count = values.size();
    if (values.empty()) {
        return s;
    }
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) {
        ss += (v - s.mean) * (v - s.mean);
    }
    s.std = std::sqrt(ss / static_cast<double>(values.size()));
    return s;
}

void require_both_classes(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        throw Error(ErrorKind::SchemaMismatch, "scores and labels differ in length");
    }
    const auto pos = std::count(labels.begin(), labels.end(), 1);
    if (pos == 0 || pos == static_cast<std::ptrdiff_t>(labels.size())) {
        throw Error(ErrorKind::SingleClassLabels, "both classes are required");
    }
}

} // namespace

std::string_view to_string(CvStrategy s) {
    return s == CvStrategy::LeaveOneUserOut ? "louo" : "stratified";
}

CvStrategy parse_cv_strategy(std::string_view name) {
    if (name == "louo" || name == "generic" || name == "leave-one-user-out") return CvStrategy::LeaveOneUserOut;
    if (name == "stratified" || name == "personalized" || name == "participant-stratified")
        return CvStrategy::ParticipantStratified;
    throw Error(ErrorKind::InvalidConfig, "unknown cv strategy '" + std::string(name) + "'");
}

FoldPlan plan_folds(std::span<const std::string> participant_of_row, CvStrategy strategy, std::uint64_t seed,
                    double test_fraction, int iterations) {
    FoldPlan plan;
    plan.strategy = strategy;
    plan.seed = seed;
    plan.test_fraction = test_fraction;
    plan.iterations = strategy == CvStrategy::LeaveOneUserOut ? 0 : iterations;

    std::map<std::string, std::vector<std::size_t>> rows_of;
    for (std::size_t i = 0; i < participant_of_row.size(); ++i) {
        rows_of[participant_of_row[i]].push_back(i);
    }
    const std::size_t n = participant_of_row.size();

    if (strategy == CvStrategy::LeaveOneUserOut) {
        if (rows_of.size() < 2) {
            throw Error(ErrorKind::TooFewParticipants, std::to_string(rows_of.size()) + " participant(s)");
        }
        int index = 0;
        for (const auto& [participant, rows] : rows_of) {
            Fold fold;
            fold.participant = participant;
            fold.iteration = index++;
            fold.test = rows;
            for (std::size_t i = 0; i < n; ++i) {
                if (participant_of_row[i] != participant) {
                    fold.train.push_back(i);
                }
            }
            plan.folds.push_back(std::move(fold));
        }
        return plan;
    }

    if (rows_of.empty()) {
        throw Error(ErrorKind::TooFewParticipants, "no rows");
    }
    for (const auto& [participant, rows] : rows_of) {
        if (rows.size() < 5) {
            throw Error(ErrorKind::TooFewSamples, participant + " has " + std::to_string(rows.size()) + " rows");
        }
    }
    for (int it = 0; it < iterations; ++it) {
        Rng rng(seed + static_cast<std::uint64_t>(it));
        Fold fold;
        fold.iteration = it;
        std::vector<bool> is_test(n, false);
        for (const auto& [participant, rows] : rows_of) {
            const auto k = static_cast<std::size_t>(
                std::ceil(test_fraction * static_cast<double>(rows.size()) - 1e-9));
            for (std::size_t pick : rng.sample_without_replacement(rows.size(), k)) {
                is_test[rows[pick]] = true;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            (is_test[i] ? fold.test : fold.train).push_back(i);
        }
        plan.folds.push_back(std::move(fold));
    }
    return plan;
}

FoldPlan plan_folds(const FeatureDataset& dataset, CvStrategy strategy, std::uint64_t seed) {
    std::vector<std::string> owners;
    owners.reserve(dataset.vectors.size());
    for (const auto& v : dataset.vectors) {
        owners.push_back(v.participant_id);
    }
    return plan_folds(owners, strategy, seed);
}

double auc(std::span<const double> scores, std::span<const int> labels) {
    require_both_classes(scores, labels);
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Twice the mid-rank keeps tie handling in exact integer arithmetic.
    std::uint64_t rank_sum_x2 = 0;
    std::uint64_t n_pos = 0;
    for (std::size_t a = 0; a < n;) {
        std::size_t b = a + 1;
        while (b < n && scores[order[b]] == scores[order[a]]) {
            ++b;
        }
        const std::uint64_t rank_x2 = a + 1 + b;
        for (std::size_t k = a; k < b; ++k) {
            if (labels[order[k]] == 1) {
                rank_sum_x2 += rank_x2;
                ++n_pos;
            }
        }
        a = b;
    }
    const std::uint64_t n_neg = n - n_pos;
    const std::uint64_t u_x2 = rank_sum_x2 - n_pos * (n_pos + 1);
    return static_cast<double>(u_x2) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

Confusion& Confusion::operator+=(const Confusion& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
}

ClassificationMetrics recall_f1_confusion(std::span<const double> scores, std::span<const int> labels,
                                          double threshold) {
    if (scores.size() != labels.size()) {
        throw Error(ErrorKind::SchemaMismatch, "scores and labels differ in length");
    }
    ClassificationMetrics m;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool predicted = scores[i] >= threshold;
        if (labels[i] == 1) {
            (predicted ? m.confusion.tp : m.confusion.fn) += 1;
        } else {
            (predicted ? m.confusion.fp : m.confusion.tn) += 1;
        }
    }
    const auto& c = m.confusion;
    if (c.tp + c.fn == 0) {
        throw Error(ErrorKind::NoPositives, "no positive labels");
    }
    m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    m.precision = c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    m.f1 = m.precision + m.recall == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const int> labels) {
    require_both_classes(scores, labels);
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    const auto total_pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
    const auto total_neg = static_cast<double>(n) - total_pos;

    std::vector<RocPoint> points{RocPoint{}};
    std::size_t tp = 0, fp = 0;
    for (std::size_t a = 0; a < n;) {
        std::size_t b = a;
        while (b < n && scores[order[b]] == scores[order[a]]) {
            (labels[order[b]] == 1 ? tp : fp) += 1;
            ++b;
        }
        points.push_back({scores[order[a]], static_cast<double>(fp) / total_neg, static_cast<double>(tp) / total_pos});
        a = b;
    }
    return points;
}

double trapezoid_area(std::span<const RocPoint> points) {
    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) / 2.0;
    }
    return area;
}

ModalitySubset ModalitySubset::all() {
    return ModalitySubset({Modality::Accelerometer, Modality::Gyroscope, Modality::Heart});
}

ModalitySubset::ModalitySubset(std::set<Modality> modalities) : modalities_(std::move(modalities)) {
    if (modalities_.empty()) {
        throw Error(ErrorKind::InvalidConfig, "modality subset is empty");
    }
}

ModalitySubset ModalitySubset::parse(std::string_view text) {
    if (text == "all") {
        return all();
    }
    std::set<Modality> set;
    while (!text.empty()) {
        const auto plus = text.find('+');
        const auto token = text.substr(0, plus);
        const auto m = parse_modality(token);
        if (!m) {
            throw Error(ErrorKind::InvalidConfig, "unknown modality '" + std::string(token) + "'");
        }
        set.insert(*m);
        text = plus == std::string_view::npos ? std::string_view{} : text.substr(plus + 1);
    }
    return ModalitySubset(std::move(set));
}

bool ModalitySubset::includes(std::string_view feature_name) const {
    return modalities_.contains(modality_of(feature_name));
}

std::string ModalitySubset::name() const {
    if (is_all()) {
        return "all";
    }
    std::string out;
    for (Modality m : modalities_) {
        if (!out.empty()) out += '+';
        out += m == Modality::Accelerometer ? "acc" : m == Modality::Gyroscope ? "gyr" : "heart";
    }
    return out;
}

Matrix feature_matrix(const FeatureDataset& dataset, std::span<const std::string> names) {
    Matrix X(dataset.vectors.size(), names.size());
    for (std::size_t i = 0; i < dataset.vectors.size(); ++i) {
        const auto& values = dataset.vectors[i].values;
        for (std::size_t j = 0; j < names.size(); ++j) {
            auto it = values.find(names[j]);
            if (it == values.end()) {
                throw Error(ErrorKind::SchemaMismatch, "vector lacks feature " + names[j]);
            }
            X(i, j) = it->second;
        }
    }
    return X;
}

std::vector<int> label_vector(const FeatureDataset& dataset) {
    std::vector<int> y;
    y.reserve(dataset.vectors.size());
    for (const auto& v : dataset.vectors) {
        y.push_back(v.label);
    }
    return y;
}

ExperimentData prepare_experiment_data(const std::vector<PreparedSession>& sessions, const ExperimentConfig& config) {
    std::vector<const SessionBundle*> raw;
    raw.reserve(sessions.size());
    for (const auto& s : sessions) {
        raw.push_back(&s.raw);
    }
    const WindowDataset windows = build_dataset(raw, config.spec, config.labels, config.seed, config.dataset);
    ExperimentData data;
    data.dataset = featurize_dataset(windows, sessions, config.features);
    data.summary.excluded = data.dataset.excluded.size();
    for (const auto& [id, n] : windows.skipped) {
        data.summary.skipped_positives += n;
    }
    if (config.applies_hrv_filter()) {
        auto filtered = hrv_validity_filter(data.dataset, config.hrv_threshold);
        data.dataset = std::move(filtered.dataset);
        data.summary.dropout = std::move(filtered.report);
        data.summary.hrv_filter_applied = true;
    }
    data.summary.windows = data.dataset.vectors.size();
    for (const auto& v : data.dataset.vectors) {
        (v.label == 1 ? data.summary.positives : data.summary.negatives) += 1;
    }
    return data;
}

EvalReport evaluate(const ExperimentData& data, const FoldPlan& plan, const ExperimentConfig& config) {
    EvalReport report;
    report.config = config;
    report.plan = plan;
    report.data = data.summary;
    for (const auto& name : data.dataset.names) {
        if (config.ablation.includes(name)) {
            report.feature_names.push_back(name);
        }
    }
    if (report.feature_names.empty()) {
        throw Error(ErrorKind::InvalidConfig, "ablation '" + config.ablation.name() + "' leaves no features");
    }
    const Matrix X = feature_matrix(data.dataset, report.feature_names);
    const std::vector<int> y = label_vector(data.dataset);

    std::vector<double> recalls, aucs, f1s, pooled_scores;
    std::vector<int> pooled_labels;
    std::vector<double> importance_sum(report.feature_names.size(), 0.0);
    std::size_t importance_models = 0;

    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        const Fold& fold = plan.folds[f];
        FoldResult result;
        result.index = static_cast<int>(f);
        result.participant = fold.participant;
        result.iteration = fold.iteration;
        result.n_train = fold.train.size();
        result.n_test = fold.test.size();

        std::vector<int> y_train, y_test;
        for (std::size_t i : fold.train) y_train.push_back(y[i]);
        for (std::size_t i : fold.test) y_test.push_back(y[i]);
        result.n_test_positive = static_cast<std::size_t>(std::count(y_test.begin(), y_test.end(), 1));

        if (fold.train.empty() || fold.test.empty()) {
            result.undefined_reason = "empty split";
        } else if (result.n_test_positive == 0 || result.n_test_positive == y_test.size()) {
            result.undefined_reason = "single-class test set";
        } else {
            ModelConfig model_config = config.model;
            model_config.seed = config.model.seed + f;
            try {
                const TrainedModel model =
                    train(model_config, report.feature_names, X.select_rows(fold.train), y_train);
                const auto scores = predict_scores(model, report.feature_names, X.select_rows(fold.test));
                const auto metrics = recall_f1_confusion(scores, y_test);
                result.defined = true;
                result.recall = metrics.recall;
                result.f1 = metrics.f1;
                result.auc = auc(scores, y_test);
                result.confusion = metrics.confusion;
                pooled_scores.insert(pooled_scores.end(), scores.begin(), scores.end());
                pooled_labels.insert(pooled_labels.end(), y_test.begin(), y_test.end());
                const auto imp = feature_importances(model);
                for (std::size_t j = 0; j < importance_sum.size(); ++j) {
                    importance_sum[j] += imp.importance[j];
                }
                ++importance_models;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::SingleClassInput) {
                    throw;
                }
                result.undefined_reason = "single-class training set";
            }
        }
        if (result.defined) {
            recalls.push_back(result.recall);
            aucs.push_back(result.auc);
            f1s.push_back(result.f1);
            report.confusion += result.confusion;
        } else {
            ++report.undefined_folds;
        }
        report.folds.push_back(std::move(result));
    }

    report.recall = summarize(recalls);
    report.auc = summarize(aucs);
    report.f1 = summarize(f1s);
    if (!pooled_scores.empty()) {
        report.roc = roc_points(pooled_scores, pooled_labels);
    }
    report.importances.names = report.feature_names;
    report.importances.importance = importance_sum;
    if (importance_models > 0) {
        for (double& v : report.importances.importance) {
            v /= static_cast<double>(importance_models);
        }
    }
    for (std::size_t j = 0; j < report.feature_names.size(); ++j) {
        report.importances.per_modality[modality_of(report.feature_names[j])] += report.importances.importance[j];
    }
    return report;
}

EvalReport run_experiment(const std::vector<PreparedSession>& sessions, const ExperimentConfig& config) {
    const ExperimentData data = prepare_experiment_data(sessions, config);
    const FoldPlan plan = plan_folds(data.dataset, config.strategy, config.seed);
    return evaluate(data, plan, config);
}

std::vector<EvalReport> run_ablation_suite(const std::vector<PreparedSession>& sessions,
                                           const ExperimentConfig& config,
                                           const std::vector<ModalitySubset>& subsets) {
    const ExperimentData data = prepare_experiment_data(sessions, config);
    const FoldPlan plan = plan_folds(data.dataset, config.strategy, config.seed);
    std::vector<ModalitySubset> all = subsets;
    if (std::none_of(all.begin(), all.end(), [](const ModalitySubset& s) { return s.is_all(); })) {
        all.push_back(ModalitySubset::all());
    }
    std::vector<EvalReport> reports;
    for (const auto& subset : all) {
        ExperimentConfig c = config;
        c.ablation = subset;
        reports.push_back(evaluate(data, plan, c));
    }
    return reports;
}

std::optional<double> DescriptiveReport::share_percent(Behavior b) const {
    if (total_events == 0) {
        return std::nullopt;
    }
    auto it = behavior_counts.find(b);
    const std::size_t count = it == behavior_counts.end() ? 0 : it->second;
    return 100.0 * static_cast<double>(count) / static_cast<double>(total_events);
}

DescriptiveReport descriptive_stats_report(const std::vector<PreparedSession>& sessions) {
    DescriptiveReport report;
    for (Behavior b : kAllBehaviors) {
        report.behavior_counts[b] = 0;
    }
    for (Stage s : kAllStages) {
        report.stage_counts[s] = 0;
    }
    std::map<Stage, std::vector<double>> stage_means;
    for (const auto& session : sessions) {
        ParticipantStats ps;
        ps.participant_id = session.participant_id();
        for (Behavior b : kAllBehaviors) {
            ps.counts[b] = 0;
        }
        const auto& events = session.raw.events();
        std::vector<double> durations;
        for (const auto& e : events) {
            ps.counts[e.behavior] += 1;
            report.behavior_counts[e.behavior] += 1;
            durations.push_back(static_cast<double>(e.end - e.start) / 1000.0);
            bool staged = false;
            for (const auto& mark : session.raw.stages()) {
                if (mark.span().contains(e.start)) {
                    report.stage_counts[mark.stage] += 1;
                    staged = true;
                    break;
                }
            }
            if (!staged) {
                ++report.unstaged_events;
            }
        }
        report.total_events += events.size();
        ps.durations.count = durations.size();
        if (!durations.empty()) {
            std::sort(durations.begin(), durations.end());
            ps.durations.total_s = std::accumulate(durations.begin(), durations.end(), 0.0);
            ps.durations.mean_s = ps.durations.total_s / static_cast<double>(durations.size());
            const std::size_t mid = durations.size() / 2;
            ps.durations.median_s = durations.size() % 2 == 1 ? durations[mid]
                                                              : (durations[mid - 1] + durations[mid]) / 2.0;
            ps.durations.min_s = durations.front();
            ps.durations.max_s = durations.back();
        }
        for (const auto& mark : session.normalized.stages()) {
            double sum = 0.0;
            std::size_t n = 0;
            for (const auto& s : session.normalized.recording().slice(mark.span())) {
                if (s.hr) {
                    sum += *s.hr;
                    ++n;
                }
            }
            if (n > 0) {
                ps.stage_hr[mark.stage] = sum / static_cast<double>(n);
                stage_means[mark.stage].push_back(ps.stage_hr[mark.stage]);
            }
        }
        report.total_duration_min += static_cast<double>(session.raw.recording().span().duration()) / 60000.0;
        report.participants.push_back(std::move(ps));
    }
    for (const auto& [stage, means] : stage_means) {
        report.stage_hr_mean[stage] = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(means.size());
    }
    return report;
}

} // namespace bfrb
