#pragma once

#include "bfrb/features.hpp"
#include "bfrb/models.hpp"
#include "bfrb/preprocess.hpp"
#include "bfrb/windowing.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace bfrb {

enum class CvStrategy { LeaveOneUserOut, ParticipantStratified };

std::string_view to_string(CvStrategy s);
/// "louo"/"generic" or "stratified"/"personalized".
CvStrategy parse_cv_strategy(std::string_view name);

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    /// LOUO: the held-out participant. Stratified: empty.
    std::string participant;
    /// Stratified: iteration number. LOUO: fold number.
    int iteration = 0;
};

struct FoldPlan {
    CvStrategy strategy = CvStrategy::LeaveOneUserOut;
    double test_fraction = 0.2;
    int iterations = 10;
    std::uint64_t seed = 0;
    std::vector<Fold> folds;
};

/// `participant_of_row[i]` names the participant owning row i.
/// LOUO: one fold per participant, in sorted participant order.
/// Stratified: `iterations` folds; each holds out ceil(fraction * n_p) rows of
/// every participant, drawn without replacement with seed + iteration.
/// Throws TooFewParticipants (LOUO, < 2) or TooFewSamples (stratified, < 5 rows).
FoldPlan plan_folds(std::span<const std::string> participant_of_row, CvStrategy strategy, std::uint64_t seed,
                    double test_fraction = 0.2, int iterations = 10);
FoldPlan plan_folds(const FeatureDataset& dataset, CvStrategy strategy, std::uint64_t seed);

/// Mann-Whitney AUC: P(s+ > s-) + P(s+ = s-) / 2. Throws SingleClassLabels.
double auc(std::span<const double> scores, std::span<const int> labels);

struct Confusion {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
    Confusion& operator+=(const Confusion& o);
};

struct ClassificationMetrics {
    double recall = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
    Confusion confusion;
};

inline constexpr double kDecisionThreshold = 0.5;

/// Predicted positive iff score >= threshold. F1 is 0 when P + R = 0.
/// Throws NoPositives.
ClassificationMetrics recall_f1_confusion(std::span<const double> scores, std::span<const int> labels,
                                          double threshold = kDecisionThreshold);

struct RocPoint {
    /// +inf for the (0, 0) origin.
    double threshold = std::numeric_limits<double>::infinity();
    double fpr = 0.0;
    double tpr = 0.0;
};

/// (0,0), one point per distinct score (descending), and (1,1).
std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const int> labels);
double trapezoid_area(std::span<const RocPoint> points);

class ModalitySubset {
public:
    static ModalitySubset all();
    /// Throws InvalidConfig on an empty set.
    explicit ModalitySubset(std::set<Modality> modalities);
    /// "all", "acc", "gyr", "heart" or a '+'-joined combination.
    static ModalitySubset parse(std::string_view text);

    bool includes(std::string_view feature_name) const;
    bool is_all() const { return modalities_.size() == 3; }
    const std::set<Modality>& modalities() const { return modalities_; }
    std::string name() const;
    bool operator==(const ModalitySubset&) const = default;

private:
    std::set<Modality> modalities_;
};

struct ExperimentConfig {
    WindowSpec spec{60, 1};
    LabelSet labels = LabelSet::all_compulsive();
    ModelConfig model;
    CvStrategy strategy = CvStrategy::ParticipantStratified;
    ModalitySubset ablation = ModalitySubset::all();
    std::uint64_t seed = 0;
    DatasetOptions dataset;
    FeatureOptions features;
    double hrv_threshold = 0.5;
    /// The validity filter runs when A = 300 unless this is set.
    std::optional<bool> hrv_filter;

    bool applies_hrv_filter() const { return hrv_filter.value_or(spec.x_seconds() == kHrvWindowSeconds); }
};

struct MetricSummary {
    double mean = 0.0;
    double std = 0.0; // population, across defined folds
    std::size_t count = 0;
};

struct FoldResult {
    int index = 0;
    std::string participant;
    int iteration = 0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::size_t n_test_positive = 0;
    bool defined = false;
    std::string undefined_reason;
    double recall = 0.0;
    double auc = 0.0;
    double f1 = 0.0;
    Confusion confusion;
};

struct DatasetSummary {
    std::size_t windows = 0;
    std::size_t positives = 0;
    std::size_t negatives = 0;
    std::size_t excluded = 0;
    std::size_t skipped_positives = 0;
    bool hrv_filter_applied = false;
    DropoutReport dropout;
};

struct EvalReport {
    ExperimentConfig config;
    std::vector<std::string> feature_names;
    FoldPlan plan;
    std::vector<FoldResult> folds;
    MetricSummary recall;
    MetricSummary auc;
    MetricSummary f1;
    std::size_t undefined_folds = 0;
    Confusion confusion;
    std::vector<RocPoint> roc;
    FeatureImportanceReport importances;
    DatasetSummary data;
};

/// Windows -> features -> (validity filter) for one configuration.
struct ExperimentData {
    FeatureDataset dataset;
    DatasetSummary summary;
};

ExperimentData prepare_experiment_data(const std::vector<PreparedSession>& sessions, const ExperimentConfig& config);

/// Row-major matrix of the named columns, plus labels.
Matrix feature_matrix(const FeatureDataset& dataset, std::span<const std::string> names);
std::vector<int> label_vector(const FeatureDataset& dataset);

/// Trains and scores every fold of `plan` on the columns allowed by
/// `config.ablation`.
EvalReport evaluate(const ExperimentData& data, const FoldPlan& plan, const ExperimentConfig& config);

EvalReport run_experiment(const std::vector<PreparedSession>& sessions, const ExperimentConfig& config);

/// One report per subset, plus all modalities if absent; every report shares
/// a single fold plan.
std::vector<EvalReport> run_ablation_suite(const std::vector<PreparedSession>& sessions,
                                           const ExperimentConfig& config,
                                           const std::vector<ModalitySubset>& subsets);

// ---------------------------------------------------------------------------
// Descriptive statistics

struct DurationStats {
    std::size_t count = 0;
    double total_s = 0.0;
    double mean_s = 0.0;
    double median_s = 0.0;
    double min_s = 0.0;
    double max_s = 0.0;
};

struct ParticipantStats {
    std::string participant_id;
    DurationStats durations;
    std::map<Behavior, std::size_t> counts;
    /// stage -> mean baseline-normalized heart rate (absent when no valid hr).
    std::map<Stage, double> stage_hr;
};

struct DescriptiveReport {
    std::vector<ParticipantStats> participants;
    /// stage -> mean over participants of the per-participant stage mean.
    std::map<Stage, double> stage_hr_mean;
    std::map<Stage, std::size_t> stage_counts;
    /// Events whose onset lies outside every stage mark.
    std::size_t unstaged_events = 0;
    std::map<Behavior, std::size_t> behavior_counts;
    std::size_t total_events = 0;
    double total_duration_min = 0.0;

    /// Percentage share of a behavior; nullopt when there are no events.
    std::optional<double> share_percent(Behavior b) const;
};

DescriptiveReport descriptive_stats_report(const std::vector<PreparedSession>& sessions);

} // namespace bfrb
