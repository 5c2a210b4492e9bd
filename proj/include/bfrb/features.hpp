#pragma once

#include "bfrb/preprocess.hpp"
#include "bfrb/windowing.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bfrb {

struct DescriptiveStats {
    double mean = 0.0;
    double std = 0.0; // population
    double min = 0.0;
    double max = 0.0;
};

/// Throws EmptyChannel on an empty input. A single sample has std 0.
DescriptiveStats descriptive_stats(std::span<const double> values);

/// sqrt( sum_i (RR_i - RR_{i+1})^2 / (n - 1) ). Throws InsufficientData for n < 2.
double rmssd(std::span<const double> rr);
inline double rmssd(const RrSeries& rr) { return rmssd(rr.intervals); }

enum class RmssdMode {
    /// RMSSD over five 60 s sub-segments, summarized as mean/std/min/max.
    SubSegments,
    /// One whole-window RMSSD scalar, emitted as `RMSSD`.
    Single,
};

struct FeatureOptions {
    RmssdMode rmssd_mode = RmssdMode::SubSegments;
};

/// Window length that carries heart-rate variability features.
inline constexpr int kHrvWindowSeconds = 300;

/// Sorted feature names for a window spec: 28, or 32 when A = 300.
std::vector<std::string> feature_schema(const WindowSpec& spec, const FeatureOptions& options = {});

struct FeatureVector {
    std::map<std::string, double> values;
    int label = 0;
    std::string participant_id;
    std::optional<Behavior> behavior;
    bool clean = true;
    double hr_validity = 0.0;
    Millis anchor_ms = 0;
};

/// Throws FeatureUnavailable(name) when a channel or an RMSSD sub-segment
/// lacks data; such windows are excluded downstream.
FeatureVector featurize(const WindowInstance& window, const PreparedSession& session,
                        const WindowSpec& spec, const FeatureOptions& options = {});

struct ExcludedWindow {
    std::string participant_id;
    Millis anchor_ms = 0;
    int label = 0;
    std::string reason;
};

struct FeatureDataset {
    WindowSpec spec{60, 1};
    std::vector<std::string> names;
    std::vector<FeatureVector> vectors;
    std::vector<ExcludedWindow> excluded;

    std::vector<std::string> participants() const;
};

FeatureDataset featurize_dataset(const WindowDataset& windows, const std::vector<PreparedSession>& sessions,
                                 const FeatureOptions& options = {});

struct DropoutCount {
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

struct DropoutReport {
    double threshold = 0.5;
    std::map<std::string, DropoutCount> per_participant;

    std::size_t total() const;
};

struct FilterResult {
    FeatureDataset dataset;
    DropoutReport report;
};

/// Drops vectors whose hr_validity is below `threshold`.
FilterResult hrv_validity_filter(const FeatureDataset& dataset, double threshold = 0.5);

/// Header = feature names + `label,participant,behavior,clean`.
void write_feature_csv(const FeatureDataset& dataset, std::ostream& out);

} // namespace bfrb
