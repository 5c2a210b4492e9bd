#include "bfrb/preprocess.hpp"

#include "bfrb/error.hpp"

#include <algorithm>
#include <cmath>

namespace bfrb {

namespace {

// Two-pass population statistics.
std::pair<double, double> mean_and_pstd(const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    const double mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - mean) * (x - mean);
    }
    return {mean, std::sqrt(ss / static_cast<double>(xs.size()))};
}

} // namespace

BaselineStats compute_baseline_stats(const SessionBundle& bundle) {
    const auto baseline = bundle.stage(Stage::BaselineI);
    if (!baseline) {
        throw Error(ErrorKind::MissingBaselineI, bundle.participant_id());
    }
    const auto samples = bundle.recording().slice(baseline->span());
    if (samples.size() < 2) {
        throw Error(ErrorKind::InsufficientBaseline,
                    bundle.participant_id() + ": " + std::to_string(samples.size()) + " samples in baseline1");
    }
    BaselineStats stats;
    stats.participant_id = bundle.participant_id();
    std::vector<double> values;
    values.reserve(samples.size());
    for (Channel c : kAllChannels) {
        values.clear();
        for (const auto& s : samples) {
            if (auto v = s.value(c)) {
                values.push_back(*v);
            }
        }
        const auto idx = static_cast<std::size_t>(c);
        if (values.empty()) {
            stats.hr_available = false;
            continue;
        }
        std::tie(stats.mu[idx], stats.sigma[idx]) = mean_and_pstd(values);
    }
    return stats;
}

NormalizedSession normalize_session(const SessionBundle& bundle, const BaselineStats& stats) {
    if (stats.participant_id != bundle.participant_id()) {
        throw Error(ErrorKind::SessionMismatch,
                    "stats for '" + stats.participant_id + "' applied to '" + bundle.participant_id() + "'");
    }
    NormalizedSession out{bundle, {}, {}};
    std::array<double, 7> divisor{};
    for (Channel c : kAllChannels) {
        const auto idx = static_cast<std::size_t>(c);
        divisor[idx] = std::max(stats.sigma[idx], kSigmaFloor);
        if (c == Channel::Hr && !stats.hr_available) {
            out.log.push_back("hr: no valid baseline samples, heart rate marked missing");
            continue;
        }
        if (stats.sigma[idx] < kSigmaFloor) {
            out.degenerate_channels.push_back(c);
            out.log.push_back("DegenerateChannel(" + std::string(column_name(c)) + ")");
        }
    }
    std::vector<Sample> samples = bundle.recording().samples;
    for (auto& s : samples) {
        for (std::size_t c = 0; c < kMotionChannels; ++c) {
            s.motion[c] = (s.motion[c] - stats.mu[c]) / divisor[c];
        }
        if (s.hr) {
            if (stats.hr_available) {
                s.hr = (*s.hr - stats.mu[6]) / divisor[6];
            } else {
                s.hr.reset();
            }
        }
    }
    out.bundle = bundle.with_samples(std::move(samples));
    return out;
}

RrSeries derive_rr_intervals(std::span<const Sample> samples, TimeSpan window) {
    RrSeries rr;
    rr.source_window = window;
    for (const auto& s : samples) {
        if (s.hr && *s.hr > 0.0) {
            rr.intervals.push_back(60000.0 / *s.hr);
        }
    }
    if (rr.intervals.size() < 2) {
        throw Error(ErrorKind::InsufficientHrData,
                    std::to_string(rr.intervals.size()) + " valid hr samples in [" +
                        std::to_string(window.start) + ", " + std::to_string(window.end) + ")");
    }
    return rr;
}

double hr_validity_score(std::span<const Sample> samples, TimeSpan window, double nominal_rate_hz) {
    if (window.duration() <= 0) {
        throw Error(ErrorKind::EmptySpan, "[" + std::to_string(window.start) + ", " + std::to_string(window.end) + ")");
    }
    const double expected = static_cast<double>(window.duration()) / 1000.0 * nominal_rate_hz;
    const auto present = std::count_if(samples.begin(), samples.end(), [](const Sample& s) { return s.hr.has_value(); });
    return std::clamp(static_cast<double>(present) / expected, 0.0, 1.0);
}

PreparedSession prepare_session(const SessionBundle& bundle) {
    BaselineStats stats = compute_baseline_stats(bundle);
    NormalizedSession normalized = normalize_session(bundle, stats);
    return PreparedSession{bundle, std::move(normalized.bundle), std::move(stats),
                           std::move(normalized.degenerate_channels)};
}

std::vector<PreparedSession> prepare_sessions(const std::vector<SessionBundle>& bundles) {
    std::vector<PreparedSession> out;
    out.reserve(bundles.size());
    for (const auto& b : bundles) {
        out.push_back(prepare_session(b));
    }
    return out;
}

} // namespace bfrb
