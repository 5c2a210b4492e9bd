#pragma once

#include "bfrb/ingest.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace bfrb {

inline constexpr double kSigmaFloor = 1e-8;

/// Per-channel mean and population standard deviation over Baseline I.
struct BaselineStats {
    std::string participant_id;
    std::array<double, 7> mu{};
    std::array<double, 7> sigma{};
    /// False when Baseline I holds no valid heart-rate sample.
    bool hr_available = true;

    double mean(Channel c) const { return mu[static_cast<std::size_t>(c)]; }
    double stddev(Channel c) const { return sigma[static_cast<std::size_t>(c)]; }
};

BaselineStats compute_baseline_stats(const SessionBundle& bundle);

struct NormalizedSession {
    SessionBundle bundle;
    /// Channels whose baseline sigma fell under the floor.
    std::vector<Channel> degenerate_channels;
    std::vector<std::string> log;
};

/// z-scores every channel against `stats`: (x - mu) / max(sigma, 1e-8).
/// Missing heart rate stays missing. Throws SessionMismatch if `stats`
/// belongs to another participant.
NormalizedSession normalize_session(const SessionBundle& bundle, const BaselineStats& stats);

/// Interbeat intervals in milliseconds.
struct RrSeries {
    std::vector<double> intervals;
    TimeSpan source_window;
};

/// Pseudo-RR = 60000 / BPM for each non-missing sample. Needs two or more.
RrSeries derive_rr_intervals(std::span<const Sample> samples, TimeSpan window);

/// Present hr samples over the expected count (duration * rate), clamped to [0, 1].
double hr_validity_score(std::span<const Sample> samples, TimeSpan window, double nominal_rate_hz);

/// A session carried through the pipeline in both raw and normalized form.
/// Raw heart rate feeds the RR reconstruction; everything else uses the
/// normalized copy.
struct PreparedSession {
    SessionBundle raw;
    SessionBundle normalized;
    BaselineStats stats;
    std::vector<Channel> degenerate_channels;

    const std::string& participant_id() const { return raw.participant_id(); }
};

PreparedSession prepare_session(const SessionBundle& bundle);
std::vector<PreparedSession> prepare_sessions(const std::vector<SessionBundle>& bundles);

} // namespace bfrb
