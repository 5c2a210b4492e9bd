#pragma once

#include "bfrb/ingest.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace bfrb::testing {

struct SyntheticOptions {
    std::string participant_id = "P01";
    double duration_s = 1200.0;
    double rate_hz = 10.0;
    int events = 12;
    std::uint64_t seed = 1;
    /// Probability that any single hr sample is missing.
    double hr_missing = 0.0;
    /// Adds a motion and heart-rate drift in the minute before each onset.
    bool pre_event_pattern = true;
    double baseline_s = 120.0;
    double min_gap_s = 30.0;
};

/// A session with six contiguous stages, randomly placed events after
/// Baseline I, and signals that drift ahead of each onset.
SessionBundle make_session(const SyntheticOptions& options);

/// `count` sessions P01..Pnn written under `root`; returns the bundles.
std::vector<SessionBundle> write_dataset(const std::filesystem::path& root, int count, const SyntheticOptions& base);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

} // namespace bfrb::testing
