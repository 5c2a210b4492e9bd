#pragma once

#include "bfrb/ingest.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace bfrb {

/// Anticipatory window sizes: A seconds of input before the onset and
/// B seconds of label span from it (written "Ax/By").
class WindowSpec {
public:
    /// Throws InvalidWindowSpec unless x is one of 60/120/180/240/300 and y >= 1.
    WindowSpec(int x_seconds, int y_seconds);

    /// Parses "300x/1y".
    static WindowSpec parse(std::string_view text);

    int x_seconds() const { return x_; }
    int y_seconds() const { return y_; }
    Millis x_ms() const { return Millis{x_} * 1000; }
    Millis y_ms() const { return Millis{y_} * 1000; }
    std::string to_string() const;
    bool operator==(const WindowSpec&) const = default;

private:
    int x_;
    int y_;
};

class LabelSet {
public:
    enum class Kind { AllCompulsive, FaceTouching, SkinPicking, Custom };

    static LabelSet all_compulsive() { return LabelSet(Kind::AllCompulsive, {}); }
    static LabelSet face_touching() { return LabelSet(Kind::FaceTouching, {}); }
    static LabelSet skin_picking() { return LabelSet(Kind::SkinPicking, {}); }
    /// Throws InvalidLabelSet on an empty set.
    static LabelSet custom(std::set<Behavior> behaviors);
    /// "all-compulsive", "face-touching", "skin-picking" or "custom:a,b".
    static LabelSet parse(std::string_view text);

    Kind kind() const { return kind_; }
    bool includes(Behavior b) const;
    std::string to_string() const;

private:
    LabelSet(Kind kind, std::set<Behavior> custom) : kind_(kind), custom_(std::move(custom)) {}
    Kind kind_;
    std::set<Behavior> custom_;
};

struct WindowInstance {
    std::string participant_id;
    TimeSpan x_span;
    TimeSpan y_span;
    bool positive = false;
    std::optional<Behavior> behavior;
    /// No behavior event of any type overlaps x_span.
    bool clean = true;
    double hr_validity = 0.0;

    Millis anchor() const { return y_span.start; }
};

struct PositiveWindows {
    std::vector<WindowInstance> windows;
    /// Included-type events dropped by the boundary rule.
    std::size_t skipped = 0;
};

PositiveWindows positive_windows(const SessionBundle& bundle, const WindowSpec& spec, const LabelSet& labels);

/// Anchors on the 1 s grid from the recording start whose window fits the
/// recording and whose y-span is free of every behavior event.
std::vector<Millis> eligible_negative_anchors(const SessionBundle& bundle, const WindowSpec& spec);

WindowInstance make_window(const SessionBundle& bundle, const WindowSpec& spec, Millis anchor,
                           std::optional<Behavior> behavior);

/// Exactly `count` negatives drawn without replacement from the eligible grid,
/// returned in anchor order. Throws InsufficientNegativeSpace.
std::vector<WindowInstance> negative_windows(const SessionBundle& bundle, const WindowSpec& spec,
                                             std::size_t count, std::uint64_t seed);

enum class BalanceMode { PerSession, Aggregate };

struct DatasetOptions {
    bool clean_only = false;
    BalanceMode balance = BalanceMode::PerSession;
};

struct WindowDataset {
    WindowSpec spec{60, 1};
    std::vector<WindowInstance> windows;
    /// participant -> skipped positive count
    std::vector<std::pair<std::string, std::size_t>> skipped;
};

std::uint64_t session_seed(std::uint64_t seed, std::string_view participant_id);

WindowDataset build_dataset(const std::vector<SessionBundle>& bundles, const WindowSpec& spec,
                            const LabelSet& labels, std::uint64_t seed, const DatasetOptions& options = {});
WindowDataset build_dataset(const std::vector<const SessionBundle*>& bundles, const WindowSpec& spec,
                            const LabelSet& labels, std::uint64_t seed, const DatasetOptions& options = {});

/// `participant,anchor_ms,label,behavior,clean,hr_validity`
void write_window_csv(const WindowDataset& dataset, std::ostream& out);

} // namespace bfrb
