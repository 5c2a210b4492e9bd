#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bfrb {

using Millis = std::int64_t;

/// Half-open time interval [start, end) in session-relative milliseconds.
struct TimeSpan {
    Millis start = 0;
    Millis end = 0;

    Millis duration() const { return end - start; }
    bool overlaps(const TimeSpan& other) const { return start < other.end && other.start < end; }
    bool contains(Millis t) const { return t >= start && t < end; }
    bool operator==(const TimeSpan&) const = default;
};

enum class Channel { AccX, AccY, AccZ, GyrX, GyrY, GyrZ, Hr };

inline constexpr std::array<Channel, 7> kAllChannels = {
    Channel::AccX, Channel::AccY, Channel::AccZ, Channel::GyrX,
    Channel::GyrY, Channel::GyrZ, Channel::Hr};
inline constexpr std::size_t kMotionChannels = 6;

/// Canonical CSV column name ("accX", ..., "hr").
std::string_view column_name(Channel c);
/// Feature-name prefix ("accX", ..., "HR").
std::string_view feature_prefix(Channel c);

struct Sample {
    Millis t = 0;
    std::array<double, kMotionChannels> motion{};
    std::optional<double> hr;

    /// Channel value; nullopt only for a missing hr.
    std::optional<double> value(Channel c) const;
};

struct Recording {
    std::string participant_id;
    std::vector<Sample> samples;
    double nominal_rate_hz = 10.0;

    Millis sample_period_ms() const;
    /// [first timestamp, last timestamp + one sample period).
    TimeSpan span() const;
    /// Contiguous run of samples whose timestamps fall inside `window`.
    std::span<const Sample> slice(const TimeSpan& window) const;
};

enum class Stage { BaselineI, Task1Prep, Task1Present, BaselineII, Task2, BaselineIII };

inline constexpr std::array<Stage, 6> kAllStages = {
    Stage::BaselineI, Stage::Task1Prep, Stage::Task1Present,
    Stage::BaselineII, Stage::Task2, Stage::BaselineIII};

std::string_view to_string(Stage s);
std::optional<Stage> parse_stage(std::string_view name);

struct StageMark {
    Stage stage = Stage::BaselineI;
    Millis start = 0;
    Millis end = 0;

    TimeSpan span() const { return {start, end}; }
};

enum class Behavior {
    SkinPicking,
    FaceTouching,
    Fidgeting,
    SkinBiting,
    HandScratching,
    NailBiting,
    LegScratching,
    HairPulling,
};

inline constexpr std::array<Behavior, 8> kAllBehaviors = {
    Behavior::SkinPicking, Behavior::FaceTouching,   Behavior::Fidgeting,
    Behavior::SkinBiting,  Behavior::HandScratching, Behavior::NailBiting,
    Behavior::LegScratching, Behavior::HairPulling};

std::string_view to_string(Behavior b);
/// Case-insensitive; '_' and ' ' are treated as '-'.
std::optional<Behavior> parse_behavior(std::string_view name);

enum class Hand { WatchHand, OtherHand, Both, Unknown };

std::string_view to_string(Hand h);
std::optional<Hand> parse_hand(std::string_view name);

struct BehaviorEvent {
    Millis start = 0;
    Millis end = 0;
    Behavior behavior = Behavior::SkinPicking;
    Hand hand = Hand::Unknown;

    /// Occupied interval used for overlap tests; zero-length events occupy 1 ms.
    TimeSpan span() const { return {start, end > start ? end : start + 1}; }
    bool operator==(const BehaviorEvent&) const = default;
};

/// Maps an arbitrary on-disk layout onto the canonical schemas.
struct AdapterConfig {
    /// canonical column name -> source column name
    std::map<std::string, std::string> columns;
    /// alias (lower-case) -> canonical behavior name
    std::map<std::string, std::string> behavior_aliases;
    /// alias (lower-case) -> canonical stage name
    std::map<std::string, std::string> stage_aliases;
    /// canonical column name -> multiplier applied after parsing
    std::map<std::string, double> unit_scale;
    std::string recording_file = "recording.csv";
    std::string labels_file = "labels.csv";
    std::string stages_file = "stages.csv";
    double nominal_rate_hz = 10.0;

    std::string source_column(std::string_view canonical) const;
    double scale(std::string_view canonical) const;
};

/// Parses `{columns, behavior_aliases, unit_scale, ...}`. Throws InvalidConfig
/// on unknown keys or wrong types, FileNotFound if the file is absent.
AdapterConfig load_adapter(const std::filesystem::path& path);
AdapterConfig parse_adapter(std::string_view json_text);

Recording load_recording(const std::filesystem::path& path, const AdapterConfig& adapter = {},
                         std::string participant_id = {});
std::vector<BehaviorEvent> load_labels(const std::filesystem::path& path,
                                       const AdapterConfig& adapter = {});
std::vector<StageMark> load_stages(const std::filesystem::path& path,
                                   const AdapterConfig& adapter = {});

/// Validation shared by the loaders; exposed for in-memory construction.
void validate_recording(const Recording& recording);
void sort_events(std::vector<BehaviorEvent>& events);
void validate_stages(std::vector<StageMark>& stages);

/// One participant's recording with its stage marks and behavior events.
/// Immutable once assembled.
class SessionBundle {
public:
    const Recording& recording() const { return recording_; }
    const std::vector<StageMark>& stages() const { return stages_; }
    const std::vector<BehaviorEvent>& events() const { return events_; }
    const std::string& participant_id() const { return recording_.participant_id; }

    std::optional<StageMark> stage(Stage s) const;

    /// Copy with replaced samples; timestamps must be unchanged.
    SessionBundle with_samples(std::vector<Sample> samples) const;

private:
    friend SessionBundle assemble_session(Recording, std::vector<StageMark>,
                                          std::vector<BehaviorEvent>);
    Recording recording_;
    std::vector<StageMark> stages_;
    std::vector<BehaviorEvent> events_;
};

SessionBundle assemble_session(Recording recording, std::vector<StageMark> stages,
                               std::vector<BehaviorEvent> events);

/// Loads every participant sub-directory of `root` (sorted by name).
/// Throws EmptyDataset if no sub-directory holds a recording.
std::vector<SessionBundle> load_dataset(const std::filesystem::path& root,
                                        const AdapterConfig& adapter = {});

/// Canonical writers (fixed 6-decimal floats, empty cell for missing hr).
void write_recording_csv(const Recording& recording, std::ostream& out);
void write_labels_csv(const std::vector<BehaviorEvent>& events, std::ostream& out);
void write_stages_csv(const std::vector<StageMark>& stages, std::ostream& out);
void write_session(const SessionBundle& session, const std::filesystem::path& dir);

} // namespace bfrb
