#include "bfrb/ingest.hpp"

#include "bfrb/csv.hpp"
#include "bfrb/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <tuple>

namespace bfrb {

namespace {

constexpr std::array<std::string_view, 8> kBehaviorNames = {
    "skin-picking", "face-touching", "fidgeting", "skin-biting",
    "hand-scratching", "nail-biting", "leg-scratching", "hair-pulling"};

constexpr std::array<std::string_view, 6> kStageNames = {
    "baseline1", "task1_prep", "task1_present", "baseline2", "task2", "baseline3"};

std::string canonical_token(std::string_view name) {
    std::string s = csv::lower(csv::trim(name));
    std::replace(s.begin(), s.end(), '_', '-');
    std::replace(s.begin(), s.end(), ' ', '-');
    return s;
}

std::string row_ref(const csv::Table& table, std::size_t row) {
    return "line " + std::to_string(table.line[row]);
}

const std::string& cell(const csv::Table& table, std::size_t row, int col) {
    static const std::string empty;
    const auto& r = table.rows[row];
    if (col < 0 || static_cast<std::size_t>(col) >= r.size()) {
        return empty;
    }
    return r[static_cast<std::size_t>(col)];
}

int require_column(const csv::Table& table, const AdapterConfig& adapter,
                   std::string_view canonical) {
    const int col = table.column(adapter.source_column(canonical));
    if (col < 0) {
        throw Error(ErrorKind::MissingChannel, std::string(canonical));
    }
    return col;
}

} // namespace

std::string_view column_name(Channel c) {
    static constexpr std::array<std::string_view, 7> names = {
        "accX", "accY", "accZ", "gyrX", "gyrY", "gyrZ", "hr"};
    return names[static_cast<std::size_t>(c)];
}

std::string_view feature_prefix(Channel c) {
    return c == Channel::Hr ? std::string_view("HR") : column_name(c);
}

std::optional<double> Sample::value(Channel c) const {
    if (c == Channel::Hr) {
        return hr;
    }
    return motion[static_cast<std::size_t>(c)];
}

Millis Recording::sample_period_ms() const {
    return std::max<Millis>(1, std::llround(1000.0 / nominal_rate_hz));
}

TimeSpan Recording::span() const {
    if (samples.empty()) {
        return {};
    }
    return {samples.front().t, samples.back().t + sample_period_ms()};
}

std::span<const Sample> Recording::slice(const TimeSpan& window) const {
    auto lo = std::lower_bound(samples.begin(), samples.end(), window.start,
                               [](const Sample& s, Millis t) { return s.t < t; });
    auto hi = std::lower_bound(lo, samples.end(), window.end,
                               [](const Sample& s, Millis t) { return s.t < t; });
    return {lo, hi};
}

std::string_view to_string(Stage s) {
    return kStageNames[static_cast<std::size_t>(s)];
}

std::optional<Stage> parse_stage(std::string_view name) {
    for (std::size_t i = 0; i < kStageNames.size(); ++i) {
        if (kStageNames[i] == name) {
            return kAllStages[i];
        }
    }
    return std::nullopt;
}

std::string_view to_string(Behavior b) {
    return kBehaviorNames[static_cast<std::size_t>(b)];
}

std::optional<Behavior> parse_behavior(std::string_view name) {
    const std::string token = canonical_token(name);
    for (std::size_t i = 0; i < kBehaviorNames.size(); ++i) {
        if (kBehaviorNames[i] == token) {
            return kAllBehaviors[i];
        }
    }
    return std::nullopt;
}

std::string_view to_string(Hand h) {
    switch (h) {
    case Hand::WatchHand: return "watch";
    case Hand::OtherHand: return "other";
    case Hand::Both: return "both";
    case Hand::Unknown: return "unknown";
    }
    return "unknown";
}

std::optional<Hand> parse_hand(std::string_view name) {
    const std::string token = canonical_token(name);
    if (token == "watch" || token == "watch-hand") return Hand::WatchHand;
    if (token == "other" || token == "other-hand") return Hand::OtherHand;
    if (token == "both") return Hand::Both;
    if (token.empty() || token == "unknown") return Hand::Unknown;
    return std::nullopt;
}

std::string AdapterConfig::source_column(std::string_view canonical) const {
    auto it = columns.find(std::string(canonical));
    return it == columns.end() ? std::string(canonical) : it->second;
}

double AdapterConfig::scale(std::string_view canonical) const {
    auto it = unit_scale.find(std::string(canonical));
    return it == unit_scale.end() ? 1.0 : it->second;
}

AdapterConfig parse_adapter(std::string_view json_text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidConfig, std::string("adapter: ") + e.what());
    }
    if (!doc.is_object()) {
        throw Error(ErrorKind::InvalidConfig, "adapter: top level must be an object");
    }
    AdapterConfig adapter;
    auto string_map = [](const json& j, const std::string& key, bool lower_keys) {
        if (!j.is_object()) {
            throw Error(ErrorKind::InvalidConfig, "adapter: '" + key + "' must be an object");
        }
        std::map<std::string, std::string> out;
        for (const auto& [k, v] : j.items()) {
            if (!v.is_string()) {
                throw Error(ErrorKind::InvalidConfig, "adapter: '" + key + "." + k + "' must be a string");
            }
            out[lower_keys ? csv::lower(k) : k] = v.get<std::string>();
        }
        return out;
    };
    for (const auto& [key, value] : doc.items()) {
        if (key == "columns") {
            adapter.columns = string_map(value, key, false);
        } else if (key == "behavior_aliases") {
            adapter.behavior_aliases = string_map(value, key, true);
        } else if (key == "stage_aliases") {
            adapter.stage_aliases = string_map(value, key, true);
        } else if (key == "unit_scale") {
            if (!value.is_object()) {
                throw Error(ErrorKind::InvalidConfig, "adapter: 'unit_scale' must be an object");
            }
            for (const auto& [k, v] : value.items()) {
                if (!v.is_number()) {
                    throw Error(ErrorKind::InvalidConfig, "adapter: 'unit_scale." + k + "' must be a number");
                }
                adapter.unit_scale[k] = v.get<double>();
            }
        } else if (key == "files") {
            for (const auto& [k, v] : string_map(value, key, false)) {
                if (k == "recording") adapter.recording_file = v;
                else if (k == "labels") adapter.labels_file = v;
                else if (k == "stages") adapter.stages_file = v;
                else throw Error(ErrorKind::InvalidConfig, "adapter: unknown key 'files." + k + "'");
            }
        } else if (key == "nominal_rate_hz") {
            if (!value.is_number() || value.get<double>() <= 0.0) {
                throw Error(ErrorKind::InvalidConfig, "adapter: 'nominal_rate_hz' must be positive");
            }
            adapter.nominal_rate_hz = value.get<double>();
        } else {
            throw Error(ErrorKind::InvalidConfig, "adapter: unknown key '" + key + "'");
        }
    }
    return adapter;
}

AdapterConfig load_adapter(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::FileNotFound, path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_adapter(buffer.str());
}

void validate_recording(const Recording& recording) {
    if (recording.samples.empty()) {
        throw Error(ErrorKind::EmptyRecording, recording.participant_id);
    }
    for (std::size_t i = 1; i < recording.samples.size(); ++i) {
        if (recording.samples[i].t <= recording.samples[i - 1].t) {
            throw Error(ErrorKind::NonMonotoneTimestamps,
                        "sample index " + std::to_string(i) + " (t=" +
                            std::to_string(recording.samples[i].t) + " ms)");
        }
    }
}

Recording load_recording(const std::filesystem::path& path, const AdapterConfig& adapter,
                         std::string participant_id) {
    const csv::Table table = csv::read(path);
    const int ts_col = require_column(table, adapter, "timestamp_ms");
    std::array<int, 7> cols{};
    for (Channel c : kAllChannels) {
        cols[static_cast<std::size_t>(c)] = require_column(table, adapter, column_name(c));
    }
    const double ts_scale = adapter.scale("timestamp_ms");

    Recording rec;
    rec.participant_id = participant_id.empty()
                             ? path.parent_path().filename().string()
                             : std::move(participant_id);
    rec.nominal_rate_hz = adapter.nominal_rate_hz;
    rec.samples.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        Sample s;
        const std::string where = row_ref(table, r);
        const double t = csv::to_double(cell(table, r, ts_col), "timestamp_ms at " + where);
        if (!std::isfinite(t)) {
            throw Error(ErrorKind::ParseError, "non-finite timestamp at " + where);
        }
        s.t = std::llround(t * ts_scale);
        for (std::size_t c = 0; c < kMotionChannels; ++c) {
            const auto name = column_name(kAllChannels[c]);
            const double v = csv::to_double(cell(table, r, cols[c]), std::string(name) + " at " + where);
            if (!std::isfinite(v)) {
                throw Error(ErrorKind::ParseError, "non-finite " + std::string(name) + " at " + where);
            }
            s.motion[c] = v * adapter.scale(name);
        }
        const std::string& hr_cell = cell(table, r, cols[6]);
        if (!csv::trim(hr_cell).empty()) {
            const double bpm = csv::to_double(hr_cell, "hr at " + where);
            if (std::isfinite(bpm) && bpm > 0.0) {
                s.hr = bpm * adapter.scale("hr");
            }
        }
        rec.samples.push_back(s);
    }
    validate_recording(rec);
    return rec;
}

void sort_events(std::vector<BehaviorEvent>& events) {
    std::sort(events.begin(), events.end(), [](const BehaviorEvent& a, const BehaviorEvent& b) {
        return std::tuple(a.start, a.end, a.behavior, a.hand) <
               std::tuple(b.start, b.end, b.behavior, b.hand);
    });
}

std::vector<BehaviorEvent> load_labels(const std::filesystem::path& path,
                                       const AdapterConfig& adapter) {
    const csv::Table table = csv::read(path);
    const int start_col = require_column(table, adapter, "start_ms");
    const int end_col = require_column(table, adapter, "end_ms");
    const int behavior_col = require_column(table, adapter, "behavior");
    const int hand_col = table.column(adapter.source_column("hand"));
    const double scale = adapter.scale("start_ms");

    std::vector<BehaviorEvent> events;
    events.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::string where = row_ref(table, r);
        BehaviorEvent e;
        e.start = std::llround(csv::to_double(cell(table, r, start_col), "start_ms at " + where) * scale);
        e.end = std::llround(csv::to_double(cell(table, r, end_col), "end_ms at " + where) * adapter.scale("end_ms"));
        if (e.end < e.start) {
            throw Error(ErrorKind::NegativeDuration, where);
        }
        std::string name = csv::lower(csv::trim(cell(table, r, behavior_col)));
        if (auto alias = adapter.behavior_aliases.find(name); alias != adapter.behavior_aliases.end()) {
            name = alias->second;
        }
        const auto behavior = parse_behavior(name);
        if (!behavior) {
            throw Error(ErrorKind::UnknownBehavior, "'" + name + "' at " + where);
        }
        e.behavior = *behavior;
        const auto hand = parse_hand(cell(table, r, hand_col));
        if (!hand) {
            throw Error(ErrorKind::UnknownHand, "'" + cell(table, r, hand_col) + "' at " + where);
        }
        e.hand = *hand;
        events.push_back(e);
    }
    sort_events(events);
    return events;
}

void validate_stages(std::vector<StageMark>& stages) {
    std::sort(stages.begin(), stages.end(),
              [](const StageMark& a, const StageMark& b) { return a.start < b.start; });
    bool baseline = false;
    for (std::size_t i = 0; i < stages.size(); ++i) {
        if (stages[i].start >= stages[i].end) {
            throw Error(ErrorKind::NegativeDuration, "stage " + std::string(to_string(stages[i].stage)));
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (stages[j].stage == stages[i].stage) {
                throw Error(ErrorKind::DuplicateStage, std::string(to_string(stages[i].stage)));
            }
        }
        if (i > 0 && stages[i].start < stages[i - 1].end) {
            throw Error(ErrorKind::OverlappingStages, std::string(to_string(stages[i - 1].stage)) +
                                                          " / " + std::string(to_string(stages[i].stage)));
        }
        baseline = baseline || stages[i].stage == Stage::BaselineI;
    }
    if (!baseline) {
        throw Error(ErrorKind::MissingBaselineI, "no baseline1 stage mark");
    }
}

std::vector<StageMark> load_stages(const std::filesystem::path& path, const AdapterConfig& adapter) {
    const csv::Table table = csv::read(path);
    const int stage_col = require_column(table, adapter, "stage");
    const int start_col = require_column(table, adapter, "start_ms");
    const int end_col = require_column(table, adapter, "end_ms");
    const double scale = adapter.scale("start_ms");

    std::vector<StageMark> stages;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::string where = row_ref(table, r);
        std::string name = csv::trim(cell(table, r, stage_col));
        if (auto alias = adapter.stage_aliases.find(csv::lower(name)); alias != adapter.stage_aliases.end()) {
            name = alias->second;
        }
        const auto stage = parse_stage(name);
        if (!stage) {
            throw Error(ErrorKind::UnknownStage, "'" + name + "' at " + where);
        }
        StageMark mark;
        mark.stage = *stage;
        mark.start = std::llround(csv::to_double(cell(table, r, start_col), "start_ms at " + where) * scale);
        mark.end = std::llround(csv::to_double(cell(table, r, end_col), "end_ms at " + where) * adapter.scale("end_ms"));
        stages.push_back(mark);
    }
    validate_stages(stages);
    return stages;
}

std::optional<StageMark> SessionBundle::stage(Stage s) const {
    for (const auto& mark : stages_) {
        if (mark.stage == s) {
            return mark;
        }
    }
    return std::nullopt;
}

SessionBundle SessionBundle::with_samples(std::vector<Sample> samples) const {
    if (samples.size() != recording_.samples.size()) {
        throw Error(ErrorKind::SessionMismatch, "sample count changed");
    }
    SessionBundle copy = *this;
    copy.recording_.samples = std::move(samples);
    return copy;
}

SessionBundle assemble_session(Recording recording, std::vector<StageMark> stages,
                               std::vector<BehaviorEvent> events) {
    validate_recording(recording);
    validate_stages(stages);
    sort_events(events);
    const TimeSpan span = recording.span();
    for (const auto& mark : stages) {
        if (mark.start < span.start || mark.end > span.end) {
            throw Error(ErrorKind::StageOutOfRange,
                        std::string(to_string(mark.stage)) + " [" + std::to_string(mark.start) + ", " +
                            std::to_string(mark.end) + ") outside recording");
        }
    }
    for (const auto& e : events) {
        if (e.end < e.start) {
            throw Error(ErrorKind::NegativeDuration, std::string(to_string(e.behavior)));
        }
        if (e.start < span.start || e.end > span.end) {
            throw Error(ErrorKind::EventOutOfRange,
                        std::string(to_string(e.behavior)) + " [" + std::to_string(e.start) + ", " +
                            std::to_string(e.end) + "] outside recording");
        }
    }
    SessionBundle bundle;
    bundle.recording_ = std::move(recording);
    bundle.stages_ = std::move(stages);
    bundle.events_ = std::move(events);
    return bundle;
}

std::vector<SessionBundle> load_dataset(const std::filesystem::path& root, const AdapterConfig& adapter) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) {
        throw Error(ErrorKind::FileNotFound, root.string());
    }
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory() && fs::exists(entry.path() / adapter.recording_file)) {
            dirs.push_back(entry.path());
        }
    }
    if (dirs.empty()) {
        throw Error(ErrorKind::EmptyDataset, "no participant directories under " + root.string());
    }
    std::sort(dirs.begin(), dirs.end());
    std::vector<SessionBundle> sessions;
    sessions.reserve(dirs.size());
    for (const auto& dir : dirs) {
        Recording rec = load_recording(dir / adapter.recording_file, adapter, dir.filename().string());
        std::vector<BehaviorEvent> events;
        if (fs::exists(dir / adapter.labels_file)) {
            events = load_labels(dir / adapter.labels_file, adapter);
        }
        auto stages = load_stages(dir / adapter.stages_file, adapter);
        sessions.push_back(assemble_session(std::move(rec), std::move(stages), std::move(events)));
    }
    return sessions;
}

void write_recording_csv(const Recording& recording, std::ostream& out) {
    out << "timestamp_ms,accX,accY,accZ,gyrX,gyrY,gyrZ,hr\n";
    for (const auto& s : recording.samples) {
        out << s.t;
        for (double v : s.motion) {
            out << ',' << csv::fixed6(v);
        }
        out << ',';
        if (s.hr) {
            out << csv::fixed6(*s.hr);
        }
        out << '\n';
    }
}

void write_labels_csv(const std::vector<BehaviorEvent>& events, std::ostream& out) {
    out << "start_ms,end_ms,behavior,hand\n";
    for (const auto& e : events) {
        out << e.start << ',' << e.end << ',' << to_string(e.behavior) << ',' << to_string(e.hand) << '\n';
    }
}

void write_stages_csv(const std::vector<StageMark>& stages, std::ostream& out) {
    out << "stage,start_ms,end_ms\n";
    for (const auto& s : stages) {
        out << to_string(s.stage) << ',' << s.start << ',' << s.end << '\n';
    }
}

void write_session(const SessionBundle& session, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) {
            throw Error(ErrorKind::Io, (dir / name).string());
        }
        return out;
    };
    {
        auto out = open("recording.csv");
        write_recording_csv(session.recording(), out);
    }
    {
        auto out = open("labels.csv");
        write_labels_csv(session.events(), out);
    }
    auto out = open("stages.csv");
    write_stages_csv(session.stages(), out);
}

} // namespace bfrb
