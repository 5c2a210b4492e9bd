#include "synthetic.hpp"

#include "bfrb/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace bfrb::testing {

namespace {

constexpr std::array<Behavior, 5> kSyntheticBehaviors = {Behavior::SkinPicking, Behavior::FaceTouching,
                                                         Behavior::SkinPicking, Behavior::Fidgeting,
                                                         Behavior::NailBiting};

std::vector<StageMark> six_stages(Millis end, Millis baseline_ms) {
    std::vector<StageMark> stages;
    const Millis rest = end - baseline_ms;
    Millis t = baseline_ms;
    stages.push_back({Stage::BaselineI, 0, baseline_ms});
    for (std::size_t i = 1; i < kAllStages.size(); ++i) {
        const Millis next = i + 1 == kAllStages.size() ? end : baseline_ms + rest * static_cast<Millis>(i) / 5;
        stages.push_back({kAllStages[i], t, next});
        t = next;
    }
    return stages;
}

} // namespace

SessionBundle make_session(const SyntheticOptions& o) {
    Rng rng(o.seed);
    const Millis period = std::llround(1000.0 / o.rate_hz);
    const auto n = static_cast<std::size_t>(o.duration_s * o.rate_hz);
    const Millis end = static_cast<Millis>(n) * period;
    const Millis baseline_ms = std::llround(o.baseline_s * 1000.0);

    std::vector<BehaviorEvent> events;
    const Millis gap = std::llround(o.min_gap_s * 1000.0);
    for (int attempt = 0; attempt < o.events * 50 && static_cast<int>(events.size()) < o.events; ++attempt) {
        const Millis start = baseline_ms + static_cast<Millis>(rng.index(static_cast<std::uint64_t>(end - baseline_ms - 10000)));
        const Millis length = 1000 + static_cast<Millis>(rng.index(7000));
        const bool clash = std::any_of(events.begin(), events.end(), [&](const BehaviorEvent& e) {
            return start < e.end + gap && e.start < start + length + gap;
        });
        if (clash) continue;
        BehaviorEvent e;
        e.start = start;
        e.end = start + length;
        e.behavior = kSyntheticBehaviors[rng.index(kSyntheticBehaviors.size())];
        e.hand = static_cast<Hand>(rng.index(4));
        events.push_back(e);
    }
    std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.start < b.start; });

    Recording rec;
    rec.participant_id = o.participant_id;
    rec.nominal_rate_hz = o.rate_hz;
    rec.samples.resize(n);
    std::size_t next_event = 0;
    for (std::size_t i = 0; i < n; ++i) {
        Sample& s = rec.samples[i];
        s.t = static_cast<Millis>(i) * period;
        while (next_event < events.size() && events[next_event].end <= s.t) ++next_event;
        // Closeness to the upcoming onset within the last minute, in [0, 1].
        double lead = 0.0;
        bool during = false;
        if (next_event < events.size()) {
            const auto& e = events[next_event];
            during = s.t >= e.start;
            const Millis until = e.start - s.t;
            if (!during && until < 60000) lead = 1.0 - static_cast<double>(until) / 60000.0;
        }
        const double drift = o.pre_event_pattern ? lead : 0.0;
        const double phase = static_cast<double>(s.t) / 1000.0;
        s.motion[0] = rng.normal(0.0, 0.3) + 1.5 * drift + (during ? 2.0 : 0.0);
        s.motion[1] = rng.normal(0.0, 0.3) + 0.5 * std::sin(phase * 0.7) * drift;
        s.motion[2] = 9.81 + rng.normal(0.0, 0.3) - 0.8 * drift;
        s.motion[3] = rng.normal(0.0, 0.2) * (1.0 + 2.0 * drift);
        s.motion[4] = rng.normal(0.0, 0.2) + 0.6 * drift;
        s.motion[5] = rng.normal(0.0, 0.2);
        const double bpm = 72.0 + 3.0 * std::sin(phase / 30.0) + rng.normal(0.0, 1.5) + 12.0 * drift;
        if (rng.uniform() >= o.hr_missing) s.hr = bpm;
    }
    return assemble_session(std::move(rec), six_stages(end, baseline_ms), std::move(events));
}

std::vector<SessionBundle> write_dataset(const std::filesystem::path& root, int count, const SyntheticOptions& base) {
    std::vector<SessionBundle> out;
    for (int p = 0; p < count; ++p) {
        SyntheticOptions o = base;
        char id[16];
        std::snprintf(id, sizeof id, "P%02d", p + 1);
        o.participant_id = id;
        o.seed = base.seed * 1000 + static_cast<std::uint64_t>(p);
        out.push_back(make_session(o));
        write_session(out.back(), root / id);
    }
    return out;
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("bfrb-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace bfrb::testing
