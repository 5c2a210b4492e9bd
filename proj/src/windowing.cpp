#include "bfrb/windowing.hpp"

#include "bfrb/csv.hpp"
#include "bfrb/error.hpp"
#include "bfrb/preprocess.hpp"
#include "bfrb/random.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>

namespace bfrb {

namespace {

bool any_event_overlaps(const std::vector<BehaviorEvent>& events, const TimeSpan& span) {
    // Events are sorted by start, so stop once they begin past the span.
    for (const auto& e : events) {
        if (e.start >= span.end) {
            break;
        }
        if (e.span().overlaps(span)) {
            return true;
        }
    }
    return false;
}

int parse_int(std::string_view text) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorKind::InvalidWindowSpec, "bad number '" + std::string(text) + "'");
    }
    return value;
}

} // namespace

WindowSpec::WindowSpec(int x_seconds, int y_seconds) : x_(x_seconds), y_(y_seconds) {
    constexpr int supported[] = {60, 120, 180, 240, 300};
    if (std::find(std::begin(supported), std::end(supported), x_) == std::end(supported)) {
        throw Error(ErrorKind::InvalidWindowSpec, "unsupported x-window " + std::to_string(x_) + " s");
    }
    if (y_ < 1) {
        throw Error(ErrorKind::InvalidWindowSpec, "y-window must be >= 1 s");
    }
}

WindowSpec WindowSpec::parse(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos || slash == 0 || text[slash - 1] != 'x' || text.back() != 'y') {
        throw Error(ErrorKind::InvalidWindowSpec, "expected Ax/By, got '" + std::string(text) + "'");
    }
    return WindowSpec(parse_int(text.substr(0, slash - 1)),
                      parse_int(text.substr(slash + 1, text.size() - slash - 2)));
}

std::string WindowSpec::to_string() const {
    return std::to_string(x_) + "x/" + std::to_string(y_) + "y";
}

LabelSet LabelSet::custom(std::set<Behavior> behaviors) {
    if (behaviors.empty()) {
        throw Error(ErrorKind::InvalidLabelSet, "custom label set is empty");
    }
    return LabelSet(Kind::Custom, std::move(behaviors));
}

LabelSet LabelSet::parse(std::string_view text) {
    const std::string t = csv::lower(csv::trim(text));
    if (t == "all-compulsive" || t == "all" || t == "all_compulsive") return all_compulsive();
    if (t == "face-touching" || t == "face_touching" || t == "face") return face_touching();
    if (t == "skin-picking" || t == "skin_picking" || t == "skin") return skin_picking();
    if (t.rfind("custom:", 0) == 0) {
        std::set<Behavior> set;
        std::string_view rest = std::string_view(t).substr(7);
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const auto token = rest.substr(0, comma);
            const auto b = parse_behavior(token);
            if (!b) {
                throw Error(ErrorKind::InvalidLabelSet, "unknown behavior '" + std::string(token) + "'");
            }
            set.insert(*b);
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
        return custom(std::move(set));
    }
    throw Error(ErrorKind::InvalidLabelSet, "unknown label set '" + std::string(text) + "'");
}

bool LabelSet::includes(Behavior b) const {
    switch (kind_) {
    case Kind::AllCompulsive: return true;
    case Kind::FaceTouching: return b == Behavior::FaceTouching;
    case Kind::SkinPicking: return b == Behavior::SkinPicking;
    case Kind::Custom: return custom_.contains(b);
    }
    return false;
}

std::string LabelSet::to_string() const {
    switch (kind_) {
    case Kind::AllCompulsive: return "all-compulsive";
    case Kind::FaceTouching: return "face-touching";
    case Kind::SkinPicking: return "skin-picking";
    case Kind::Custom: break;
    }
    std::string out = "custom:";
    bool first = true;
    for (Behavior b : custom_) {
        if (!first) out += ',';
        out += bfrb::to_string(b);
        first = false;
    }
    return out;
}

WindowInstance make_window(const SessionBundle& bundle, const WindowSpec& spec, Millis anchor,
                           std::optional<Behavior> behavior) {
    WindowInstance w;
    w.participant_id = bundle.participant_id();
    w.x_span = {anchor - spec.x_ms(), anchor};
    w.y_span = {anchor, anchor + spec.y_ms()};
    w.positive = behavior.has_value();
    w.behavior = behavior;
    w.clean = !any_event_overlaps(bundle.events(), w.x_span);
    const auto& rec = bundle.recording();
    w.hr_validity = hr_validity_score(rec.slice(w.x_span), w.x_span, rec.nominal_rate_hz);
    return w;
}

PositiveWindows positive_windows(const SessionBundle& bundle, const WindowSpec& spec, const LabelSet& labels) {
    PositiveWindows out;
    const TimeSpan span = bundle.recording().span();
    for (const auto& e : bundle.events()) {
        if (!labels.includes(e.behavior)) {
            continue;
        }
        const Millis t = e.start;
        if (t - spec.x_ms() < span.start || t + spec.y_ms() > span.end) {
            ++out.skipped;
            continue;
        }
        out.windows.push_back(make_window(bundle, spec, t, e.behavior));
    }
    return out;
}

std::vector<Millis> eligible_negative_anchors(const SessionBundle& bundle, const WindowSpec& spec) {
    std::vector<Millis> anchors;
    const TimeSpan span = bundle.recording().span();
    const auto& events = bundle.events();
    std::size_t first_relevant = 0;
    for (Millis t = span.start + spec.x_ms(); t + spec.y_ms() <= span.end; t += 1000) {
        const TimeSpan y{t, t + spec.y_ms()};
        // Skip events that ended before this y-span; anchors only move forward.
        while (first_relevant < events.size() && events[first_relevant].span().end <= y.start) {
            ++first_relevant;
        }
        bool blocked = false;
        for (std::size_t i = first_relevant; i < events.size(); ++i) {
            if (events[i].start >= y.end) {
                break;
            }
            if (events[i].span().overlaps(y)) {
                blocked = true;
                break;
            }
        }
        if (!blocked) {
            anchors.push_back(t);
        }
    }
    return anchors;
}

std::vector<WindowInstance> negative_windows(const SessionBundle& bundle, const WindowSpec& spec,
                                             std::size_t count, std::uint64_t seed) {
    const auto anchors = eligible_negative_anchors(bundle, spec);
    if (anchors.size() < count) {
        throw Error(ErrorKind::InsufficientNegativeSpace,
                    bundle.participant_id() + ": available " + std::to_string(anchors.size()) +
                        ", requested " + std::to_string(count));
    }
    Rng rng(seed);
    std::vector<Millis> chosen;
    chosen.reserve(count);
    for (std::size_t i : rng.sample_without_replacement(anchors.size(), count)) {
        chosen.push_back(anchors[i]);
    }
    std::sort(chosen.begin(), chosen.end());
    std::vector<WindowInstance> out;
    out.reserve(count);
    for (Millis t : chosen) {
        out.push_back(make_window(bundle, spec, t, std::nullopt));
    }
    return out;
}

std::uint64_t session_seed(std::uint64_t seed, std::string_view participant_id) {
    return seed + stable_hash(participant_id);
}

WindowDataset build_dataset(const std::vector<SessionBundle>& bundles, const WindowSpec& spec,
                            const LabelSet& labels, std::uint64_t seed, const DatasetOptions& options) {
    std::vector<const SessionBundle*> ptrs;
    for (const auto& b : bundles) {
        ptrs.push_back(&b);
    }
    return build_dataset(ptrs, spec, labels, seed, options);
}

WindowDataset build_dataset(const std::vector<const SessionBundle*>& bundles, const WindowSpec& spec,
                            const LabelSet& labels, std::uint64_t seed, const DatasetOptions& options) {
    if (bundles.empty()) {
        throw Error(ErrorKind::EmptyDataset, "no sessions");
    }
    WindowDataset ds;
    ds.spec = spec;
    std::vector<std::vector<WindowInstance>> positives(bundles.size());
    std::size_t total_positives = 0;
    for (std::size_t i = 0; i < bundles.size(); ++i) {
        auto pos = positive_windows(*bundles[i], spec, labels);
        if (options.clean_only) {
            std::erase_if(pos.windows, [](const WindowInstance& w) { return !w.clean; });
        }
        ds.skipped.emplace_back(bundles[i]->participant_id(), pos.skipped);
        total_positives += pos.windows.size();
        positives[i] = std::move(pos.windows);
    }

    if (options.balance == BalanceMode::PerSession) {
        for (std::size_t i = 0; i < bundles.size(); ++i) {
            auto neg = negative_windows(*bundles[i], spec, positives[i].size(),
                                        session_seed(seed, bundles[i]->participant_id()));
            ds.windows.insert(ds.windows.end(), positives[i].begin(), positives[i].end());
            ds.windows.insert(ds.windows.end(), neg.begin(), neg.end());
        }
        return ds;
    }

    // Aggregate: one pool of (session, anchor) pairs across every session.
    std::vector<std::pair<std::size_t, Millis>> pool;
    for (std::size_t i = 0; i < bundles.size(); ++i) {
        for (Millis t : eligible_negative_anchors(*bundles[i], spec)) {
            pool.emplace_back(i, t);
        }
    }
    if (pool.size() < total_positives) {
        throw Error(ErrorKind::InsufficientNegativeSpace,
                    "available " + std::to_string(pool.size()) + ", requested " + std::to_string(total_positives));
    }
    Rng rng(seed);
    auto picks = rng.sample_without_replacement(pool.size(), total_positives);
    std::sort(picks.begin(), picks.end());
    std::vector<std::vector<WindowInstance>> negatives(bundles.size());
    for (std::size_t k : picks) {
        const auto [i, t] = pool[k];
        negatives[i].push_back(make_window(*bundles[i], spec, t, std::nullopt));
    }
    for (std::size_t i = 0; i < bundles.size(); ++i) {
        ds.windows.insert(ds.windows.end(), positives[i].begin(), positives[i].end());
        ds.windows.insert(ds.windows.end(), negatives[i].begin(), negatives[i].end());
    }
    return ds;
}

void write_window_csv(const WindowDataset& dataset, std::ostream& out) {
    out << "participant,anchor_ms,label,behavior,clean,hr_validity\n";
    for (const auto& w : dataset.windows) {
        out << w.participant_id << ',' << w.anchor() << ',' << (w.positive ? 1 : 0) << ','
            << (w.behavior ? std::string(to_string(*w.behavior)) : std::string("none")) << ','
            << (w.clean ? 1 : 0) << ',' << csv::fixed6(w.hr_validity) << '\n';
    }
}

} // namespace bfrb
