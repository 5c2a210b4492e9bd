#include "bfrb/error.hpp"
#include "bfrb/windowing.hpp"
#include "support/synthetic.hpp"

#include <doctest.h>

using namespace bfrb;

namespace {

SessionBundle plain_session(double seconds, std::vector<BehaviorEvent> events) {
    Recording rec;
    rec.participant_id = "P01";
    const auto n = static_cast<std::size_t>(seconds * 10);
    for (std::size_t i = 0; i < n; ++i) {
        Sample s;
        s.t = static_cast<Millis>(i) * 100;
        s.hr = 70.0;
        rec.samples.push_back(s);
    }
    return assemble_session(std::move(rec), {{Stage::BaselineI, 0, 60000}}, std::move(events));
}

BehaviorEvent ev(Millis start, Millis end, Behavior b = Behavior::SkinPicking) {
    return {start, end, b, Hand::WatchHand};
}

} // namespace

TEST_CASE("window spec parsing and validation") {
    const auto spec = WindowSpec::parse("300x/1y");
    CHECK(spec.x_seconds() == 300);
    CHECK(spec.y_seconds() == 1);
    CHECK(spec.to_string() == "300x/1y");
    CHECK_THROWS_AS(WindowSpec(600, 1), Error);
    CHECK_THROWS_AS(WindowSpec(60, 0), Error);
    CHECK_THROWS_AS(WindowSpec::parse("60x1y"), Error);
}

TEST_CASE("label sets") {
    CHECK(LabelSet::all_compulsive().includes(Behavior::Fidgeting));
    CHECK(LabelSet::face_touching().includes(Behavior::FaceTouching));
    CHECK_FALSE(LabelSet::face_touching().includes(Behavior::SkinPicking));
    const auto custom = LabelSet::parse("custom:nail-biting,skin-biting");
    CHECK(custom.includes(Behavior::NailBiting));
    CHECK_FALSE(custom.includes(Behavior::SkinPicking));
    CHECK_THROWS_AS(LabelSet::custom({}), Error);
}

TEST_CASE("clean, dirty and skipped positives") {
    const WindowSpec spec(60, 1);
    {
        const auto s = plain_session(600, {ev(290000, 300000), ev(400000, 403000)});
        const auto pos = positive_windows(s, spec, LabelSet::all_compulsive());
        const auto it = std::find_if(pos.windows.begin(), pos.windows.end(),
                                     [](const WindowInstance& w) { return w.anchor() == 400000; });
        REQUIRE(it != pos.windows.end());
        CHECK(it->clean);
        CHECK(it->x_span == TimeSpan{340000, 400000});
        CHECK(it->y_span == TimeSpan{400000, 401000});
    }
    {
        const auto s = plain_session(600, {ev(380000, 382000, Behavior::Fidgeting), ev(400000, 403000)});
        const auto pos = positive_windows(s, spec, LabelSet::skin_picking());
        REQUIRE(pos.windows.size() == 1);
        CHECK_FALSE(pos.windows[0].clean);
    }
    {
        const auto s = plain_session(600, {ev(30000, 31000)});
        const auto pos = positive_windows(s, spec, LabelSet::all_compulsive());
        CHECK(pos.windows.empty());
        CHECK(pos.skipped == 1);
    }
}

TEST_CASE("negative windows") {
    const WindowSpec spec(60, 1);
    const auto s = plain_session(600, {ev(200000, 210000), ev(400000, 401000)});
    CHECK(negative_windows(s, spec, 0, 1).empty());
    const auto neg = negative_windows(s, spec, 5, 1);
    REQUIRE(neg.size() == 5);
    for (const auto& w : neg) {
        CHECK_FALSE(w.positive);
        CHECK(w.x_span.start >= 0);
        for (const auto& e : s.events()) CHECK_FALSE(w.y_span.overlaps(e.span()));
    }
    CHECK(std::is_sorted(neg.begin(), neg.end(),
                         [](const auto& a, const auto& b) { return a.anchor() < b.anchor(); }));
}

TEST_CASE("saturated session raises InsufficientNegativeSpace") {
    // 71 s recording: anchors 60 s..70 s fit, 11 in total.
    const auto s = plain_session(71, {});
    const WindowSpec spec(60, 1);
    CHECK(eligible_negative_anchors(s, spec).size() == 11);
    try {
        negative_windows(s, spec, 50, 0);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InsufficientNegativeSpace);
    }
}

TEST_CASE("single session with three eligible events yields six windows") {
    const auto s = plain_session(900, {ev(200000, 201000), ev(400000, 402000), ev(600000, 605000)});
    const auto ds = build_dataset(std::vector<SessionBundle>{s}, WindowSpec(60, 1), LabelSet::all_compulsive(), 9);
    CHECK(ds.windows.size() == 6);
    const auto again = build_dataset(std::vector<SessionBundle>{s}, WindowSpec(60, 1), LabelSet::all_compulsive(), 9);
    REQUIRE(again.windows.size() == ds.windows.size());
    for (std::size_t i = 0; i < ds.windows.size(); ++i) CHECK(ds.windows[i].anchor() == again.windows[i].anchor());
}

TEST_CASE("aggregate balance pools the negative draw") {
    std::vector<SessionBundle> sessions;
    for (int p = 0; p < 3; ++p) {
        bfrb::testing::SyntheticOptions o;
        o.participant_id = "P0" + std::to_string(p + 1);
        o.seed = 40 + p;
        o.events = 3 + 2 * p;
        o.duration_s = 900;
        sessions.push_back(bfrb::testing::make_session(o));
    }
    DatasetOptions opts;
    opts.balance = BalanceMode::Aggregate;
    const auto ds = build_dataset(sessions, WindowSpec(60, 1), LabelSet::all_compulsive(), 5, opts);
    const auto pos = std::count_if(ds.windows.begin(), ds.windows.end(), [](const auto& w) { return w.positive; });
    CHECK(static_cast<std::size_t>(pos) * 2 == ds.windows.size());
}
