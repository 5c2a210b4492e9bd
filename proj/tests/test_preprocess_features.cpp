#include "bfrb/error.hpp"
#include "bfrb/features.hpp"
#include "bfrb/preprocess.hpp"
#include "bfrb/random.hpp"
#include "support/synthetic.hpp"

#include <doctest.h>

#include <cmath>

using namespace bfrb;

namespace {

/// Session whose accX takes `values` over Baseline I (one sample per 100 ms),
/// followed by `tail` more samples of value 0.
SessionBundle session_with_accx(const std::vector<double>& values, int tail = 10, std::optional<double> hr = 60.0) {
    Recording rec;
    rec.participant_id = "P01";
    Millis t = 0;
    for (double v : values) {
        Sample s;
        s.t = t;
        s.motion[0] = v;
        s.motion[1] = static_cast<double>(t);
        s.hr = hr;
        rec.samples.push_back(s);
        t += 100;
    }
    const Millis b1_end = t;
    for (int i = 0; i < tail; ++i) {
        Sample s;
        s.t = t;
        s.hr = hr;
        rec.samples.push_back(s);
        t += 100;
    }
    return assemble_session(std::move(rec), {{Stage::BaselineI, 0, b1_end}}, {});
}

std::vector<Sample> hr_samples(const std::vector<std::optional<double>>& bpm) {
    std::vector<Sample> out;
    for (std::size_t i = 0; i < bpm.size(); ++i) {
        Sample s;
        s.t = static_cast<Millis>(i) * 100;
        s.hr = bpm[i];
        out.push_back(s);
    }
    return out;
}

} // namespace

TEST_CASE("baseline stats examples") {
    const auto stats = compute_baseline_stats(session_with_accx({1, 2, 3}));
    CHECK(stats.mean(Channel::AccX) == doctest::Approx(2.0));
    CHECK(stats.stddev(Channel::AccX) == doctest::Approx(std::sqrt(2.0 / 3.0)));

    const auto constant = compute_baseline_stats(session_with_accx({5, 5, 5, 5}));
    CHECK(constant.mean(Channel::AccX) == 5.0);
    CHECK(constant.stddev(Channel::AccX) == 0.0);
}

TEST_CASE("baseline without hr marks hr unavailable") {
    const auto stats = compute_baseline_stats(session_with_accx({1, 2, 3}, 10, std::nullopt));
    CHECK_FALSE(stats.hr_available);
}

TEST_CASE("normalize identity, unit and epsilon paths") {
    const auto bundle = session_with_accx({1, 2, 3});
    auto stats = compute_baseline_stats(bundle);
    const auto norm = normalize_session(bundle, stats);
    CHECK(norm.bundle.recording().samples[1].motion[0] == doctest::Approx(0.0));

    // x = mu + sigma -> 1
    const double mu = stats.mean(Channel::AccX), sd = stats.stddev(Channel::AccX);
    auto samples = bundle.recording().samples;
    samples[0].motion[0] = mu + sd;
    const auto shifted = normalize_session(bundle.with_samples(samples), stats);
    CHECK(shifted.bundle.recording().samples[0].motion[0] == doctest::Approx(1.0));

    const auto flat = session_with_accx({5, 5, 5});
    auto flat_samples = flat.recording().samples;
    flat_samples[0].motion[0] = 6.0;
    const auto fs = compute_baseline_stats(flat);
    const auto fn = normalize_session(flat.with_samples(flat_samples), fs);
    CHECK(fn.bundle.recording().samples[0].motion[0] == doctest::Approx(1e8));
    CHECK(std::find(fn.degenerate_channels.begin(), fn.degenerate_channels.end(), Channel::AccX) !=
          fn.degenerate_channels.end());
    CHECK_FALSE(fn.log.empty());
}

TEST_CASE("normalize rejects stats from another participant") {
    const auto bundle = session_with_accx({1, 2, 3});
    auto stats = compute_baseline_stats(bundle);
    stats.participant_id = "P02";
    CHECK_THROWS_AS(normalize_session(bundle, stats), Error);
}

TEST_CASE("pseudo RR intervals") {
    const auto one = hr_samples({60.0});
    CHECK_THROWS_AS(derive_rr_intervals(one, {0, 100}), Error);
    const auto two = hr_samples({60.0, 120.0});
    const auto rr = derive_rr_intervals(two, {0, 200});
    REQUIRE(rr.intervals.size() == 2);
    CHECK(rr.intervals[0] == 1000.0);
    CHECK(rr.intervals[1] == 500.0);
    const auto dead = hr_samples({std::nullopt, std::nullopt, std::nullopt});
    CHECK_THROWS_AS(derive_rr_intervals(dead, {0, 300}), Error);
}

TEST_CASE("hr validity score") {
    const auto full = hr_samples({70.0, 70.0, 70.0, 70.0});
    CHECK(hr_validity_score(full, {0, 400}, 10.0) == 1.0);
    const auto half = hr_samples({70.0, std::nullopt, 70.0, std::nullopt});
    CHECK(hr_validity_score(half, {0, 400}, 10.0) == 0.5);
    const auto dead = hr_samples({std::nullopt, std::nullopt});
    CHECK(hr_validity_score(dead, {0, 200}, 10.0) == 0.0);
    CHECK_THROWS_AS(hr_validity_score(full, {100, 100}, 10.0), Error);
}

TEST_CASE("descriptive stats examples") {
    const std::vector<double> twos{2, 2, 2};
    const auto a = descriptive_stats(twos);
    CHECK(a.mean == 2.0);
    CHECK(a.std == 0.0);
    CHECK(a.min == 2.0);
    CHECK(a.max == 2.0);
    const std::vector<double> pair{1, 3};
    const auto b = descriptive_stats(pair);
    CHECK(b.mean == 2.0);
    CHECK(b.std == 1.0);
    CHECK(b.min == 1.0);
    CHECK(b.max == 3.0);
    CHECK_THROWS_AS(descriptive_stats(std::vector<double>{}), Error);
}

TEST_CASE("rmssd examples") {
    CHECK(rmssd(std::vector<double>{800, 810, 790}) == doctest::Approx(std::sqrt(250.0)));
    CHECK(rmssd(std::vector<double>{900, 900, 900, 900}) == 0.0);
    CHECK_THROWS_AS(rmssd(std::vector<double>{800}), Error);
}

TEST_CASE("feature schema sizes and order") {
    const auto short_names = feature_schema(WindowSpec(60, 1));
    CHECK(short_names.size() == 28);
    CHECK(std::is_sorted(short_names.begin(), short_names.end()));
    CHECK(std::none_of(short_names.begin(), short_names.end(),
                       [](const std::string& n) { return n.rfind("RMSSD", 0) == 0; }));
    const auto long_names = feature_schema(WindowSpec(300, 1));
    CHECK(long_names.size() == 32);
    CHECK(std::find(long_names.begin(), long_names.end(), "RMSSDstd") != long_names.end());
    FeatureOptions single;
    single.rmssd_mode = RmssdMode::Single;
    CHECK(feature_schema(WindowSpec(300, 1), single).size() == 29);
}

TEST_CASE("featurize 60x and 300x windows") {
    bfrb::testing::SyntheticOptions o;
    o.duration_s = 900;
    o.events = 4;
    const auto prepared = prepare_session(bfrb::testing::make_session(o));
    const WindowSpec spec300(300, 1), spec60(60, 1);

    const auto w60 = make_window(prepared.normalized, spec60, 400000, std::nullopt);
    const auto v60 = featurize(w60, prepared, spec60);
    CHECK(v60.values.size() == 28);

    const auto w300 = make_window(prepared.normalized, spec300, 400000, std::nullopt);
    const auto v300 = featurize(w300, prepared, spec300);
    CHECK(v300.values.size() == 32);
    CHECK(v300.values.at("RMSSDstd") >= 0.0);
    for (const auto& [name, value] : v300.values) CHECK(std::isfinite(value));
}

TEST_CASE("dead hr in minute three makes RMSSD unavailable") {
    bfrb::testing::SyntheticOptions o;
    o.duration_s = 900;
    o.events = 0;
    const auto base = bfrb::testing::make_session(o);
    auto samples = base.recording().samples;
    // Window x-span is [100 s, 400 s); minute three is [220 s, 280 s).
    for (auto& s : samples) {
        if (s.t >= 220000 && s.t < 280000) s.hr.reset();
    }
    const auto prepared = prepare_session(base.with_samples(samples));
    const WindowSpec spec(300, 1);
    const auto w = make_window(prepared.normalized, spec, 400000, std::nullopt);
    try {
        featurize(w, prepared, spec);
        FAIL("expected FeatureUnavailable");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::FeatureUnavailable);
        CHECK(std::string(e.what()).find("RMSSD") != std::string::npos);
    }
}

TEST_CASE("hrv validity filter") {
    FeatureDataset ds;
    ds.names = {"f"};
    for (int i = 0; i < 20; ++i) {
        FeatureVector v;
        v.values["f"] = i;
        v.label = i < 11 ? 1 : 0;
        v.participant_id = i < 11 ? "P03" : "P04";
        v.hr_validity = i < 11 ? 0.3 : 1.0;
        ds.vectors.push_back(v);
    }
    const auto filtered = hrv_validity_filter(ds, 0.5);
    CHECK(filtered.dataset.vectors.size() == 9);
    CHECK(filtered.report.per_participant.at("P03").positives == 11);
    CHECK(filtered.report.total() == 11);
    CHECK(hrv_validity_filter(ds, 0.0).dataset.vectors.size() == 20);
}
