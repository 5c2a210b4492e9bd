#include "bfrb/error.hpp"
#include "bfrb/ingest.hpp"
#include "support/synthetic.hpp"

#include <doctest.h>

#include <fstream>
#include <functional>
#include <sstream>

using namespace bfrb;
using bfrb::testing::scratch_dir;

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream(path) << text;
}

std::string recording_text(int seconds, bool with_gyr_z = true) {
    std::ostringstream s;
    s << "timestamp_ms,accX,accY,accZ,gyrX,gyrY" << (with_gyr_z ? ",gyrZ" : "") << ",hr\n";
    for (int i = 0; i < seconds * 10; ++i) {
        s << i * 100 << ",0.1,0.2,9.8,0,0" << (with_gyr_z ? ",0" : "") << ",70\n";
    }
    return s.str();
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::Io;
}

const char* kStages =
    "stage,start_ms,end_ms\n"
    "baseline1,0,120000\ntask1_prep,120000,200000\ntask1_present,200000,300000\n"
    "baseline2,300000,400000\ntask2,400000,500000\nbaseline3,500000,600000\n";

} // namespace

TEST_CASE("load_recording round trip of a 600 s file") {
    const auto dir = scratch_dir("ingest-rec");
    write_text(dir / "P07" / "recording.csv", recording_text(600));
    const auto rec = load_recording(dir / "P07" / "recording.csv");
    CHECK(rec.samples.size() == 6000);
    CHECK(rec.participant_id == "P07");
    CHECK(rec.span() == TimeSpan{0, 600000});
    CHECK(rec.samples[5].hr == doctest::Approx(70.0));
}

TEST_CASE("missing gyrZ column is MissingChannel") {
    const auto dir = scratch_dir("ingest-missing");
    write_text(dir / "r.csv", recording_text(10, false));
    CHECK(kind_of([&] { load_recording(dir / "r.csv"); }) == ErrorKind::MissingChannel);
}

TEST_CASE("shuffled timestamps are rejected") {
    const auto dir = scratch_dir("ingest-shuffle");
    write_text(dir / "r.csv", "timestamp_ms,accX,accY,accZ,gyrX,gyrY,gyrZ,hr\n0,0,0,0,0,0,0,70\n200,0,0,0,0,0,0,70\n"
                              "100,0,0,0,0,0,0,70\n");
    CHECK(kind_of([&] { load_recording(dir / "r.csv"); }) == ErrorKind::NonMonotoneTimestamps);
}

TEST_CASE("hr missing conventions") {
    const auto dir = scratch_dir("ingest-hr");
    write_text(dir / "r.csv", "timestamp_ms,accX,accY,accZ,gyrX,gyrY,gyrZ,hr\n0,0,0,0,0,0,0,0\n100,0,0,0,0,0,0,\n"
                              "200,0,0,0,0,0,0,nan\n300,0,0,0,0,0,0,-4\n400,0,0,0,0,0,0,65\n");
    const auto rec = load_recording(dir / "r.csv");
    for (int i = 0; i < 4; ++i) CHECK_FALSE(rec.samples[i].hr.has_value());
    CHECK(rec.samples[4].hr == doctest::Approx(65.0));
}

TEST_CASE("load_labels") {
    const auto dir = scratch_dir("ingest-labels");
    write_text(dir / "l.csv", "start_ms,end_ms,behavior,hand\n412000,415000,skin-picking,watch\n");
    const auto events = load_labels(dir / "l.csv");
    REQUIRE(events.size() == 1);
    CHECK(events[0].behavior == Behavior::SkinPicking);
    CHECK(events[0].hand == Hand::WatchHand);
    CHECK(events[0].end - events[0].start == 3000);

    write_text(dir / "bad.csv", "start_ms,end_ms,behavior,hand\n5000,4000,skin-picking,watch\n");
    CHECK(kind_of([&] { load_labels(dir / "bad.csv"); }) == ErrorKind::NegativeDuration);
    write_text(dir / "unk.csv", "start_ms,end_ms,behavior,hand\n1,2,juggling,watch\n");
    CHECK(kind_of([&] { load_labels(dir / "unk.csv"); }) == ErrorKind::UnknownBehavior);
}

TEST_CASE("load_stages") {
    const auto dir = scratch_dir("ingest-stages");
    write_text(dir / "s.csv", kStages);
    CHECK(load_stages(dir / "s.csv").size() == 6);

    write_text(dir / "overlap.csv", "stage,start_ms,end_ms\nbaseline1,0,100\ntask2,100,500\nbaseline3,400,600\n");
    CHECK(kind_of([&] { load_stages(dir / "overlap.csv"); }) == ErrorKind::OverlappingStages);
    write_text(dir / "nob1.csv", "stage,start_ms,end_ms\ntask2,100,500\n");
    CHECK(kind_of([&] { load_stages(dir / "nob1.csv"); }) == ErrorKind::MissingBaselineI);
}

TEST_CASE("assemble_session range checks") {
    const auto dir = scratch_dir("ingest-assemble");
    write_text(dir / "r.csv", recording_text(600));
    write_text(dir / "s.csv", kStages);
    const auto rec = load_recording(dir / "r.csv", {}, "P01");
    const auto stages = load_stages(dir / "s.csv");

    const auto ok = assemble_session(rec, stages, {});
    CHECK(ok.events().empty());
    CHECK(ok.stage(Stage::Task2)->start == 400000);

    BehaviorEvent late{610000, 611000, Behavior::Fidgeting, Hand::Unknown};
    CHECK(kind_of([&] { assemble_session(rec, stages, {late}); }) == ErrorKind::EventOutOfRange);
}

TEST_CASE("adapter maps columns, aliases and units") {
    const auto dir = scratch_dir("ingest-adapter");
    write_text(dir / "P01" / "data.csv", "time_s,ax,ay,az,gx,gy,gz,bpm\n0,1,0,0,0,0,0,60\n0.1,2,0,0,0,0,0,60\n"
                                         "0.2,3,0,0,0,0,0,60\n0.3,4,0,0,0,0,0,60\n");
    write_text(dir / "P01" / "events.csv", "on,off,what\n0.1,0.2,Picking\n");
    write_text(dir / "P01" / "stages.csv", "stage,on,off\nB1,0,0.2\n");
    write_text(dir / "adapter.json", R"({
        "columns": {"timestamp_ms": "time_s", "accX": "ax", "accY": "ay", "accZ": "az",
                    "gyrX": "gx", "gyrY": "gy", "gyrZ": "gz", "hr": "bpm",
                    "start_ms": "on", "end_ms": "off", "behavior": "what"},
        "behavior_aliases": {"picking": "skin-picking"},
        "stage_aliases": {"b1": "baseline1"},
        "unit_scale": {"timestamp_ms": 1000, "start_ms": 1000, "end_ms": 1000, "accX": 0.5},
        "files": {"recording": "data.csv", "labels": "events.csv"}
    })");
    const auto adapter = load_adapter(dir / "adapter.json");
    const auto sessions = load_dataset(dir, adapter);
    REQUIRE(sessions.size() == 1);
    const auto& s = sessions[0];
    CHECK(s.recording().samples[3].t == 300);
    CHECK(s.recording().samples[3].motion[0] == doctest::Approx(2.0));
    REQUIRE(s.events().size() == 1);
    CHECK(s.events()[0].behavior == Behavior::SkinPicking);
    CHECK(s.events()[0].start == 100);

    CHECK(kind_of([] { parse_adapter(R"({"colums": {}})"); }) == ErrorKind::InvalidConfig);
    CHECK(kind_of([&] { load_adapter(dir / "missing.json"); }) == ErrorKind::FileNotFound);
}

TEST_CASE("session round trips through the canonical writers") {
    bfrb::testing::SyntheticOptions o;
    o.duration_s = 300;
    o.events = 3;
    o.hr_missing = 0.1;
    const auto s = bfrb::testing::make_session(o);
    const auto dir = scratch_dir("ingest-roundtrip");
    write_session(s, dir / "P01");
    const auto loaded = load_dataset(dir);
    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].events() == s.events());
    CHECK(loaded[0].recording().samples.size() == s.recording().samples.size());
    for (std::size_t i = 0; i < s.recording().samples.size(); i += 37) {
        const auto& a = s.recording().samples[i];
        const auto& b = loaded[0].recording().samples[i];
        CHECK(a.hr.has_value() == b.hr.has_value());
        CHECK(a.motion[2] == doctest::Approx(b.motion[2]).epsilon(1e-5));
    }
}

TEST_CASE("empty dataset root") {
    const auto dir = scratch_dir("ingest-empty");
    CHECK(kind_of([&] { load_dataset(dir); }) == ErrorKind::EmptyDataset);
}
