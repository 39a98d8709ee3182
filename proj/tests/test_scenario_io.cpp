#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include <govsim/scenario_io.hpp>
#include <govsim/svg_timeline.hpp>

using namespace govsim;
using Catch::Approx;

namespace {

const char* kMinimalDoc = R"({
  "name": "minimal",
  "road_length": 1000.0,
  "vehicles": [
    {"id": "ego", "lane": "original", "heading": "forward", "x": 50.0, "v": 20.0},
    {"id": "prec", "lane": "original", "heading": "forward", "x": 120.0, "v": 18.0}
  ],
  "cpses": [
    {"id": "d1", "kind": "driver", "sensing_range": 250.0, "hosted_on": "ego"},
    {"id": "a1", "kind": "adas", "sensing_range": 250.0, "hosted_on": "ego"}
  ]
})";

bool has_error_for(const ScenarioParseResult& result, std::string_view needle) {
    for (const SchemaIssue& e : result.errors)
        if (e.field.find(needle) != std::string::npos ||
            e.message.find(needle) != std::string::npos)
            return true;
    return false;
}

Trace trace_fixture() {
    Trace t;
    t.header = {1, "fixture", 42, "Type1"};
    StateSnapshotRec snap;
    snap.phase = OvertakePhase::Following;
    snap.mode = AdasMode::Off;
    snap.vehicles = {{EntityId("ego"), Lane::Original, Heading::Forward, quantize6(82.198591),
                      quantize6(21.971815), Zone::Safe}};
    t.events.push_back({0, AutonomyEvalRec{EntityId("d1"), EntityId("ot1"), AwarenessKind::BySelf,
                                           ControllabilityLevel::Controllable,
                                           AutonomyLevel::Full}});
    t.events.push_back({0, snap});
    t.events.push_back(
        {1, PowerGrantRec{{EntityId("a1"), EntityId("d1"), EntityId("ot1"), PowerBase::Expert, 1}}});
    t.events.push_back({1, AdasEventRec{{1, AdasEvent::Kind::Warn, EntityId("d1"),
                                         WarnReason::UnsafeGap, std::nullopt}}});
    t.events.push_back({2, AdasEventRec{{2, AdasEvent::Kind::Control, EntityId("d1"), std::nullopt,
                                         ControlAction::BlockInitiation}}});
    t.events.push_back({3, CollisionRec{EntityId("ego"), EntityId("opp")}});
    t.events.push_back({3, OutcomeRec{OutcomeRec::Kind::Aborted}});
    return t;
}

} // namespace

TEST_CASE("a minimal document parses with the documented defaults") {
    const auto result = parse_scenario(kMinimalDoc);
    REQUIRE(result.ok());
    CHECK(result.scenario->dt == Approx(0.1));
    CHECK(result.scenario->visibility_range == Approx(200.0));
    CHECK(result.scenario->schema_version == 1);
    CHECK(result.scenario->default_rules);
    CHECK(result.scenario->params.v_max == Approx(33.0));
    CHECK(result.scenario->overtake_type_label == "Type1");
}

TEST_CASE("a document missing road_length names the field") {
    std::string doc = kMinimalDoc;
    doc.replace(doc.find("\"road_length\": 1000.0,"), 23, "");
    const auto result = parse_scenario(doc);
    CHECK_FALSE(result.ok());
    CHECK(has_error_for(result, "road_length"));
}

TEST_CASE("duplicate vehicle ids are rejected") {
    std::string doc = kMinimalDoc;
    doc.replace(doc.find("\"id\": \"prec\""), 12, "\"id\": \"ego\"");
    const auto result = parse_scenario(doc);
    CHECK_FALSE(result.ok());
    CHECK(has_error_for(result, "duplicate"));
}

TEST_CASE("unknown fields are rejected with their path") {
    std::string doc = kMinimalDoc;
    doc.insert(doc.find("\"name\""), "\"frobnicate\": 1, ");
    const auto result = parse_scenario(doc);
    CHECK_FALSE(result.ok());
    CHECK(has_error_for(result, "frobnicate"));
}

TEST_CASE("malformed JSON reports the position") {
    const auto result = parse_scenario("{\"name\": \"x\", }");
    CHECK_FALSE(result.ok());
    REQUIRE_FALSE(result.errors.empty());
    CHECK(result.errors[0].message.find("parse error") != std::string::npos);
}

TEST_CASE("a compliant policy with partial compliance is rejected") {
    std::string doc = kMinimalDoc;
    doc.insert(doc.rfind('}'), R"(,
  "driver_policies": {"d1": {"kind": "compliant", "compliance_probability": 0.5}})");
    const auto result = parse_scenario(doc);
    CHECK_FALSE(result.ok());
    CHECK(has_error_for(result, "compliance_probability"));
}

TEST_CASE("non-numeric values are rejected") {
    std::string doc = kMinimalDoc;
    doc.replace(doc.find("\"road_length\": 1000.0"), 21, "\"road_length\": \"long\"");
    const auto result = parse_scenario(doc);
    CHECK_FALSE(result.ok());
    CHECK(has_error_for(result, "road_length"));
}

TEST_CASE("parse then serialize reaches a fixed point after one pass") {
    const auto first = parse_scenario(kMinimalDoc);
    REQUIRE(first.ok());
    const std::string canon = serialize_scenario(*first.scenario);
    const auto second = parse_scenario(canon);
    REQUIRE(second.ok());
    CHECK(serialize_scenario(*second.scenario) == canon);
}

TEST_CASE("explicit rule lists round-trip through the canonical form") {
    std::string doc = kMinimalDoc;
    doc.insert(doc.rfind('}'), R"(,
  "rules": [
    {"id": "r1", "condition": "limited", "grant_base": "legitimate", "holder": "a1", "subject": "d1", "activity_kind": "overtake"},
    {"id": "r2", "condition": "full", "grant_base": null, "holder": "a1", "subject": "d1", "activity_kind": "overtake"}
  ])");
    const auto result = parse_scenario(doc);
    REQUIRE(result.ok());
    REQUIRE_FALSE(result.scenario->default_rules);
    REQUIRE(result.scenario->rules.size() == 2);
    CHECK(result.scenario->rules[0].grant_base == PowerBase::Legitimate);
    CHECK_FALSE(result.scenario->rules[1].grant_base.has_value());

    const std::string canon = serialize_scenario(*result.scenario);
    const auto reparsed = parse_scenario(canon);
    REQUIRE(reparsed.ok());
    CHECK(serialize_scenario(*reparsed.scenario) == canon);
}

TEST_CASE("trace write/read is the identity") {
    const Trace t = trace_fixture();
    std::stringstream buffer;
    write_trace(t, buffer);
    const Trace back = read_trace(buffer);
    CHECK(back == t);
}

TEST_CASE("an empty trace is a header-only file") {
    Trace t;
    t.header = {1, "empty", 7, "Type2"};
    std::stringstream buffer;
    write_trace(t, buffer);
    const std::string text = buffer.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 1);
    const Trace back = read_trace(buffer);
    CHECK(back == t);
    CHECK(back.events.empty());
}

TEST_CASE("a truncated final line reports its line number") {
    const Trace t = trace_fixture();
    std::stringstream buffer;
    write_trace(t, buffer);
    std::string text = buffer.str();
    text.resize(text.size() - 20); // cut into the last record
    std::istringstream broken(text);
    try {
        read_trace(broken);
        FAIL("expected TraceParseError");
    } catch (const TraceParseError& e) {
        CHECK(e.line() == 1 + t.events.size()); // header plus events
    }
}

TEST_CASE("a trace without a header is rejected") {
    std::istringstream empty("");
    CHECK_THROWS_AS(read_trace(empty), TraceParseError);
}

TEST_CASE("wrongly typed trace fields report their line number") {
    std::istringstream bad(
        "{\"schema_version\":1,\"scenario\":\"s\",\"seed\":1,\"label\":\"\"}\n"
        "{\"tick\":\"zero\",\"kind\":\"outcome\",\"outcome\":\"completed\"}\n");
    try {
        read_trace(bad);
        FAIL("expected TraceParseError");
    } catch (const TraceParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("summarize counts outcomes, warns, controls and collisions") {
    SECTION("one completed overtake with two warns") {
        Trace t;
        t.header = {1, "s", 1, "Type2"};
        StateSnapshotRec wait;
        wait.phase = OvertakePhase::GapWait;
        StateSnapshotRec init;
        init.phase = OvertakePhase::Initiating;
        t.events.push_back({0, wait});
        t.events.push_back({1, init});
        t.events.push_back({2, AdasEventRec{{2, AdasEvent::Kind::Warn, EntityId("d1"),
                                             WarnReason::InsufficientReturnGap, std::nullopt}}});
        t.events.push_back({3, AdasEventRec{{3, AdasEvent::Kind::Warn, EntityId("d1"),
                                             WarnReason::InsufficientReturnGap, std::nullopt}}});
        t.events.push_back({4, OutcomeRec{OutcomeRec::Kind::Completed}});
        const Report report = summarize(std::vector<Trace>{t});
        const ScenarioCounters& c = report.per_scenario.at("s");
        CHECK(c.attempted == 1);
        CHECK(c.completed == 1);
        CHECK(c.warns == 2);
        CHECK(c.controls == 0);
        CHECK(c.collisions == 0);
        CHECK(report.per_type.count("Type2") == 1);
    }
    SECTION("empty input gives an all-zero report") {
        const Report report = summarize(std::vector<Trace>{});
        CHECK(report.per_scenario.empty());
        CHECK(report.per_type.empty());
    }
    SECTION("a blocked outcome counts as an attempt but not a completion") {
        Trace t;
        t.header = {1, "s", 1, "Type3"};
        t.events.push_back({5, OutcomeRec{OutcomeRec::Kind::Blocked}});
        const Report report = summarize(std::vector<Trace>{t});
        const ScenarioCounters& c = report.per_scenario.at("s");
        CHECK(c.blocked == 1);
        CHECK(c.completed == 0);
        CHECK(c.attempted == 1);
    }
}

TEST_CASE("the report CSV has the exact documented header") {
    Trace t = trace_fixture();
    const Report report = summarize(std::vector<Trace>{t});
    std::ostringstream out;
    write_report_csv(report, out);
    const std::string text = out.str();
    CHECK(text.rfind("scenario,attempted,completed,aborted,blocked,warns,controls,collisions\n",
                     0) == 0);
    CHECK(text.find("fixture,") != std::string::npos);
}

TEST_CASE("the SVG timeline carries the documented elements") {
    SECTION("one collision marker per collision, one polyline per vehicle") {
        const Trace t = trace_fixture();
        std::ostringstream out;
        emit_timeline_svg(t, out);
        const std::string svg = out.str();
        size_t polylines = 0;
        for (size_t pos = 0; (pos = svg.find("<polyline", pos)) != std::string::npos; ++pos)
            ++polylines;
        size_t collisions = 0;
        for (size_t pos = 0; (pos = svg.find("class=\"collision\"", pos)) != std::string::npos;
             ++pos)
            ++collisions;
        CHECK(polylines == 1);
        CHECK(collisions == 1);
        CHECK(svg.find("class=\"warn\"") != std::string::npos);
        CHECK(svg.find("class=\"control\"") != std::string::npos);
    }
    SECTION("an empty trace still yields a valid SVG with axes") {
        Trace t;
        t.header = {1, "empty", 7, ""};
        std::ostringstream out;
        emit_timeline_svg(t, out);
        const std::string svg = out.str();
        CHECK(svg.rfind("<svg", 0) == 0);
        CHECK(svg.find("class=\"axis\"") != std::string::npos);
        CHECK(svg.find("<polyline") == std::string::npos);
        CHECK(svg.find("</svg>") != std::string::npos);
    }
    SECTION("emission is byte-deterministic") {
        const Trace t = trace_fixture();
        std::ostringstream a;
        std::ostringstream b;
        emit_timeline_svg(t, a);
        emit_timeline_svg(t, b);
        CHECK(a.str() == b.str());
    }
}
