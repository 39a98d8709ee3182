// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion. Exits non-zero if any criterion fails.
//
// Usage: govsim_acceptance <scenarios-dir>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <govsim/cli.hpp>
#include <govsim/harness.hpp>
#include <govsim/scenario_io.hpp>

using namespace govsim;

namespace {

struct CriterionResult {
    int id;
    std::string name;
    bool pass;
    std::string detail;
};

std::vector<CriterionResult> g_results;

void record(int id, const std::string& name, bool pass, const std::string& detail) {
    g_results.push_back({id, name, pass, detail});
    std::printf("[%s] criterion %2d: %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
}

struct SuiteScenarios {
    std::vector<Scenario> all;
    std::vector<Scenario> type1;
    std::vector<Scenario> type2;
    std::vector<Scenario> type3;
};

SuiteScenarios load_suite(const std::string& dir) {
    SuiteScenarios suite;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        std::ifstream in(file);
        std::ostringstream buf;
        buf << in.rdbuf();
        const auto result = parse_scenario(buf.str());
        if (!result.ok()) {
            std::fprintf(stderr, "cannot parse %s\n", file.string().c_str());
            std::exit(2);
        }
        suite.all.push_back(*result.scenario);
        if (result.scenario->overtake_type_label == "Type1") suite.type1.push_back(*result.scenario);
        if (result.scenario->overtake_type_label == "Type2") suite.type2.push_back(*result.scenario);
        if (result.scenario->overtake_type_label == "Type3") suite.type3.push_back(*result.scenario);
    }
    return suite;
}

// Shared per-trace scans, accumulated across every run the suite performs.
struct TraceScan {
    long traces_scanned = 0;
    long illegal_transitions = 0;
    long confinement_violations = 0;
    long counter_law_violations = 0;
};

void scan_trace(const Trace& trace, TraceScan& scan) {
    scan.traces_scanned += 1;

    std::optional<OvertakePhase> previous_phase;
    std::map<Tick, std::vector<PowerGrant>> grants_by_tick;
    EntityId holder;
    EntityId subject;
    for (const TraceEvent& e : trace.events) {
        if (const auto* grant = std::get_if<PowerGrantRec>(&e.payload)) {
            grants_by_tick[e.tick].push_back(grant->grant);
            holder = grant->grant.holder;
            subject = grant->grant.subject;
        }
    }
    const AuthorityMapping mapping;
    for (const TraceEvent& e : trace.events) {
        if (const auto* snap = std::get_if<StateSnapshotRec>(&e.payload)) {
            if (previous_phase && !is_legal_phase_transition(*previous_phase, snap->phase))
                scan.illegal_transitions += 1;
            previous_phase = snap->phase;
        } else if (const auto* adas = std::get_if<AdasEventRec>(&e.payload)) {
            const AuthoritySet authorities =
                holder.unset() ? AuthoritySet::none()
                               : authorities_of(grants_by_tick[e.tick], mapping, holder, subject);
            if (adas->event.kind == AdasEvent::Kind::Warn &&
                !authorities.contains(AuthorityKind::Warning))
                scan.confinement_violations += 1;
            if (adas->event.kind == AdasEvent::Kind::Control &&
                !authorities.contains(AuthorityKind::Controlling))
                scan.confinement_violations += 1;
        }
    }
    const ScenarioCounters c = count_trace(trace);
    if (c.completed + c.aborted + c.blocked > c.attempted) scan.counter_law_violations += 1;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

// ---------------------------------------------------------------------------

void criterion_1_autonomy_table() {
    using A = AwarenessKind;
    using C = ControllabilityLevel;
    int failures = 0;
    failures += derive_autonomy(A::BySelf, C::Controllable) != AutonomyLevel::Full;
    failures += derive_autonomy(A::ByDependency, C::Controllable) != AutonomyLevel::Partial;
    failures += derive_autonomy(A::BySelf, C::Uncontrollable) != AutonomyLevel::Limited;
    failures += derive_autonomy(A::ByDependency, C::Uncontrollable) != AutonomyLevel::Limited;
    failures += derive_autonomy(A::Unaware, C::Controllable) != AutonomyLevel::Limited;
    failures += derive_autonomy(A::Unaware, C::Uncontrollable) != AutonomyLevel::Limited;
    record(1, "autonomy table", failures == 0,
           failures == 0 ? "all 6 (awareness, controllability) pairs match"
                         : std::to_string(failures) + " mismatches");
}

void criterion_2_authority_mapping() {
    const AuthorityMapping mapping;
    int failures = 0;
    failures += !(mapping.of(PowerBase::Expert) ==
                  AuthoritySet{AuthorityKind::Monitoring, AuthorityKind::Warning});
    failures += !(mapping.of(PowerBase::Legitimate) ==
                  AuthoritySet{AuthorityKind::Monitoring, AuthorityKind::Warning,
                               AuthorityKind::Controlling});
    failures += !mapping.of(PowerBase::Reward).empty();
    failures += !mapping.of(PowerBase::Coercive).empty();
    failures += !mapping.of(PowerBase::Referent).empty();
    record(2, "authority mapping", failures == 0,
           failures == 0 ? "all 5 power bases map to their default authority sets"
                         : std::to_string(failures) + " mismatches");
}

void criterion_3_mode_table() {
    const AuthoritySet none = AuthoritySet::none();
    const AuthoritySet mw{AuthorityKind::Monitoring, AuthorityKind::Warning};
    const AuthoritySet mwc{AuthorityKind::Monitoring, AuthorityKind::Warning,
                           AuthorityKind::Controlling};
    int failures = 0;
    failures += adas_mode_for(AutonomyLevel::Full, none) != AdasMode::Off;
    failures += adas_mode_for(AutonomyLevel::Partial, mw) != AdasMode::Passive;
    failures += adas_mode_for(AutonomyLevel::Limited, mwc) != AdasMode::Active;
    for (const auto& [level, auth] :
         {std::pair{AutonomyLevel::Partial, none}, std::pair{AutonomyLevel::Limited, mw},
          std::pair{AutonomyLevel::Limited, none}}) {
        try {
            (void)adas_mode_for(level, auth);
            failures += 1;
        } catch (const governance_inconsistency_error&) {
        }
    }
    record(3, "mode table", failures == 0,
           failures == 0 ? "Full->Off, Partial->Passive, Limited->Active, errors fire"
                         : std::to_string(failures) + " mismatches");
}

void criterion_4_authority_confinement(const SuiteScenarios& suite, TraceScan& scan) {
    const auto start = std::chrono::steady_clock::now();
    long runs = 0;
    long violations_before = scan.confinement_violations;
    const int seeds_per_scenario =
        static_cast<int>((1000 + suite.all.size() - 1) / suite.all.size());
    for (const Scenario& sc : suite.all) {
        for (int seed = 1; seed <= seeds_per_scenario; ++seed) {
            const Trace trace = run_simulation({sc, static_cast<std::uint64_t>(seed), 1500, {}});
            scan_trace(trace, scan);
            ++runs;
        }
    }
    const long violations = scan.confinement_violations - violations_before;
    record(4, "authority confinement", violations == 0,
           std::to_string(runs) + " seeded runs, " + std::to_string(violations) +
               " unauthorized warn/control events (" + fmt(seconds_since(start)) + " s)");
}

void criterion_5_scenario_type_behavior(const SuiteScenarios& suite, TraceScan& scan) {
    const auto start = std::chrono::steady_clock::now();
    long type1_bad = 0;
    long type2_bad = 0;
    long type3_bad = 0;
    long runs = 0;

    for (const Scenario& sc : suite.type1) {
        for (int seed = 1; seed <= 100; ++seed, ++runs) {
            const Trace trace = run_simulation({sc, static_cast<std::uint64_t>(seed), 1500, {}});
            scan_trace(trace, scan);
            bool ok = true;
            for (const TraceEvent& e : trace.events) {
                if (std::holds_alternative<AdasEventRec>(e.payload)) ok = false;
                if (const auto* eval = std::get_if<AutonomyEvalRec>(&e.payload))
                    ok &= eval->autonomy == AutonomyLevel::Full;
            }
            type1_bad += !ok;
        }
    }
    for (const Scenario& sc : suite.type2) {
        for (int seed = 1; seed <= 100; ++seed, ++runs) {
            const Trace trace = run_simulation({sc, static_cast<std::uint64_t>(seed), 1500, {}});
            scan_trace(trace, scan);
            const ScenarioCounters c = count_trace(trace);
            type2_bad += !(c.warns >= 1 && c.controls == 0);
        }
    }
    for (const Scenario& sc : suite.type3) {
        for (int seed = 1; seed <= 100; ++seed, ++runs) {
            const Trace trace = run_simulation({sc, static_cast<std::uint64_t>(seed), 1500, {}});
            scan_trace(trace, scan);
            const ScenarioCounters c = count_trace(trace);
            type3_bad += !(c.controls >= 1);
        }
    }
    const bool pass = type1_bad == 0 && type2_bad == 0 && type3_bad == 0;
    record(5, "scenario-type behavior", pass,
           std::to_string(runs) + " runs; violations: type1=" + std::to_string(type1_bad) +
               " type2=" + std::to_string(type2_bad) + " type3=" + std::to_string(type3_bad) +
               " (" + fmt(seconds_since(start)) + " s)");
}

void criterion_6_governance_effect(const SuiteScenarios& suite, TraceScan& scan) {
    const auto start = std::chrono::steady_clock::now();
    long active_collisions = 0;
    long passive_collisions = 0;
    long runs = 0;
    const int seeds_per_scenario =
        static_cast<int>((1000 + suite.type3.size() - 1) / suite.type3.size());
    for (const Scenario& sc : suite.type3) {
        for (int seed = 1; seed <= seeds_per_scenario; ++seed, runs += 2) {
            const Trace active =
                run_simulation({sc, static_cast<std::uint64_t>(seed), 1500, {}});
            scan_trace(active, scan);
            active_collisions += count_trace(active).collisions;
            const Trace passive =
                run_simulation({sc, static_cast<std::uint64_t>(seed), 1500, AdasMode::Passive});
            scan_trace(passive, scan);
            passive_collisions += count_trace(passive).collisions;
        }
    }
    const bool pass = active_collisions == 0 && passive_collisions >= 1;
    record(6, "governance effect on safety", pass,
           "active: " + std::to_string(active_collisions) + " collisions, forced passive: " +
               std::to_string(passive_collisions) + " collisions over " + std::to_string(runs) +
               " runs (" + fmt(seconds_since(start)) + " s)");
}

/// Brute-force twin of gate S1: step the plan's motion model tick by tick and
/// measure whether the overtake completes with at least the margin to spare.
/// Agreement is required outside a one-tick boundary band.
void criterion_7_oracle_equivalence() {
    const auto start = std::chrono::steady_clock::now();
    const SimParams params;
    const double dt = 0.1;
    Rng rng(20260809);

    long mismatches = 0;
    long in_band = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const double gap = 8.0 + rng.uniform01() * 62.0;
        const double v_prec = 10.0 + rng.uniform01() * 18.0;
        const double v_ego = std::max(5.0, v_prec - 2.0 + rng.uniform01() * 10.0);
        const bool with_opposing = rng.uniform01() < 0.85;
        const double opp_distance = 50.0 + rng.uniform01() * 1350.0;
        const double v_opp = 15.0 + rng.uniform01() * 15.0;

        WorldState w;
        w.dt = dt;
        w.road_length = 5000.0;
        VehicleState ego;
        ego.id = EntityId("ego");
        ego.x = 100.0;
        ego.v = v_ego;
        VehicleState prec;
        prec.id = EntityId("prec");
        prec.x = 100.0 + 5.0 + gap;
        prec.v = v_prec;
        w.vehicles = {ego, prec};
        VehicleState opp;
        if (with_opposing) {
            opp.id = EntityId("opp");
            opp.lane = Lane::Opposing;
            opp.heading = Heading::Opposing;
            opp.x = 100.0 + opp_distance;
            opp.v = v_opp;
            w.vehicles.push_back(opp);
        }

        const OvertakePlan plan = plan_overtake(w, EntityId("ego"), EntityId("prec"), params);
        std::vector<double> conflicts;
        if (with_opposing) conflicts.push_back(time_to_conflict(plan, w.vehicles[0], w.vehicles[2]));
        const GateS1 decision = gate_s1(plan, conflicts, params.safety_margin);

        // Stepped oracle.
        double completion_time = -1.0;
        if (plan.feasible) {
            double progress = 0.0;
            for (long k = 1; k <= 20000; ++k) {
                const double time = k * dt;
                if (time > params.t_lc) progress += plan.closing_speed * dt;
                if (progress >= plan.required_displacement) {
                    completion_time = time + params.t_lc;
                    break;
                }
            }
        }
        double meet_time = kInfinity;
        if (with_opposing) {
            for (long k = 1; k <= 40000; ++k) {
                const double x_e = 100.0 + plan.target_speed * k * dt;
                const double x_o = (100.0 + opp_distance) - v_opp * k * dt;
                if (x_o <= x_e) {
                    meet_time = k * dt;
                    break;
                }
            }
        }
        const bool oracle_allows =
            completion_time > 0.0 && meet_time >= completion_time + params.safety_margin;
        const bool gate_allows = decision == GateS1::Allow;

        if (gate_allows != oracle_allows) {
            // Exempt only decisions within one tick of the threshold.
            const double analytic_conflict =
                conflicts.empty() ? kInfinity : conflicts.front();
            const double spare = analytic_conflict - plan.estimated_duration;
            if (std::isfinite(spare) && std::abs(spare - params.safety_margin) <= dt + 1e-9) {
                ++in_band;
            } else {
                ++mismatches;
            }
        }
    }
    record(7, "oracle equivalence for gate S1", mismatches == 0,
           "200 random configurations, " + std::to_string(mismatches) +
               " out-of-band disagreements, " + std::to_string(in_band) + " boundary cases (" +
               fmt(seconds_since(start)) + " s)");
}

void criterion_8_determinism(const SuiteScenarios& suite) {
    const auto start = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;

    for (const Scenario& sc : suite.all) {
        const RunConfig cfg{sc, 12345, 1500, {}};
        std::ostringstream a;
        std::ostringstream b;
        write_trace(run_simulation(cfg), a);
        write_trace(run_simulation(cfg), b);
        if (a.str() != b.str()) {
            pass = false;
            detail = "replay mismatch in " + sc.name;
        }
    }

    // Batch determinism: parallel and serial runs must produce identical files.
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "govsim_acceptance_batch";
    fs::remove_all(base);
    const fs::path serial = base / "serial";
    const fs::path parallel = base / "parallel";
    const fs::path scenario_dir = base / "scenarios";
    fs::create_directories(scenario_dir);
    for (const Scenario& sc : suite.all) {
        std::ofstream out(scenario_dir / (sc.name + ".json"));
        out << serialize_scenario(sc);
    }
    BatchCmd serial_cmd{scenario_dir.string(), {1, 2, 3}, serial.string(), 1, 1500, {}};
    BatchCmd parallel_cmd{scenario_dir.string(), {1, 2, 3}, parallel.string(), 4, 1500, {}};
    if (run_batch(serial_cmd) != 0 || run_batch(parallel_cmd) != 0) {
        pass = false;
        detail = "batch run failed";
    } else {
        std::vector<fs::path> serial_files;
        for (const auto& entry : fs::directory_iterator(serial))
            serial_files.push_back(entry.path().filename());
        std::sort(serial_files.begin(), serial_files.end());
        long compared = 0;
        for (const auto& name : serial_files) {
            std::ifstream fa(serial / name, std::ios::binary);
            std::ifstream fb(parallel / name, std::ios::binary);
            std::ostringstream ba;
            std::ostringstream bb;
            ba << fa.rdbuf();
            bb << fb.rdbuf();
            if (!fb || ba.str() != bb.str()) {
                pass = false;
                detail = "parallel batch differs for " + name.string();
            }
            ++compared;
        }
        long parallel_count = 0;
        for ([[maybe_unused]] const auto& entry : fs::directory_iterator(parallel))
            ++parallel_count;
        if (parallel_count != compared) {
            pass = false;
            detail = "parallel batch produced a different file set";
        }
        if (pass)
            detail = "replays byte-identical; batch serial==parallel over " +
                     std::to_string(compared) + " files";
    }
    fs::remove_all(base);
    record(8, "determinism and replay", pass, detail + " (" + fmt(seconds_since(start)) + " s)");
}

Trace random_trace(Rng& rng, int index) {
    Trace t;
    t.header = {1, "gen" + std::to_string(index), rng.next_u64() % 100000,
                index % 3 == 0 ? "Type1" : (index % 3 == 1 ? "Type2" : "Type3")};
    Tick tick = 0;
    const int events = 1 + static_cast<int>(rng.next_u64() % 30);
    for (int i = 0; i < events; ++i) {
        tick += static_cast<Tick>(rng.next_u64() % 3);
        switch (rng.next_u64() % 6) {
            case 0: {
                StateSnapshotRec snap;
                snap.phase = static_cast<OvertakePhase>(rng.next_u64() % 8);
                snap.mode = static_cast<AdasMode>(rng.next_u64() % 3);
                const int n = static_cast<int>(rng.next_u64() % 3);
                for (int k = 0; k < n; ++k) {
                    snap.vehicles.push_back({EntityId("v" + std::to_string(k)),
                                             rng.bernoulli(0.5) ? Lane::Original : Lane::Opposing,
                                             rng.bernoulli(0.5) ? Heading::Forward
                                                                : Heading::Opposing,
                                             quantize6(rng.uniform01() * 2000.0),
                                             quantize6(rng.uniform01() * 33.0),
                                             static_cast<Zone>(rng.next_u64() % 3)});
                }
                t.events.push_back({tick, snap});
                break;
            }
            case 1:
                t.events.push_back(
                    {tick, AutonomyEvalRec{EntityId("d1"), EntityId("ot1"),
                                           static_cast<AwarenessKind>(rng.next_u64() % 3),
                                           static_cast<ControllabilityLevel>(rng.next_u64() % 2),
                                           static_cast<AutonomyLevel>(rng.next_u64() % 3)}});
                break;
            case 2:
                t.events.push_back(
                    {tick, PowerGrantRec{{EntityId("a1"), EntityId("d1"), EntityId("ot1"),
                                          kAllPowerBases[rng.next_u64() % 5], tick}}});
                break;
            case 3: {
                AdasEvent event;
                event.tick = tick;
                event.subject = EntityId("d1");
                switch (rng.next_u64() % 3) {
                    case 0: event.kind = AdasEvent::Kind::Monitor; break;
                    case 1:
                        event.kind = AdasEvent::Kind::Warn;
                        event.reason = static_cast<WarnReason>(rng.next_u64() % 4);
                        break;
                    default:
                        event.kind = AdasEvent::Kind::Control;
                        event.action = static_cast<ControlAction>(rng.next_u64() % 5);
                        break;
                }
                t.events.push_back({tick, AdasEventRec{event}});
                break;
            }
            case 4:
                t.events.push_back({tick, CollisionRec{EntityId("ego"), EntityId("opp")}});
                break;
            default:
                t.events.push_back(
                    {tick, OutcomeRec{static_cast<OutcomeRec::Kind>(rng.next_u64() % 3)}});
                break;
        }
    }
    return t;
}

Scenario random_scenario(Rng& rng, int index) {
    Scenario sc;
    sc.name = "gen" + std::to_string(index);
    sc.overtake_type_label = index % 2 ? "Type2" : "Type3";
    sc.road_length = 500.0 + rng.uniform01() * 2000.0;
    sc.visibility_range = 40.0 + rng.uniform01() * 300.0;
    const double dts[] = {0.05, 0.1, 1.0 / 3.0, 0.25};
    sc.dt = dts[rng.next_u64() % 4];
    sc.params.safety_margin = 1.0 + rng.uniform01() * 5.0;
    sc.params.warning_margin = 50.0 + rng.uniform01() * 100.0;
    sc.params.d_return = 10.0 + rng.uniform01() * 10.0;
    sc.params.freshness_ticks = static_cast<int>(rng.next_u64() % 20);

    VehicleState ego;
    ego.id = EntityId("ego");
    ego.x = rng.uniform01() * sc.road_length * 0.2;
    ego.v = rng.uniform01() * 25.0;
    sc.vehicles.push_back(ego);
    const int extra = static_cast<int>(rng.next_u64() % 3);
    for (int i = 0; i < extra; ++i) {
        VehicleState v;
        v.id = EntityId("car" + std::to_string(i));
        v.lane = rng.bernoulli(0.5) ? Lane::Original : Lane::Opposing;
        v.heading = v.lane == Lane::Original ? Heading::Forward : Heading::Opposing;
        v.x = rng.uniform01() * sc.road_length;
        v.v = rng.uniform01() * 25.0;
        sc.vehicles.push_back(v);
    }
    sc.cpses = {{EntityId("d1"), CpsKind::Driver, 100.0 + rng.uniform01() * 300.0, EntityId("ego")},
                {EntityId("a1"), CpsKind::Adas, 100.0 + rng.uniform01() * 300.0, EntityId("ego")}};
    if (rng.bernoulli(0.5)) {
        sc.cpses.push_back({EntityId("r1"), CpsKind::Rsu, 500.0, std::nullopt});
        sc.rsus.push_back({EntityId("r1"), rng.uniform01() * sc.road_length,
                           100.0 + rng.uniform01() * 900.0, static_cast<int>(rng.next_u64() % 5),
                           rng.uniform01() * 0.2});
    }
    DriverPolicy policy;
    const int kind = static_cast<int>(rng.next_u64() % 3);
    policy.kind = kind == 0 ? DriverKind::Compliant
                            : (kind == 1 ? DriverKind::Oblivious : DriverKind::Aggressive);
    policy.compliance_probability =
        policy.kind == DriverKind::Compliant ? 1.0
        : policy.kind == DriverKind::Oblivious ? 0.0 : rng.uniform01();
    policy.desired_speed = 20.0 + rng.uniform01() * 10.0;
    policy.gap_acceptance_margin = 0.5 + rng.uniform01() * 4.0;
    policy.perception_noise_std = rng.uniform01() * 100.0;
    sc.driver_policies["d1"] = policy;
    if (rng.bernoulli(0.3)) {
        sc.default_rules = false;
        sc.rules = default_overtaking_rules(EntityId("d1"), EntityId("a1"));
    }
    return sc;
}

void criterion_9_round_trips() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(424242);
    long trace_failures = 0;
    for (int i = 0; i < 500; ++i) {
        const Trace t = random_trace(rng, i);
        std::stringstream buffer;
        write_trace(t, buffer);
        try {
            if (!(read_trace(buffer) == t)) ++trace_failures;
        } catch (const TraceParseError&) {
            ++trace_failures;
        }
    }
    long scenario_failures = 0;
    for (int i = 0; i < 500; ++i) {
        const Scenario sc = random_scenario(rng, i);
        const std::string text1 = serialize_scenario(sc);
        const auto r1 = parse_scenario(text1);
        if (!r1.ok()) {
            ++scenario_failures;
            continue;
        }
        const std::string text2 = serialize_scenario(*r1.scenario);
        const auto r2 = parse_scenario(text2);
        if (!r2.ok() || text1 != text2 || serialize_scenario(*r2.scenario) != text2)
            ++scenario_failures;
    }
    record(9, "serialization round-trips", trace_failures == 0 && scenario_failures == 0,
           "500 traces (" + std::to_string(trace_failures) + " failures), 500 scenarios (" +
               std::to_string(scenario_failures) + " failures) (" + fmt(seconds_since(start)) +
               " s)");
}

void criterion_10_phase_legality(const TraceScan& scan) {
    record(10, "phase-machine legality", scan.illegal_transitions == 0,
           std::to_string(scan.traces_scanned) + " suite traces scanned, " +
               std::to_string(scan.illegal_transitions) + " illegal transitions, " +
               std::to_string(scan.counter_law_violations) + " counter-law violations");
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: govsim_acceptance <scenarios-dir>\n");
        return 2;
    }
    const SuiteScenarios suite = load_suite(argv[1]);
    if (suite.type1.empty() || suite.type2.empty() || suite.type3.empty()) {
        std::fprintf(stderr, "scenario suite must contain all three overtaking types\n");
        return 2;
    }

    TraceScan scan;
    criterion_1_autonomy_table();
    criterion_2_authority_mapping();
    criterion_3_mode_table();
    criterion_4_authority_confinement(suite, scan);
    criterion_5_scenario_type_behavior(suite, scan);
    criterion_6_governance_effect(suite, scan);
    criterion_7_oracle_equivalence();
    criterion_8_determinism(suite);
    criterion_9_round_trips();
    criterion_10_phase_legality(scan);

    int failed = 0;
    for (const CriterionResult& r : g_results) failed += !r.pass;
    std::printf("%d/%d criteria passed\n", static_cast<int>(g_results.size()) - failed,
                static_cast<int>(g_results.size()));
    return failed == 0 ? 0 : 1;
}
