#pragma once

// Orchestrates a full run. Per tick, in fixed order: RSU broadcast and
// provision delivery, self sensing, awareness/controllability classification,
// rule evaluation and mode selection, driver decision, gate checks and
// intervention, kinematics, zone/collision classification, trace append.
// A trace is a pure function of (scenario, seed).

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "govsim/adas.hpp"
#include "govsim/core_model.hpp"
#include "govsim/driver.hpp"
#include "govsim/governance.hpp"
#include "govsim/overtake_phase.hpp"
#include "govsim/rng.hpp"
#include "govsim/scenario.hpp"
#include "govsim/world.hpp"

namespace govsim {

class configuration_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rounds to the 6-decimal grid used by trace serialization, so recorded
/// values survive a write/read cycle bit-exactly.
inline double quantize6(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, 6);
    double out = 0.0;
    std::from_chars(buf, res.ptr, out);
    return out;
}

// ---------------------------------------------------------------------------
// Trace records

struct RunConfig {
    Scenario scenario;
    std::uint64_t seed = 0;
    Tick max_ticks = 3000;
    // Experiment knob: pins the assistance mode regardless of the autonomy
    // evaluation. Events the granted authorities cannot cover are not emitted.
    std::optional<AdasMode> forced_mode;
};

struct SnapshotVehicle {
    EntityId id;
    Lane lane;
    Heading heading;
    double x = 0.0;
    double v = 0.0;
    Zone zone = Zone::Safe;

    friend bool operator==(const SnapshotVehicle&, const SnapshotVehicle&) = default;
};

struct StateSnapshotRec {
    OvertakePhase phase = OvertakePhase::Following;
    AdasMode mode = AdasMode::Off;
    std::vector<SnapshotVehicle> vehicles;

    friend bool operator==(const StateSnapshotRec&, const StateSnapshotRec&) = default;
};

struct AutonomyEvalRec {
    EntityId subject;
    EntityId activity;
    AwarenessKind awareness;
    ControllabilityLevel controllability;
    AutonomyLevel autonomy;

    friend bool operator==(const AutonomyEvalRec&, const AutonomyEvalRec&) = default;
};

struct PowerGrantRec {
    PowerGrant grant;

    friend bool operator==(const PowerGrantRec&, const PowerGrantRec&) = default;
};

struct AdasEventRec {
    AdasEvent event;

    friend bool operator==(const AdasEventRec&, const AdasEventRec&) = default;
};

struct CollisionRec {
    EntityId a;
    EntityId b;

    friend bool operator==(const CollisionRec&, const CollisionRec&) = default;
};

struct OutcomeRec {
    enum class Kind { Completed, Aborted, Blocked };
    Kind kind = Kind::Completed;

    friend bool operator==(const OutcomeRec&, const OutcomeRec&) = default;
};

inline std::string_view to_string(OutcomeRec::Kind k) {
    switch (k) {
        case OutcomeRec::Kind::Completed: return "completed";
        case OutcomeRec::Kind::Aborted: return "aborted";
        case OutcomeRec::Kind::Blocked: return "blocked";
    }
    return "?";
}

using TracePayload = std::variant<StateSnapshotRec, AutonomyEvalRec, PowerGrantRec, AdasEventRec,
                                  CollisionRec, OutcomeRec>;

struct TraceEvent {
    Tick tick = 0;
    TracePayload payload;

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct TraceHeader {
    int schema_version = 1;
    std::string scenario;
    std::uint64_t seed = 0;
    std::string label;

    friend bool operator==(const TraceHeader&, const TraceHeader&) = default;
};

struct Trace {
    TraceHeader header;
    std::vector<TraceEvent> events;

    friend bool operator==(const Trace&, const Trace&) = default;
};

// ---------------------------------------------------------------------------
// Scenario derivation and validation

/// The scenario's overtake activity: the driver against the nearest vehicle
/// ahead in the ego's lane at the start. Absent when nothing is ahead.
inline std::optional<Activity> derive_activity(const Scenario& scenario) {
    const Cps* driver = scenario.find_cps_of_kind(CpsKind::Driver);
    if (!driver || !driver->hosted_on) return std::nullopt;
    const VehicleState* ego = nullptr;
    for (const VehicleState& v : scenario.vehicles)
        if (v.id == *driver->hosted_on) ego = &v;
    if (!ego) return std::nullopt;

    const VehicleState* target = nullptr;
    for (const VehicleState& v : scenario.vehicles) {
        if (v.id == ego->id || v.lane != ego->lane || v.x <= ego->x) continue;
        if (!target || v.x < target->x) target = &v;
    }
    if (!target) return std::nullopt;

    char suffix[20];
    std::snprintf(suffix, sizeof suffix, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(driver->id.value()) ^
                                                  fnv1a64(target->id.value())));
    return Activity{EntityId(std::string("ot-") + suffix), ActivityKind::Overtake, driver->id,
                    SphereOfAction{ego->x, target->x + target->length + 100.0, LaneSet::both(), 0,
                                   std::numeric_limits<Tick>::max()},
                    target->id};
}

inline std::vector<Violation> validate_scenario(const Scenario& scenario) {
    std::vector<Violation> out;
    auto error = [&](std::string code, std::string msg) {
        out.push_back({Violation::Severity::Error, std::move(code), std::move(msg)});
    };

    if (scenario.schema_version != 1) error("bad-schema-version", "schema_version must be 1");
    if (scenario.name.empty()) error("missing-name", "scenario name must be non-empty");
    if (scenario.road_length <= 0) error("bad-road-length", "road_length must be positive");
    if (scenario.dt <= 0) error("bad-dt", "dt must be positive");
    if (scenario.visibility_range < 0) error("bad-visibility", "visibility_range must be >= 0");
    if (scenario.params.v_max <= 0) error("bad-v-max", "params.v_max must be positive");
    if (scenario.params.a_max <= 0) error("bad-a-max", "params.a_max must be positive");
    if (scenario.params.t_lc <= 0) error("bad-t-lc", "params.t_lc must be positive");
    if (scenario.params.freshness_ticks < 0)
        error("bad-freshness", "params.freshness_ticks must be >= 0");

    std::set<std::string> ids;
    for (const VehicleState& v : scenario.vehicles) {
        if (!ids.insert(v.id.value()).second)
            error("duplicate-id", "duplicate vehicle id '" + v.id.value() + "'");
        if (v.x < 0 || v.x > scenario.road_length)
            error("vehicle-off-road", "vehicle '" + v.id.value() + "' outside [0, road_length]");
        if (v.v < 0 || v.v > scenario.params.v_max)
            error("bad-vehicle-speed", "vehicle '" + v.id.value() + "' speed outside [0, v_max]");
        if (std::abs(v.a) > scenario.params.a_max)
            error("bad-vehicle-accel", "vehicle '" + v.id.value() + "' |a| exceeds a_max");
        if (v.length <= 0)
            error("bad-vehicle-length", "vehicle '" + v.id.value() + "' length must be positive");
    }
    for (const Cps& c : scenario.cpses) {
        if (!ids.insert(c.id.value()).second)
            error("duplicate-id", "duplicate id '" + c.id.value() + "'");
        if (c.hosted_on && !std::any_of(scenario.vehicles.begin(), scenario.vehicles.end(),
                                        [&](const VehicleState& v) { return v.id == *c.hosted_on; }))
            error("unknown-host", "cps '" + c.id.value() + "' hosted on unknown vehicle");
        if (c.kind == CpsKind::Rsu && c.hosted_on)
            error("hosted-rsu", "rsu cps '" + c.id.value() + "' must not be hosted on a vehicle");
    }

    int drivers = 0;
    int adases = 0;
    const Cps* driver = nullptr;
    const Cps* adas = nullptr;
    for (const Cps& c : scenario.cpses) {
        if (c.kind == CpsKind::Driver) {
            ++drivers;
            driver = &c;
        }
        if (c.kind == CpsKind::Adas) {
            ++adases;
            adas = &c;
        }
    }
    if (drivers != 1 || adases != 1) {
        error("ego-pair", "scenario requires exactly one driver and one adas cps");
    } else if (driver->hosted_on && adas->hosted_on && !(*driver->hosted_on == *adas->hosted_on)) {
        error("ego-pair", "driver and adas must share the same ego vehicle");
    }

    for (const RsuSite& site : scenario.rsus) {
        const Cps* cps = scenario.find_cps(site.cps);
        if (!cps || cps->kind != CpsKind::Rsu)
            error("bad-rsu-site", "rsu site references '" + site.cps.value() + "' which is not an rsu cps");
        if (site.coverage_radius <= 0)
            error("bad-rsu-coverage", "rsu site coverage_radius must be positive");
        if (site.latency_ticks < 0) error("bad-rsu-latency", "rsu site latency_ticks must be >= 0");
        if (site.drop_probability < 0 || site.drop_probability > 1)
            error("bad-rsu-drop", "rsu site drop_probability outside [0,1]");
    }

    for (const auto& [id, policy] : scenario.driver_policies) {
        const Cps* cps = nullptr;
        for (const Cps& c : scenario.cpses)
            if (c.id.value() == id) cps = &c;
        if (!cps || cps->kind != CpsKind::Driver)
            error("bad-policy-key", "driver_policies key '" + id + "' is not a driver cps");
        try {
            policy.check();
        } catch (const std::invalid_argument& e) {
            error("bad-policy", "driver_policies['" + id + "']: " + e.what());
        }
    }

    std::vector<Activity> activities;
    if (auto activity = derive_activity(scenario)) activities.push_back(*activity);
    std::vector<GovernanceRule> rules = scenario.rules;
    if (scenario.default_rules && driver && adas && !(driver->id == adas->id))
        rules = default_overtaking_rules(driver->id, adas->id);
    for (Violation& v : validate_model(scenario.cpses, activities, rules))
        out.push_back(std::move(v));
    return out;
}

// ---------------------------------------------------------------------------
// View helpers

/// Best available picture from one CPS's own sensing plus delivered
/// information: self snapshots win, then the freshest relayed snapshot per
/// vehicle; the described interval is the hull.
inline Information merge_information(const Information& self,
                                     std::span<const Information> delivered, Tick now) {
    Information merged = self;
    merged.id = make_information_id(self.id, now, 0x7a3d);
    std::map<std::string, std::pair<VehicleSnapshot, Tick>> best;
    for (const VehicleSnapshot& s : self.snapshots)
        best.emplace(s.vehicle.value(), std::make_pair(s, std::numeric_limits<Tick>::max()));
    for (const Information& info : delivered) {
        merged.describes.road_from = std::min(merged.describes.road_from, info.describes.road_from);
        merged.describes.road_to = std::max(merged.describes.road_to, info.describes.road_to);
        for (const VehicleSnapshot& s : info.snapshots) {
            auto it = best.find(s.vehicle.value());
            if (it == best.end())
                best.emplace(s.vehicle.value(), std::make_pair(s, info.produced_at_tick));
            else if (info.produced_at_tick > it->second.second)
                it->second = std::make_pair(s, info.produced_at_tick);
        }
    }
    merged.snapshots.clear();
    for (const auto& [id, entry] : best) merged.snapshots.push_back(entry.first);
    return merged;
}

/// Conflict times against every oncoming vehicle visible in the view.
inline std::vector<double> conflicts_in_view(const Information& view, const OvertakePlan& plan) {
    std::vector<double> out;
    const VehicleSnapshot* ego = nullptr;
    for (const VehicleSnapshot& s : view.snapshots)
        if (s.vehicle == plan.ego) ego = &s;
    if (!ego) return out;
    for (const VehicleSnapshot& s : view.snapshots) {
        if (s.heading != Heading::Opposing || s.vehicle == plan.ego) continue;
        out.push_back(conflict_time(plan.target_speed, ego->position, s.position, s.speed));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Run loop

inline Trace run_simulation(const RunConfig& cfg) {
    const Scenario& scenario = cfg.scenario;
    if (cfg.max_ticks <= 0) throw configuration_error("max_ticks must be positive");
    {
        const std::vector<Violation> violations = validate_scenario(scenario);
        if (has_errors(violations)) {
            std::string msg = "invalid scenario '" + scenario.name + "':";
            for (const Violation& v : violations)
                if (v.severity == Violation::Severity::Error) msg += "\n  " + v.message;
            throw configuration_error(msg);
        }
    }

    const Cps driver = *scenario.find_cps_of_kind(CpsKind::Driver);
    const Cps adas = *scenario.find_cps_of_kind(CpsKind::Adas);
    const EntityId ego_id = *driver.hosted_on;

    WorldState world;
    world.tick = 0;
    world.dt = scenario.dt;
    world.vehicles = scenario.vehicles;
    world.rsus = scenario.rsus;
    world.visibility_range = scenario.visibility_range;
    world.road_length = scenario.road_length;

    const std::optional<Activity> activity = derive_activity(scenario);
    const std::vector<GovernanceRule> rules =
        scenario.default_rules ? default_overtaking_rules(driver.id, adas.id) : scenario.rules;
    const AuthorityMapping mapping;
    const SimParams& params = scenario.params;

    DriverPolicy policy;
    if (auto it = scenario.driver_policies.find(driver.id.value());
        it != scenario.driver_policies.end())
        policy = it->second;
    double ego_length = 5.0;
    for (const VehicleState& v : scenario.vehicles)
        if (v.id == ego_id) ego_length = v.length;

    DriverModel driver_model(policy, ego_id, ego_length);
    AdasController controller(driver.id);
    Rng driver_rng = derive_stream(cfg.seed, "driver:" + driver.id.value());
    std::map<std::string, Rng> rsu_rngs;
    for (const RsuSite& site : scenario.rsus)
        rsu_rngs.emplace(site.cps.value(), derive_stream(cfg.seed, "rsu:" + site.cps.value()));
    std::map<std::string, std::vector<Information>> mailboxes; // receiver cps id -> fresh infos

    OvertakePhase phase = OvertakePhase::Following;
    std::optional<OvertakePlan> active_plan;
    Tick initiation_tick = 0;
    double initiation_x = 0.0;
    std::vector<AdasEvent> previous_events;

    Trace trace;
    trace.header = {1, scenario.name, cfg.seed, scenario.overtake_type_label};

    for (Tick t = 0; t < cfg.max_ticks; ++t) {
        const VehicleState* ego = world.find_vehicle(ego_id);
        if (!ego) break; // the road ended for the ego

        // (1) RSU sensing and provision delivery.
        for (const RsuSite& site : world.rsus) {
            auto provisions =
                rsu_broadcast(world, site, {driver.id, adas.id}, rsu_rngs.at(site.cps.value()));
            for (auto& p : provisions) world.pending_provisions.push_back(std::move(p));
        }
        {
            std::vector<InformationProvision> still_pending;
            for (InformationProvision& p : world.pending_provisions) {
                if (p.dropped) continue;
                if (p.deliver_at_tick == t)
                    mailboxes[p.receiver.value()].push_back(p.info);
                else if (p.deliver_at_tick > t)
                    still_pending.push_back(std::move(p));
            }
            world.pending_provisions = std::move(still_pending);
            for (auto& [receiver, infos] : mailboxes) {
                std::erase_if(infos, [&](const Information& info) {
                    return t - info.produced_at_tick > params.freshness_ticks;
                });
            }
        }

        // (2) Self sensing.
        const Information driver_self = sense_self(world, driver);
        const Information adas_self = sense_self(world, adas);
        const Information system_view =
            merge_information(adas_self, mailboxes[adas.id.value()], t);

        // (3) Classification for the current or contemplated overtake.
        const bool live = activity.has_value() && !is_terminal_phase(phase);
        std::optional<OvertakePlan> plan;
        std::vector<double> conflicts;
        AdasMode mode = AdasMode::Off;
        AuthoritySet authorities = AuthoritySet::none();
        std::vector<PowerGrant> grants;
        std::optional<AutonomyEvalRec> eval;

        if (live) {
            if (phase == OvertakePhase::Following || phase == OvertakePhase::GapWait) {
                const VehicleState* target = world.find_vehicle(activity->target);
                if (target && target->lane == ego->lane && target->x > ego->x)
                    plan = plan_overtake(world, ego_id, activity->target, params);
            } else {
                plan = active_plan;
            }
        }
        if (plan) {
            const SphereOfAction soa{ego->x - params.zone_margin_back,
                                     ego->x + plan->required_displacement + params.zone_margin_front,
                                     LaneSet::both(), t, t};
            const AwarenessKind awareness = classify_awareness(
                driver, soa, driver_self, mailboxes[driver.id.value()], t, params.freshness_ticks);
            conflicts = conflicts_in_view(system_view, *plan);
            const ControllabilityLevel controllability =
                classify_controllability(*plan, conflicts, params.safety_margin);
            const AutonomyLevel autonomy = derive_autonomy(awareness, controllability);

            // (4) Governance: rules -> grants -> authorities -> mode.
            const GovernanceContext ctx{driver.id, activity->id, ActivityKind::Overtake,
                                        awareness,  controllability, t};
            grants = evaluate_rules(rules, ctx);
            authorities = authorities_of(grants, mapping, adas.id, driver.id);
            mode = adas_mode_for(autonomy, authorities);
            if (cfg.forced_mode) mode = *cfg.forced_mode;
            eval = AutonomyEvalRec{driver.id, activity->id, awareness, controllability, autonomy};
        }

        // (5) Driver decision, on the driver's own information basis.
        DriverInputs din;
        din.now = t;
        din.perception = uses_delivered_information(policy.kind)
                             ? merge_information(driver_self, mailboxes[driver.id.value()], t)
                             : driver_self;
        din.warnings = previous_events;
        din.phase = phase;
        din.plan = plan;
        if (activity) {
            for (const VehicleSnapshot& s : din.perception.snapshots)
                if (s.vehicle == activity->target) din.target = s;
        }
        din.dt = world.dt;
        const DriverAction action = driver_model.decide(din, params, driver_rng);
        if (live && phase == OvertakePhase::Following && driver_model.overtake_need())
            phase = OvertakePhase::GapWait;

        // (6) Gate checks and governance-confined intervention.
        GateResults gates;
        if (plan) {
            switch (phase) {
                case OvertakePhase::GapWait:
                    gates.s1 = gate_s1(*plan, conflicts, params.safety_margin);
                    break;
                case OvertakePhase::Initiating: {
                    const double elapsed = static_cast<double>(t - initiation_tick) * world.dt;
                    const double remaining = std::max(plan->estimated_duration - elapsed, 0.0);
                    gates.s2 = gate_s2(system_view, *plan, remaining, params);
                    break;
                }
                case OvertakePhase::Passing:
                    gates.s3 = gate_s3(system_view, *plan, ego->x - initiation_x, params);
                    break;
                case OvertakePhase::Returning: {
                    const VehicleState* target = world.find_vehicle(plan->preceding);
                    if (target) {
                        double nearest = kInfinity;
                        for (double c : conflicts) nearest = std::min(nearest, c);
                        gates.s4 = gate_s4(system_view, *ego, *target, nearest, params);
                    } else {
                        gates.s4 = GateS4::AllowReturn;
                    }
                    break;
                }
                default:
                    break;
            }
        }

        const OvertakePhase phase_before_adas = phase;
        AdasOutcome outcome;
        outcome.phase = phase;
        if (live) outcome = controller.tick(t, mode, authorities, phase, gates, action, params);
        if (phase != OvertakePhase::Initiating && outcome.phase == OvertakePhase::Initiating) {
            active_plan = plan;
            initiation_tick = t;
            initiation_x = ego->x;
        }
        const bool blocked_now = outcome.phase == OvertakePhase::Blocked && phase != OvertakePhase::Blocked;
        phase = outcome.phase;

        // (7) Effective actions: the override wins, everyone else is scripted.
        std::map<std::string, VehicleAction> actions;
        for (const VehicleState& v : world.vehicles) {
            if (v.id == ego_id) {
                VehicleAction ea;
                if (mode == AdasMode::Active && phase == OvertakePhase::Aborting) {
                    const VehicleSnapshot* preceding = nullptr;
                    if (plan)
                        for (const VehicleSnapshot& s : system_view.snapshots)
                            if (s.vehicle == plan->preceding) preceding = &s;
                    ea = abort_maneuver_action(*ego, preceding, params, world.dt);
                } else {
                    ea.accel = action.accel;
                    ea.lane_change = action.lane_change_request;
                    if (outcome.override_action == ControlAction::PreventLaneChange)
                        ea.lane_change.reset();
                    if (outcome.override_action == ControlAction::StopAcceleration)
                        ea.accel = std::min(ea.accel, 0.0);
                }
                actions[v.id.value()] = ea;
            } else {
                actions[v.id.value()] = VehicleAction{0.0, std::nullopt};
            }
        }
        world = step_world(world, actions, params);

        // (8) Mechanical phase progression, zones, collisions.
        ego = world.find_vehicle(ego_id);
        const VehicleState* target_now =
            activity ? world.find_vehicle(activity->target) : nullptr;
        std::vector<OutcomeRec> outcomes;
        if (blocked_now) outcomes.push_back({OutcomeRec::Kind::Blocked});
        if (ego) {
            switch (phase) {
                case OvertakePhase::Initiating:
                    if (ego->lane == Lane::Opposing) phase = OvertakePhase::Passing;
                    break;
                case OvertakePhase::Passing:
                    if (!target_now || ego->x > target_now->front())
                        phase = OvertakePhase::Returning;
                    break;
                case OvertakePhase::Returning:
                    if (ego->lane == Lane::Original) {
                        phase = OvertakePhase::Completed;
                        outcomes.push_back({OutcomeRec::Kind::Completed});
                    }
                    break;
                case OvertakePhase::Aborting:
                    if (phase_before_adas == OvertakePhase::Aborting &&
                        ego->lane == Lane::Original) {
                        phase = OvertakePhase::Following;
                        outcomes.push_back({OutcomeRec::Kind::Aborted});
                    }
                    break;
                default:
                    break;
            }
        }

        const std::optional<std::pair<OvertakePlan, OvertakePhase>> zone_context =
            active_plan && phase_occupies_opposing(phase)
                ? std::optional(std::make_pair(*active_plan, phase))
                : std::nullopt;
        const auto collisions = detect_collisions(world);

        // (9) Trace append: eval, grants, adas events, snapshot, outcomes,
        // collisions last.
        if (eval) trace.events.push_back({t, *eval});
        for (const PowerGrant& g : grants) trace.events.push_back({t, PowerGrantRec{g}});
        for (const AdasEvent& e : outcome.events) trace.events.push_back({t, AdasEventRec{e}});
        StateSnapshotRec snapshot;
        snapshot.phase = phase;
        snapshot.mode = mode;
        for (const VehicleState& v : world.vehicles) {
            snapshot.vehicles.push_back({v.id, v.lane, v.heading, quantize6(v.x), quantize6(v.v),
                                         classify_zone(world, v.id, zone_context, params)});
        }
        trace.events.push_back({t, std::move(snapshot)});
        for (const OutcomeRec& o : outcomes) trace.events.push_back({t, o});
        for (const auto& [a, b] : collisions) trace.events.push_back({t, CollisionRec{a, b}});

        previous_events = outcome.events;
        if (!collisions.empty()) break; // post-collision dynamics are out of model
    }
    return trace;
}

} // namespace govsim
