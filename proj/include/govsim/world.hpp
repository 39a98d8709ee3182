#pragma once

// Discrete-time kinematic world for a two-lane undivided road: longitudinal
// motion, lane-change progress, self/RSU sensing, awareness/controllability
// classification, zone classification, and collision detection.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "govsim/core_model.hpp"
#include "govsim/overtake_phase.hpp"
#include "govsim/rng.hpp"

namespace govsim {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Scenario-level tuning knobs. Defaults are the values the shipped scenarios
/// and worked examples rely on.
struct SimParams {
    double v_max = 33.0;             // m/s
    double a_max = 3.0;              // m/s^2
    double t_lc = 3.0;               // lane-change duration, seconds
    double safety_margin = 3.0;      // controllability margin, seconds
    double d_return = 15.0;          // return gap floor, meters
    double headway = 1.0;            // return gap headway, seconds
    double warning_margin = 100.0;   // zone margin around the occupied segment, meters
    int freshness_ticks = 10;        // max age of delivered information
    double zone_margin_back = 10.0;  // occupied segment extension behind the ego
    double zone_margin_front = 10.0; // occupied segment extension past the plan end
    double critical_conflict = 3.0;  // gate S4 halt threshold, seconds
    int block_limit = 3;             // blocked initiations before the driver gives up
    double need_speed_delta = 3.0;   // preceding this much slower than desired => need
    int need_ticks = 20;             // consecutive ticks before the need is established
    double abort_decel = 2.0;        // m/s^2 during the abort maneuver
    double follow_range = 80.0;      // max gap for need detection, meters

    friend bool operator==(const SimParams&, const SimParams&) = default;
};

struct LaneChangeProgress {
    Lane target = Lane::Original;
    int ticks_sustained = 0;

    friend bool operator==(const LaneChangeProgress&, const LaneChangeProgress&) = default;
};

struct VehicleState {
    EntityId id;
    Lane lane = Lane::Original;
    Heading heading = Heading::Forward;
    double x = 0.0;       // rear bumper, meters along the road axis
    double v = 0.0;       // m/s, non-negative
    double a = 0.0;       // m/s^2
    double length = 5.0;  // meters
    std::optional<LaneChangeProgress> lane_change;

    double front() const { return x + length; }

    friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

struct RsuSite {
    EntityId cps;
    double position = 0.0;
    double coverage_radius = 500.0;
    int latency_ticks = 0;
    double drop_probability = 0.0;

    friend bool operator==(const RsuSite&, const RsuSite&) = default;
};

struct WorldState {
    Tick tick = 0;
    double dt = 0.1;
    std::vector<VehicleState> vehicles;
    std::vector<RsuSite> rsus;
    double visibility_range = 200.0;
    double road_length = 1000.0;
    std::vector<InformationProvision> pending_provisions;

    const VehicleState* find_vehicle(const EntityId& id) const {
        for (const VehicleState& v : vehicles)
            if (v.id == id) return &v;
        return nullptr;
    }
};

enum class Zone { Safe, Warning, Danger };

inline std::string_view to_string(Zone z) {
    switch (z) {
        case Zone::Safe: return "safe";
        case Zone::Warning: return "warning";
        case Zone::Danger: return "danger";
    }
    return "?";
}

/// The geometry and timing of a contemplated overtake, computed once and then
/// carried through the gates. An infeasible plan (closing speed below 2 m/s)
/// is always classified Uncontrollable.
struct OvertakePlan {
    EntityId ego;
    EntityId preceding;
    double target_speed = 0.0;
    double required_displacement = 0.0;
    double estimated_duration = kInfinity;  // seconds; infinite when infeasible
    double closing_speed = 0.0;             // target_speed - preceding speed at plan time
    bool feasible = false;

    friend bool operator==(const OvertakePlan&, const OvertakePlan&) = default;
};

/// Per-vehicle command applied by step_world.
struct VehicleAction {
    double accel = 0.0;
    std::optional<Lane> lane_change;
};

// ---------------------------------------------------------------------------
// Kinematics

/// Advances the world one tick. Speeds clamp to [0, v_max]; displacement uses
/// the pre-clamp speed and signed half-a-dt^2 term. Lane changes complete after
/// t_lc seconds of sustained request; interrupting a request resets progress.
/// Vehicles whose rear bumper leaves [0, road_length] are retired.
inline WorldState step_world(const WorldState& world,
                             const std::map<std::string, VehicleAction>& actions,
                             const SimParams& params) {
    for (const auto& [id, action] : actions) {
        bool known = false;
        for (const VehicleState& v : world.vehicles) known |= v.id.value() == id;
        if (!known) throw std::invalid_argument("step_world: action for unknown vehicle '" + id + "'");
        if (std::abs(action.accel) > params.a_max + 1e-9)
            throw std::invalid_argument("step_world: |accel| exceeds a_max for '" + id + "'");
    }

    WorldState next = world;
    next.tick = world.tick + 1;
    next.vehicles.clear();

    const int lc_ticks_needed = static_cast<int>(std::ceil(params.t_lc / world.dt - 1e-9));
    for (const VehicleState& v : world.vehicles) {
        VehicleState nv = v;
        const auto it = actions.find(v.id.value());
        const double a = it != actions.end() ? it->second.accel : 0.0;
        const std::optional<Lane> lc_request =
            it != actions.end() ? it->second.lane_change : std::nullopt;

        const double sign = v.heading == Heading::Forward ? 1.0 : -1.0;
        nv.a = a;
        nv.v = std::clamp(v.v + a * world.dt, 0.0, params.v_max);
        nv.x = v.x + sign * (v.v * world.dt + 0.5 * a * world.dt * world.dt);

        if (lc_request && *lc_request != v.lane) {
            if (nv.lane_change && nv.lane_change->target == *lc_request) {
                nv.lane_change->ticks_sustained += 1;
            } else {
                nv.lane_change = LaneChangeProgress{*lc_request, 1};
            }
            if (nv.lane_change->ticks_sustained >= lc_ticks_needed) {
                nv.lane = nv.lane_change->target;
                nv.lane_change.reset();
            }
        } else {
            nv.lane_change.reset();
        }

        if (nv.x >= 0.0 && nv.x <= world.road_length) next.vehicles.push_back(std::move(nv));
    }
    return next;
}

// ---------------------------------------------------------------------------
// Sensing and information

inline EntityId make_information_id(const EntityId& producer, Tick tick, std::uint64_t salt) {
    char buf[40];
    std::uint64_t h = fnv1a64(producer.value()) ^ (static_cast<std::uint64_t>(tick) * 0x9e3779b97f4a7c15ULL) ^ salt;
    std::snprintf(buf, sizeof buf, "inf-%016llx", static_cast<unsigned long long>(h));
    return EntityId(buf);
}

/// Snapshot of every vehicle within min(sensing_range, visibility_range)
/// meters of the observer's host vehicle. The description covers exactly that
/// interval. Snapshots are ordered by vehicle id.
inline Information sense_self(const WorldState& world, const Cps& observer) {
    if (!observer.hosted_on)
        throw std::invalid_argument("sense_self: observer '" + observer.id.value() +
                                    "' is not hosted on a vehicle");
    const VehicleState* host = world.find_vehicle(*observer.hosted_on);
    if (!host)
        throw std::invalid_argument("sense_self: host vehicle '" + observer.hosted_on->value() +
                                    "' not in world");

    const double range = std::min(observer.sensing_range, world.visibility_range);
    Information info{make_information_id(observer.id, world.tick, 0x5e1f),
                     SphereOfAction{host->x - range, host->x + range, LaneSet::both(),
                                    world.tick, world.tick},
                     {},
                     world.tick};
    for (const VehicleState& v : world.vehicles) {
        if (std::abs(v.x - host->x) <= range)
            info.snapshots.push_back({v.id, v.lane, v.x, v.v, v.heading});
    }
    std::sort(info.snapshots.begin(), info.snapshots.end(),
              [](const VehicleSnapshot& a, const VehicleSnapshot& b) {
                  return a.vehicle < b.vehicle;
              });
    return info;
}

/// One provision per receiver describing the RSU's coverage interval. Drop
/// decisions are drawn once per provision in receiver id order, so a fixed
/// seed replays bit-identically.
inline std::vector<InformationProvision> rsu_broadcast(const WorldState& world,
                                                       const RsuSite& site,
                                                       std::vector<EntityId> receivers,
                                                       Rng& rng) {
    std::sort(receivers.begin(), receivers.end());

    Information info{make_information_id(site.cps, world.tick, 0xb10c),
                     SphereOfAction{site.position - site.coverage_radius,
                                    site.position + site.coverage_radius, LaneSet::both(),
                                    world.tick, world.tick},
                     {},
                     world.tick};
    for (const VehicleState& v : world.vehicles) {
        if (std::abs(v.x - site.position) <= site.coverage_radius)
            info.snapshots.push_back({v.id, v.lane, v.x, v.v, v.heading});
    }
    std::sort(info.snapshots.begin(), info.snapshots.end(),
              [](const VehicleSnapshot& a, const VehicleSnapshot& b) {
                  return a.vehicle < b.vehicle;
              });

    std::vector<InformationProvision> provisions;
    provisions.reserve(receivers.size());
    for (const EntityId& receiver : receivers) {
        InformationProvision p{site.cps, receiver, info, world.tick,
                               world.tick + site.latency_ticks, false};
        p.dropped = rng.uniform01() < site.drop_probability;
        provisions.push_back(std::move(p));
    }
    return provisions;
}

/// BySelf when own sensing covers the sphere of action; otherwise ByDependency
/// when some delivered information covers it and is fresh; otherwise Unaware.
inline AwarenessKind classify_awareness(const Cps& /*subject*/, const SphereOfAction& soa,
                                        const Information& self_info,
                                        std::span<const Information> delivered, Tick now,
                                        int freshness_ticks) {
    if (self_info.covers(soa)) return AwarenessKind::BySelf;
    for (const Information& info : delivered) {
        if (info.covers(soa) && now - info.produced_at_tick <= freshness_ticks)
            return AwarenessKind::ByDependency;
    }
    return AwarenessKind::Unaware;
}

// ---------------------------------------------------------------------------
// Overtake planning and classification

/// Closing time until an oncoming vehicle reaches the ego, computed against
/// the plan's target speed. Infinite when the vehicle is at or behind the ego.
inline double conflict_time(double target_speed, double x_ego, double x_opposing,
                            double v_opposing) {
    if (x_opposing <= x_ego) return kInfinity;
    return (x_opposing - x_ego) / (target_speed + v_opposing);
}

inline OvertakePlan plan_overtake(const WorldState& world, const EntityId& ego,
                                  const EntityId& preceding, const SimParams& params) {
    const VehicleState* e = world.find_vehicle(ego);
    const VehicleState* p = world.find_vehicle(preceding);
    if (!e || !p) throw std::invalid_argument("plan_overtake: unknown vehicle id");
    if (p->lane != e->lane)
        throw std::invalid_argument("plan_overtake: preceding vehicle not in ego's lane");
    if (p->x <= e->x)
        throw std::invalid_argument("plan_overtake: preceding vehicle is behind ego");

    OvertakePlan plan;
    plan.ego = ego;
    plan.preceding = preceding;
    plan.target_speed = std::min(e->v + 5.0, params.v_max);
    plan.required_displacement = (p->x - e->x) + p->length + params.d_return;
    plan.closing_speed = plan.target_speed - p->v;
    plan.feasible = plan.closing_speed >= 2.0;
    plan.estimated_duration =
        plan.feasible
            ? params.t_lc + plan.required_displacement / plan.closing_speed + params.t_lc
            : kInfinity;
    return plan;
}

inline double time_to_conflict(const OvertakePlan& plan, const VehicleState& ego,
                               const VehicleState& opposing) {
    if (opposing.heading != Heading::Opposing)
        throw std::invalid_argument("time_to_conflict: vehicle is not oncoming");
    return conflict_time(plan.target_speed, ego.x, opposing.x, opposing.v);
}

/// Controllable iff the plan is feasible and every conflict clears the
/// estimated duration plus the safety margin.
inline ControllabilityLevel classify_controllability(const OvertakePlan& plan,
                                                     std::span<const double> conflicts,
                                                     double margin_s) {
    if (!plan.feasible) return ControllabilityLevel::Uncontrollable;
    double nearest = kInfinity;
    for (double c : conflicts) nearest = std::min(nearest, c);
    return nearest > plan.estimated_duration + margin_s ? ControllabilityLevel::Controllable
                                                        : ControllabilityLevel::Uncontrollable;
}

/// Road segment occupied by an overtake in progress, relative to the ego's
/// current position.
struct OccupiedSegment {
    double from = 0.0;
    double to = 0.0;
};

inline OccupiedSegment occupied_segment(double x_ego, const OvertakePlan& plan,
                                        const SimParams& params) {
    return {x_ego - params.zone_margin_back,
            x_ego + plan.required_displacement + params.zone_margin_front};
}

/// Zone of one vehicle given the (single) overtake in progress. Safe for
/// everyone when no maneuver is occupying the opposing lane.
inline Zone classify_zone(const WorldState& world, const EntityId& vehicle,
                          const std::optional<std::pair<OvertakePlan, OvertakePhase>>& active,
                          const SimParams& params) {
    const VehicleState* v = world.find_vehicle(vehicle);
    if (!v) return Zone::Safe;
    if (!active || !phase_occupies_opposing(active->second)) return Zone::Safe;
    const VehicleState* ego = world.find_vehicle(active->first.ego);
    if (!ego) return Zone::Safe;

    const OccupiedSegment seg = occupied_segment(ego->x, active->first, params);
    const double overlap = std::min(v->front(), seg.to) - std::max(v->x, seg.from);
    if (v->lane == Lane::Opposing && overlap > 0.0) return Zone::Danger;

    const double distance =
        std::max({seg.from - v->front(), v->x - seg.to, 0.0});
    if (distance <= params.warning_margin) return Zone::Warning;
    return Zone::Safe;
}

/// Same-lane body overlaps, strictly positive (touching bumpers is not a
/// collision). Pairs are reported once, lexicographically ordered.
inline std::vector<std::pair<EntityId, EntityId>> detect_collisions(const WorldState& world) {
    std::vector<std::pair<EntityId, EntityId>> out;
    for (size_t i = 0; i < world.vehicles.size(); ++i) {
        for (size_t j = i + 1; j < world.vehicles.size(); ++j) {
            const VehicleState& a = world.vehicles[i];
            const VehicleState& b = world.vehicles[j];
            if (a.lane != b.lane) continue;
            const double overlap = std::min(a.front(), b.front()) - std::max(a.x, b.x);
            if (overlap > 0.0) {
                if (a.id < b.id)
                    out.emplace_back(a.id, b.id);
                else
                    out.emplace_back(b.id, a.id);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace govsim
