#pragma once

// The S1-S4 overtaking gate checks and the per-tick intervention logic,
// strictly confined by the authority set granted for the current tick:
// Monitor needs Monitoring, Warn needs Warning, Control needs Controlling.
// Emitting a control without Controlling authority is a hard fault.

#include <optional>
#include <stdexcept>
#include <vector>

#include "govsim/core_model.hpp"
#include "govsim/driver_action.hpp"
#include "govsim/overtake_phase.hpp"
#include "govsim/world.hpp"

namespace govsim {

enum class AdasMode { Off, Passive, Active };

inline std::string_view to_string(AdasMode m) {
    switch (m) {
        case AdasMode::Off: return "off";
        case AdasMode::Passive: return "passive";
        case AdasMode::Active: return "active";
    }
    return "?";
}

inline std::optional<AdasMode> mode_from_string(std::string_view s) {
    if (s == "off") return AdasMode::Off;
    if (s == "passive") return AdasMode::Passive;
    if (s == "active") return AdasMode::Active;
    return std::nullopt;
}

enum class ControlAction {
    BlockInitiation,
    StopAcceleration,
    PreventLaneChange,
    HaltAndReturn,
    SpeedReduction,
};

enum class WarnReason {
    UnsafeGap,              // S1: opposing traffic too close to initiate
    OpposingTraffic,        // S2: conflict detected while initiating
    CannotComplete,         // S3: pass can no longer finish in time
    InsufficientReturnGap,  // S4: no adequate space in front of the preceding vehicle
};

inline std::string_view to_string(ControlAction a) {
    switch (a) {
        case ControlAction::BlockInitiation: return "block_initiation";
        case ControlAction::StopAcceleration: return "stop_acceleration";
        case ControlAction::PreventLaneChange: return "prevent_lane_change";
        case ControlAction::HaltAndReturn: return "halt_and_return";
        case ControlAction::SpeedReduction: return "speed_reduction";
    }
    return "?";
}

inline std::optional<ControlAction> control_action_from_string(std::string_view s) {
    if (s == "block_initiation") return ControlAction::BlockInitiation;
    if (s == "stop_acceleration") return ControlAction::StopAcceleration;
    if (s == "prevent_lane_change") return ControlAction::PreventLaneChange;
    if (s == "halt_and_return") return ControlAction::HaltAndReturn;
    if (s == "speed_reduction") return ControlAction::SpeedReduction;
    return std::nullopt;
}

inline std::string_view to_string(WarnReason r) {
    switch (r) {
        case WarnReason::UnsafeGap: return "unsafe_gap";
        case WarnReason::OpposingTraffic: return "opposing_traffic";
        case WarnReason::CannotComplete: return "cannot_complete";
        case WarnReason::InsufficientReturnGap: return "insufficient_return_gap";
    }
    return "?";
}

inline std::optional<WarnReason> warn_reason_from_string(std::string_view s) {
    if (s == "unsafe_gap") return WarnReason::UnsafeGap;
    if (s == "opposing_traffic") return WarnReason::OpposingTraffic;
    if (s == "cannot_complete") return WarnReason::CannotComplete;
    if (s == "insufficient_return_gap") return WarnReason::InsufficientReturnGap;
    return std::nullopt;
}

struct AdasEvent {
    enum class Kind { Monitor, Warn, Control };

    Tick tick = 0;
    Kind kind = Kind::Monitor;
    EntityId subject;
    std::optional<WarnReason> reason;    // Warn only
    std::optional<ControlAction> action; // Control only, exactly one

    friend bool operator==(const AdasEvent&, const AdasEvent&) = default;
};

inline std::string_view to_string(AdasEvent::Kind k) {
    switch (k) {
        case AdasEvent::Kind::Monitor: return "monitor";
        case AdasEvent::Kind::Warn: return "warn";
        case AdasEvent::Kind::Control: return "control";
    }
    return "?";
}

class governance_inconsistency_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class governance_violation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mode table: Full -> Off, Partial -> Passive (needs Monitoring+Warning),
/// Limited -> Active (needs Controlling). Insufficient authorities for the
/// mode are a governance inconsistency.
inline AdasMode adas_mode_for(AutonomyLevel autonomy, const AuthoritySet& authorities) {
    switch (autonomy) {
        case AutonomyLevel::Full: return AdasMode::Off;
        case AutonomyLevel::Partial:
            if (!authorities.contains(AuthorityKind::Monitoring) ||
                !authorities.contains(AuthorityKind::Warning))
                throw governance_inconsistency_error(
                    "Partial autonomy requires Monitoring and Warning authorities");
            return AdasMode::Passive;
        case AutonomyLevel::Limited:
            if (!authorities.contains(AuthorityKind::Controlling))
                throw governance_inconsistency_error(
                    "Limited autonomy requires Controlling authority");
            return AdasMode::Active;
    }
    throw governance_inconsistency_error("unreachable autonomy level");
}

// ---------------------------------------------------------------------------
// Gates

enum class GateS1 { Allow, Reject };
enum class GateS2 { Allow, Abort };
enum class GateS3 { Allow, HaltReturn };
enum class GateS4 { AllowReturn, WaitWarn, HaltReturn };

/// S1: allow initiation iff the maneuver is controllable against the sensed
/// conflicts.
inline GateS1 gate_s1(const OvertakePlan& plan, std::span<const double> conflicts,
                      double margin_s) {
    return classify_controllability(plan, conflicts, margin_s) ==
                   ControllabilityLevel::Controllable
               ? GateS1::Allow
               : GateS1::Reject;
}

namespace detail {

inline const VehicleSnapshot* find_snapshot(const Information& view, const EntityId& id) {
    for (const VehicleSnapshot& s : view.snapshots)
        if (s.vehicle == id) return &s;
    return nullptr;
}

/// Nearest conflict over the oncoming vehicles in a view, measured from the
/// ego snapshot against the plan's target speed.
inline double min_conflict_in_view(const Information& view, const OvertakePlan& plan) {
    const VehicleSnapshot* ego = find_snapshot(view, plan.ego);
    if (!ego) return kInfinity;
    double nearest = kInfinity;
    for (const VehicleSnapshot& s : view.snapshots) {
        if (s.heading != Heading::Opposing || s.vehicle == plan.ego) continue;
        nearest = std::min(nearest, conflict_time(plan.target_speed, ego->position, s.position, s.speed));
    }
    return nearest;
}

} // namespace detail

/// S2: while initiating, abort if any oncoming vehicle closes faster than the
/// remaining maneuver plus margin, or if anything already occupies the
/// opposing lane inside the occupied segment.
inline GateS2 gate_s2(const Information& view, const OvertakePlan& plan,
                      double remaining_duration_s, const SimParams& params) {
    const VehicleSnapshot* ego = detail::find_snapshot(view, plan.ego);
    if (!ego) return GateS2::Allow;
    if (detail::min_conflict_in_view(view, plan) < remaining_duration_s + params.safety_margin)
        return GateS2::Abort;
    const OccupiedSegment seg = occupied_segment(ego->position, plan, params);
    for (const VehicleSnapshot& s : view.snapshots) {
        if (s.vehicle == plan.ego || s.lane != Lane::Opposing) continue;
        if (s.position >= seg.from && s.position <= seg.to) return GateS2::Abort;
    }
    return GateS2::Allow;
}

/// S3: while passing, recompute the remaining duration from the remaining
/// displacement and halt if the nearest conflict undercuts it plus margin.
inline GateS3 gate_s3(const Information& view, const OvertakePlan& plan, double progress_m,
                      const SimParams& params) {
    const double remaining_m = std::max(plan.required_displacement - progress_m, 0.0);
    const double remaining_s =
        plan.closing_speed > 0.0 ? remaining_m / plan.closing_speed + params.t_lc : kInfinity;
    if (detail::min_conflict_in_view(view, plan) < remaining_s + params.safety_margin)
        return GateS3::HaltReturn;
    return GateS3::Allow;
}

/// S4: allow the return iff the gap in front of the preceding vehicle is at
/// least max(d_return, headway * v_ego); otherwise halt when an oncoming
/// vehicle is critically close, else warn and wait.
inline GateS4 gate_s4(const Information& /*view*/, const VehicleState& ego,
                      const VehicleState& preceding, double opposing_conflict_s,
                      const SimParams& params) {
    const double gap = ego.x - preceding.front();
    const double required = std::max(params.d_return, params.headway * ego.v);
    if (gap >= required) return GateS4::AllowReturn;
    if (opposing_conflict_s < params.critical_conflict) return GateS4::HaltReturn;
    return GateS4::WaitWarn;
}

// ---------------------------------------------------------------------------
// Per-tick controller

struct GateResults {
    std::optional<GateS1> s1;
    std::optional<GateS2> s2;
    std::optional<GateS3> s3;
    std::optional<GateS4> s4;
};

struct AdasOutcome {
    std::vector<AdasEvent> events;
    std::optional<ControlAction> override_action;
    OvertakePhase phase = OvertakePhase::Following;
};

/// Fixed return maneuver used while aborting: shed speed until safely behind
/// the preceding vehicle, then merge back into the original lane.
inline VehicleAction abort_maneuver_action(const VehicleState& ego,
                                           const VehicleSnapshot* preceding,
                                           const SimParams& params, double dt) {
    VehicleAction action;
    const bool clear_behind = !preceding || ego.front() + 5.0 <= preceding->position;
    if (ego.lane == Lane::Opposing && clear_behind) {
        action.lane_change = Lane::Original;
        action.accel = 0.0;
    } else {
        action.accel = std::max(-params.abort_decel, -ego.v / dt);
    }
    return action;
}

/// Applies one tick of governance-confined assistance. Owns the one-tick
/// persistence memory ("driver persists" means repeating the gated action on
/// the tick right after a warning) and the block counter; one instance per
/// (driver, activity) pair.
class AdasController {
public:
    explicit AdasController(EntityId subject) : subject_(std::move(subject)) {}

    AdasOutcome tick(Tick now, AdasMode mode, const AuthoritySet& authorities,
                     OvertakePhase phase, const GateResults& gates, const DriverAction& action,
                     const SimParams& params) {
        action.check();
        AdasOutcome out;
        out.phase = natural_phase(phase, action);

        if (mode == AdasMode::Off) {
            warned_s1_last_tick_ = false;
            return out;
        }

        if (authorities.contains(AuthorityKind::Monitoring))
            out.events.push_back({now, AdasEvent::Kind::Monitor, subject_, {}, {}});

        bool s1_warned_now = false;
        switch (phase) {
            case OvertakePhase::GapWait:
                if (gates.s1 && *gates.s1 == GateS1::Reject) {
                    warn(out, now, authorities, WarnReason::UnsafeGap);
                    s1_warned_now = true;
                    if (mode == AdasMode::Active) {
                        out.phase = OvertakePhase::GapWait; // initiation requires ADAS approval
                        if (action.initiate_overtake && warned_s1_last_tick_) {
                            control(out, now, authorities, ControlAction::BlockInitiation);
                            blocks_ += 1;
                            if (blocks_ >= params.block_limit) out.phase = OvertakePhase::Blocked;
                        }
                    }
                }
                break;
            case OvertakePhase::Initiating:
                if (gates.s2 && *gates.s2 == GateS2::Abort) {
                    warn(out, now, authorities, WarnReason::OpposingTraffic);
                    if (mode == AdasMode::Active) {
                        control(out, now, authorities, ControlAction::StopAcceleration);
                        control(out, now, authorities, ControlAction::PreventLaneChange);
                        out.override_action = ControlAction::StopAcceleration;
                        out.phase = OvertakePhase::Aborting;
                    }
                }
                break;
            case OvertakePhase::Passing:
                if (gates.s3 && *gates.s3 == GateS3::HaltReturn) {
                    warn(out, now, authorities, WarnReason::CannotComplete);
                    if (mode == AdasMode::Active) {
                        control(out, now, authorities, ControlAction::HaltAndReturn);
                        out.override_action = ControlAction::HaltAndReturn;
                        out.phase = OvertakePhase::Aborting;
                    }
                }
                break;
            case OvertakePhase::Returning:
                if (gates.s4 && *gates.s4 == GateS4::WaitWarn) {
                    warn(out, now, authorities, WarnReason::InsufficientReturnGap);
                    if (mode == AdasMode::Active && action.lane_change_request) {
                        control(out, now, authorities, ControlAction::PreventLaneChange);
                        out.override_action = ControlAction::PreventLaneChange;
                    }
                } else if (gates.s4 && *gates.s4 == GateS4::HaltReturn) {
                    warn(out, now, authorities, WarnReason::InsufficientReturnGap);
                    if (mode == AdasMode::Active) {
                        control(out, now, authorities, ControlAction::HaltAndReturn);
                        out.override_action = ControlAction::HaltAndReturn;
                        out.phase = OvertakePhase::Aborting;
                    }
                }
                break;
            case OvertakePhase::Aborting:
                if (mode == AdasMode::Active) {
                    control(out, now, authorities, ControlAction::SpeedReduction);
                    out.override_action = ControlAction::SpeedReduction;
                }
                break;
            default:
                break;
        }

        warned_s1_last_tick_ = s1_warned_now;
        return out;
    }

    int blocks() const { return blocks_; }

private:
    static OvertakePhase natural_phase(OvertakePhase phase, const DriverAction& action) {
        if (phase == OvertakePhase::GapWait && action.initiate_overtake)
            return OvertakePhase::Initiating;
        if ((phase == OvertakePhase::Initiating || phase == OvertakePhase::Passing ||
             phase == OvertakePhase::Returning) &&
            action.abort_overtake)
            return OvertakePhase::Aborting;
        return phase;
    }

    void warn(AdasOutcome& out, Tick now, const AuthoritySet& authorities, WarnReason reason) {
        if (!authorities.contains(AuthorityKind::Warning)) return;
        out.events.push_back({now, AdasEvent::Kind::Warn, subject_, reason, {}});
    }

    void control(AdasOutcome& out, Tick now, const AuthoritySet& authorities,
                 ControlAction what) {
        if (!authorities.contains(AuthorityKind::Controlling))
            throw governance_violation_error("control '" + std::string(to_string(what)) +
                                             "' without Controlling authority");
        out.events.push_back({now, AdasEvent::Kind::Control, subject_, {}, what});
    }

    EntityId subject_;
    bool warned_s1_last_tick_ = false;
    int blocks_ = 0;
};

} // namespace govsim
