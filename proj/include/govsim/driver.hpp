#pragma once

// Scripted driver policies. Each driver judges gaps from its own (noisy)
// perception, decides when the overtake is needed, and reacts to warnings
// according to its compliance probability. All randomness comes from the
// driver's own stream, so runs replay exactly.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "govsim/adas.hpp"
#include "govsim/driver_action.hpp"
#include "govsim/rng.hpp"
#include "govsim/world.hpp"

namespace govsim {

enum class DriverKind { Compliant, Oblivious, Aggressive };

inline std::string_view to_string(DriverKind k) {
    switch (k) {
        case DriverKind::Compliant: return "compliant";
        case DriverKind::Oblivious: return "oblivious";
        case DriverKind::Aggressive: return "aggressive";
    }
    return "?";
}

inline std::optional<DriverKind> driver_kind_from_string(std::string_view s) {
    if (s == "compliant") return DriverKind::Compliant;
    if (s == "oblivious") return DriverKind::Oblivious;
    if (s == "aggressive") return DriverKind::Aggressive;
    return std::nullopt;
}

struct DriverPolicy {
    DriverKind kind = DriverKind::Compliant;
    double desired_speed = 27.0;          // m/s
    double gap_acceptance_margin = 3.0;   // seconds; aggressive drivers accept 1 s
    double compliance_probability = 1.0;  // Compliant => 1, Oblivious => 0
    double perception_noise_std = 20.0;   // meters, on opposing-vehicle distance

    void check() const {
        if (kind == DriverKind::Compliant && compliance_probability != 1.0)
            throw std::invalid_argument("Compliant policy requires compliance_probability 1");
        if (kind == DriverKind::Oblivious && compliance_probability != 0.0)
            throw std::invalid_argument("Oblivious policy requires compliance_probability 0");
        if (compliance_probability < 0.0 || compliance_probability > 1.0)
            throw std::invalid_argument("compliance_probability outside [0,1]");
    }
};

/// Whether a policy's gap judgment uses relayed (RSU) information or only what
/// the driver can see. Oblivious drivers ignore the relayed picture the same
/// way they ignore warnings.
inline bool uses_delivered_information(DriverKind kind) {
    return kind != DriverKind::Oblivious;
}

struct DriverInputs {
    Tick now = 0;
    Information perception;                 // basis per uses_delivered_information
    std::vector<AdasEvent> warnings;        // ADAS events from the previous tick
    OvertakePhase phase = OvertakePhase::Following;
    std::optional<OvertakePlan> plan;       // contemplated or active overtake
    std::optional<VehicleSnapshot> target;  // the preceding vehicle, when visible
    double dt = 0.1;
};

/// One driver instance per (driver, activity). Holds the need counter and the
/// warn-compliance hold window.
class DriverModel {
public:
    DriverModel(DriverPolicy policy, EntityId vehicle, double vehicle_length = 5.0)
        : policy_(policy), vehicle_(std::move(vehicle)), vehicle_length_(vehicle_length) {
        policy_.check();
    }

    const DriverPolicy& policy() const { return policy_; }
    bool overtake_need() const { return need_; }

    DriverAction decide(const DriverInputs& in, const SimParams& params, Rng& rng) {
        const VehicleSnapshot* self = nullptr;
        for (const VehicleSnapshot& s : in.perception.snapshots)
            if (s.vehicle == vehicle_) self = &s;

        DriverAction action;
        if (!self) return action;

        // One compliance draw per warning, in event order.
        bool comply = false;
        for (const AdasEvent& e : in.warnings) {
            if (e.kind != AdasEvent::Kind::Warn) continue;
            if (rng.uniform01() < policy_.compliance_probability) comply = true;
        }
        if (comply) hold_until_ = in.now + kComplyHoldTicks;

        update_need(in, *self, params);

        const VehicleSnapshot* leader = nearest_leader(in.perception, *self);
        switch (in.phase) {
            case OvertakePhase::Following:
            case OvertakePhase::GapWait:
            case OvertakePhase::Completed:
            case OvertakePhase::Blocked:
                action.accel = idm_accel(*self, leader, policy_.desired_speed, params, in.dt);
                if (in.plan) {
                    // Judged every tick so the stream position never depends on
                    // need/hold state.
                    const bool acceptable = gap_acceptable(in, *self, rng);
                    if (in.phase == OvertakePhase::GapWait && need_ && in.plan->feasible &&
                        in.now >= hold_until_ && acceptable) {
                        action.initiate_overtake = true;
                    }
                }
                break;
            case OvertakePhase::Initiating:
                if (comply) {
                    action.abort_overtake = true;
                    action.accel = std::max(-params.abort_decel, -self->speed / in.dt);
                } else {
                    action.accel =
                        idm_accel(*self, leader, in.plan ? in.plan->target_speed : policy_.desired_speed,
                                  params, in.dt);
                    action.lane_change_request = Lane::Opposing;
                }
                break;
            case OvertakePhase::Passing:
                if (comply) {
                    action.abort_overtake = true;
                    action.accel = std::max(-params.abort_decel, -self->speed / in.dt);
                } else {
                    action.accel =
                        idm_accel(*self, leader, in.plan ? in.plan->target_speed : policy_.desired_speed,
                                  params, in.dt);
                }
                break;
            case OvertakePhase::Returning: {
                action.accel =
                    idm_accel(*self, leader, in.plan ? in.plan->target_speed : policy_.desired_speed,
                              params, in.dt);
                if (in.now >= hold_until_ && in.target) {
                    // Snapshots carry no body length; drivers estimate with the
                    // nominal 5 m. The S4 gate judges with true geometry.
                    const double gap = self->position - (in.target->position + 5.0);
                    const double required =
                        std::max(params.d_return,
                                 policy_.gap_acceptance_margin / 3.0 * params.headway * self->speed);
                    if (gap >= required) action.lane_change_request = Lane::Original;
                }
                break;
            }
            case OvertakePhase::Aborting: {
                const VehicleState ego{vehicle_, self->lane, self->heading, self->position,
                                       self->speed, 0.0, vehicle_length_, std::nullopt};
                const VehicleAction a = abort_maneuver_action(
                    ego, in.target ? &*in.target : nullptr, params, in.dt);
                action.accel = a.accel;
                action.lane_change_request = a.lane_change;
                break;
            }
        }

        action.accel = std::clamp(action.accel, -params.a_max, params.a_max);
        action.accel = std::max(action.accel, -self->speed / in.dt); // never drift backwards
        action.check();
        return action;
    }

private:
    static constexpr Tick kComplyHoldTicks = 15;

    void update_need(const DriverInputs& in, const VehicleSnapshot& self,
                     const SimParams& params) {
        if (need_) return;
        bool slow = false;
        if (in.target && in.target->lane == self.lane) {
            const double gap = in.target->position - (self.position + vehicle_length_);
            slow = gap >= 0.0 && gap <= params.follow_range &&
                   in.target->speed <= policy_.desired_speed - params.need_speed_delta;
        }
        slow_ticks_ = slow ? slow_ticks_ + 1 : 0;
        if (slow_ticks_ >= params.need_ticks) need_ = true;
    }

    /// The driver's own gap test: noisy closing-time estimate per oncoming
    /// vehicle, accepted when it clears the plan duration plus the driver's
    /// own margin.
    bool gap_acceptable(const DriverInputs& in, const VehicleSnapshot& self, Rng& rng) {
        double est = kInfinity;
        for (const VehicleSnapshot& s : in.perception.snapshots) {
            if (s.heading != Heading::Opposing || s.vehicle == vehicle_) continue;
            const double noisy_pos = s.position + rng.gaussian(0.0, policy_.perception_noise_std);
            est = std::min(est, conflict_time(in.plan->target_speed, self.position, noisy_pos,
                                              s.speed));
        }
        return est > in.plan->estimated_duration + policy_.gap_acceptance_margin;
    }

    const VehicleSnapshot* nearest_leader(const Information& perception,
                                          const VehicleSnapshot& self) const {
        const VehicleSnapshot* best = nullptr;
        for (const VehicleSnapshot& s : perception.snapshots) {
            if (s.vehicle == vehicle_ || s.lane != self.lane || s.heading != self.heading)
                continue;
            if (s.position <= self.position) continue;
            if (!best || s.position < best->position) best = &s;
        }
        return best;
    }

    /// Intelligent-driver-model car following; collision-free for same-lane
    /// leaders at this tick size.
    double idm_accel(const VehicleSnapshot& self, const VehicleSnapshot* leader,
                     double target_speed, const SimParams& params, double dt) const {
        constexpr double kMinGap = 6.0;       // s0
        constexpr double kTimeHeadway = 1.2;  // T
        constexpr double kComfortBrake = 2.5; // b

        const double v = self.speed;
        const double v0 = std::max(target_speed, 0.1);
        double accel = params.a_max * (1.0 - std::pow(v / v0, 4.0));
        if (leader) {
            const double gap = leader->position - (self.position + vehicle_length_);
            const double dv = v - leader->speed;
            const double s_star = kMinGap + std::max(0.0, v * kTimeHeadway +
                                                              v * dv / (2.0 * std::sqrt(params.a_max *
                                                                                        kComfortBrake)));
            const double s = std::max(gap, 0.1);
            accel -= params.a_max * (s_star / s) * (s_star / s);
        }
        accel = std::clamp(accel, -params.a_max, params.a_max);
        return std::max(accel, -v / dt);
    }

    DriverPolicy policy_;
    EntityId vehicle_;
    double vehicle_length_;
    int slow_ticks_ = 0;
    bool need_ = false;
    Tick hold_until_ = -1;
};

} // namespace govsim
