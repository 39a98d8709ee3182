#pragma once

// Domain types shared by every other module: the entities of a cyber-physical
// system-of-systems, the activities they perform, the information they exchange,
// and the governance vocabulary (awareness, controllability, autonomy, power,
// authority) that drives the rule engine.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace govsim {

using Tick = std::int64_t;

// ---------------------------------------------------------------------------
// Identifiers

/// Opaque, stable identifier. Non-empty, at most 64 characters when built
/// from a string; the default-constructed value is the "unset" sentinel and
/// never survives model validation.
class EntityId {
public:
    EntityId() = default;

    explicit EntityId(std::string value) : value_(std::move(value)) {
        if (value_.empty()) throw std::invalid_argument("EntityId must be non-empty");
        if (value_.size() > 64) throw std::invalid_argument("EntityId exceeds 64 chars: " + value_);
    }

    bool unset() const { return value_.empty(); }
    const std::string& value() const { return value_; }

    friend bool operator==(const EntityId&, const EntityId&) = default;
    friend auto operator<=>(const EntityId&, const EntityId&) = default;

private:
    std::string value_;
};

// ---------------------------------------------------------------------------
// Closed-set types. Construction from strings rejects out-of-set values; the
// enums themselves are closed by the type system.

enum class CpsKind { Driver, Adas, Rsu, OtherVehicle };
enum class Lane { Original, Opposing };
enum class Heading { Forward, Opposing };
enum class ActivityKind { Overtake };
enum class AwarenessKind { BySelf, ByDependency, Unaware };
enum class ControllabilityLevel { Controllable, Uncontrollable };
enum class AutonomyLevel { Full, Partial, Limited };
enum class PowerBase { Reward, Coercive, Legitimate, Referent, Expert };
enum class AuthorityKind { Monitoring, Warning, Controlling };

inline constexpr PowerBase kAllPowerBases[] = {PowerBase::Reward, PowerBase::Coercive,
                                               PowerBase::Legitimate, PowerBase::Referent,
                                               PowerBase::Expert};

// ---------------------------------------------------------------------------
// Small set types

/// Non-empty subset of the two lanes.
class LaneSet {
public:
    LaneSet(std::initializer_list<Lane> lanes) {
        for (Lane l : lanes) bits_ |= bit(l);
        if (bits_ == 0) throw std::invalid_argument("LaneSet must be non-empty");
    }

    static LaneSet both() { return LaneSet{Lane::Original, Lane::Opposing}; }

    bool contains(Lane l) const { return bits_ & bit(l); }
    bool contains_all(const LaneSet& other) const { return (bits_ & other.bits_) == other.bits_; }

    friend bool operator==(const LaneSet&, const LaneSet&) = default;

private:
    static unsigned bit(Lane l) { return 1u << static_cast<unsigned>(l); }
    unsigned bits_ = 0;
};

/// Set of authorities. Invariant: Controlling implies Monitoring and Warning;
/// non-nested sets are rejected at construction.
class AuthoritySet {
public:
    AuthoritySet() = default;

    AuthoritySet(std::initializer_list<AuthorityKind> kinds) {
        for (AuthorityKind k : kinds) bits_ |= bit(k);
        check();
    }

    static AuthoritySet none() { return AuthoritySet{}; }

    bool contains(AuthorityKind k) const { return bits_ & bit(k); }
    bool empty() const { return bits_ == 0; }

    AuthoritySet united_with(const AuthoritySet& other) const {
        AuthoritySet r;
        r.bits_ = bits_ | other.bits_;
        return r; // union of two valid sets cannot break the lattice invariant
    }

    bool is_superset_of(const AuthoritySet& other) const {
        return (bits_ & other.bits_) == other.bits_;
    }

    friend bool operator==(const AuthoritySet&, const AuthoritySet&) = default;

private:
    static unsigned bit(AuthorityKind k) { return 1u << static_cast<unsigned>(k); }
    void check() const {
        if (contains(AuthorityKind::Controlling) &&
            (!contains(AuthorityKind::Monitoring) || !contains(AuthorityKind::Warning))) {
            throw std::invalid_argument(
                "AuthoritySet: Controlling requires Monitoring and Warning");
        }
    }
    unsigned bits_ = 0;
};

// ---------------------------------------------------------------------------
// Entities and relationships

struct Cps {
    EntityId id;
    CpsKind kind;
    double sensing_range = 0.0;              // meters
    std::optional<EntityId> hosted_on;       // vehicle carrying this CPS (Driver/Adas)

    friend bool operator==(const Cps&, const Cps&) = default;
};

/// Operational environment of an activity: a road interval, the lanes it
/// touches, and the tick window it is valid for.
struct SphereOfAction {
    double road_from = 0.0;
    double road_to = 0.0;
    LaneSet lanes = LaneSet::both();
    Tick valid_from_tick = 0;
    Tick valid_until_tick = 0;

    bool covers_interval(double from, double to) const {
        return road_from <= from && road_to >= to;
    }

    friend bool operator==(const SphereOfAction&, const SphereOfAction&) = default;
};

struct Activity {
    EntityId id;
    ActivityKind kind;
    EntityId performer;      // a Driver Cps
    SphereOfAction soa;
    EntityId target;         // the preceding vehicle

    friend bool operator==(const Activity&, const Activity&) = default;
};

struct VehicleSnapshot {
    EntityId vehicle;
    Lane lane;
    double position = 0.0;   // meters, rear bumper along the road axis
    double speed = 0.0;      // m/s
    Heading heading;

    friend bool operator==(const VehicleSnapshot&, const VehicleSnapshot&) = default;
};

/// A description of a sphere of action at a point in time.
struct Information {
    EntityId id;
    SphereOfAction describes;
    std::vector<VehicleSnapshot> snapshots;
    Tick produced_at_tick = 0;

    bool covers(const SphereOfAction& soa) const {
        return describes.covers_interval(soa.road_from, soa.road_to) &&
               describes.lanes.contains_all(soa.lanes);
    }

    friend bool operator==(const Information&, const Information&) = default;
};

struct InformationProvision {
    EntityId provider;
    EntityId receiver;
    Information info;
    Tick sent_at_tick = 0;
    Tick deliver_at_tick = 0;
    bool dropped = false;

    friend bool operator==(const InformationProvision&, const InformationProvision&) = default;
};

// ---------------------------------------------------------------------------
// Governance data

struct GovernanceRule {
    EntityId id;
    AutonomyLevel condition;
    std::optional<PowerBase> grant_base;  // absent: the condition grants nothing
    EntityId holder;                      // Cps gaining power
    EntityId subject;                     // Cps whose behavior is influenced
    ActivityKind activity_kind = ActivityKind::Overtake;

    friend bool operator==(const GovernanceRule&, const GovernanceRule&) = default;
};

struct PowerGrant {
    EntityId holder;
    EntityId subject;
    EntityId activity;
    PowerBase base;
    Tick granted_at_tick = 0;

    friend bool operator==(const PowerGrant&, const PowerGrant&) = default;
};

// ---------------------------------------------------------------------------
// Model validation

struct Violation {
    enum class Severity { Error, Warning };
    Severity severity = Severity::Error;
    std::string code;       // stable machine-readable tag
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Checks type invariants and cross-references over a model. Violations are
/// data, not failures; an empty list means the model is consistent.
inline std::vector<Violation> validate_model(std::span<const Cps> cpses,
                                             std::span<const Activity> activities,
                                             std::span<const GovernanceRule> rules) {
    std::vector<Violation> out;
    auto error = [&](std::string code, std::string msg) {
        out.push_back({Violation::Severity::Error, std::move(code), std::move(msg)});
    };
    auto warning = [&](std::string code, std::string msg) {
        out.push_back({Violation::Severity::Warning, std::move(code), std::move(msg)});
    };

    std::set<std::string> cps_ids;
    for (const Cps& c : cpses) {
        if (c.id.unset()) error("unset-cps-id", "cps with unset id");
        if (!cps_ids.insert(c.id.value()).second)
            error("duplicate-cps-id", "duplicate cps id '" + c.id.value() + "'");
        if (c.sensing_range < 0)
            error("negative-sensing-range", "cps '" + c.id.value() + "' has negative sensing_range");
        if ((c.kind == CpsKind::Driver || c.kind == CpsKind::Adas) && !c.hosted_on)
            error("unhosted-cps", "cps '" + c.id.value() + "' must have hosted_on set");
    }
    auto find_cps = [&](const EntityId& id) -> const Cps* {
        for (const Cps& c : cpses)
            if (c.id == id) return &c;
        return nullptr;
    };

    std::set<std::string> activity_ids;
    for (const Activity& a : activities) {
        if (!activity_ids.insert(a.id.value()).second)
            error("duplicate-activity-id", "duplicate activity id '" + a.id.value() + "'");
        const Cps* performer = find_cps(a.performer);
        if (!performer)
            error("unknown-performer", "activity '" + a.id.value() + "' references unknown performer");
        else if (performer->kind != CpsKind::Driver)
            error("performer-not-driver",
                  "activity '" + a.id.value() + "': performer must be Driver");
        if (performer && performer->hosted_on && *performer->hosted_on == a.target)
            error("target-not-distinct",
                  "activity '" + a.id.value() + "': target must be a distinct vehicle");
        if (a.soa.road_from >= a.soa.road_to)
            error("bad-soa-interval",
                  "activity '" + a.id.value() + "': soa road_from must be < road_to");
        if (a.soa.valid_from_tick > a.soa.valid_until_tick)
            error("bad-soa-ticks",
                  "activity '" + a.id.value() + "': soa tick window inverted");
    }

    std::set<std::string> rule_ids;
    for (const GovernanceRule& r : rules) {
        if (!rule_ids.insert(r.id.value()).second)
            error("duplicate-rule-id", "duplicate rule id '" + r.id.value() + "'");
        if (r.holder == r.subject)
            error("holder-is-subject", "rule '" + r.id.value() + "': holder must differ from subject");
        if (!find_cps(r.holder))
            error("unknown-holder", "rule '" + r.id.value() + "' references unknown holder");
        if (!find_cps(r.subject))
            error("unknown-subject", "rule '" + r.id.value() + "' references unknown subject");
    }
    // Two rules firing on the same condition with different bases both apply
    // (authority sets union); flagged so scenario authors notice.
    for (size_t i = 0; i < rules.size(); ++i) {
        for (size_t j = i + 1; j < rules.size(); ++j) {
            const auto& a = rules[i];
            const auto& b = rules[j];
            if (a.condition == b.condition && a.activity_kind == b.activity_kind &&
                a.holder == b.holder && a.subject == b.subject && a.grant_base && b.grant_base &&
                *a.grant_base != *b.grant_base) {
                warning("conflicting-rules", "rules '" + a.id.value() + "' and '" + b.id.value() +
                                                 "' fire on the same condition with different bases");
            }
        }
    }
    return out;
}

inline bool has_errors(const std::vector<Violation>& violations) {
    return std::any_of(violations.begin(), violations.end(), [](const Violation& v) {
        return v.severity == Violation::Severity::Error;
    });
}

// ---------------------------------------------------------------------------
// String conversions (used by scenario/trace serialization and diagnostics)

inline std::string_view to_string(CpsKind k) {
    switch (k) {
        case CpsKind::Driver: return "driver";
        case CpsKind::Adas: return "adas";
        case CpsKind::Rsu: return "rsu";
        case CpsKind::OtherVehicle: return "other_vehicle";
    }
    return "?";
}
inline std::string_view to_string(Lane l) {
    return l == Lane::Original ? "original" : "opposing";
}
inline std::string_view to_string(Heading h) {
    return h == Heading::Forward ? "forward" : "opposing";
}
inline std::string_view to_string(ActivityKind) { return "overtake"; }
inline std::string_view to_string(AwarenessKind a) {
    switch (a) {
        case AwarenessKind::BySelf: return "by_self";
        case AwarenessKind::ByDependency: return "by_dependency";
        case AwarenessKind::Unaware: return "unaware";
    }
    return "?";
}
inline std::string_view to_string(ControllabilityLevel c) {
    return c == ControllabilityLevel::Controllable ? "controllable" : "uncontrollable";
}
inline std::string_view to_string(AutonomyLevel a) {
    switch (a) {
        case AutonomyLevel::Full: return "full";
        case AutonomyLevel::Partial: return "partial";
        case AutonomyLevel::Limited: return "limited";
    }
    return "?";
}
inline std::string_view to_string(PowerBase b) {
    switch (b) {
        case PowerBase::Reward: return "reward";
        case PowerBase::Coercive: return "coercive";
        case PowerBase::Legitimate: return "legitimate";
        case PowerBase::Referent: return "referent";
        case PowerBase::Expert: return "expert";
    }
    return "?";
}
inline std::string_view to_string(AuthorityKind a) {
    switch (a) {
        case AuthorityKind::Monitoring: return "monitoring";
        case AuthorityKind::Warning: return "warning";
        case AuthorityKind::Controlling: return "controlling";
    }
    return "?";
}

template <typename T>
std::optional<T> enum_from_string(std::string_view) = delete;

template <>
inline std::optional<CpsKind> enum_from_string<CpsKind>(std::string_view s) {
    if (s == "driver") return CpsKind::Driver;
    if (s == "adas") return CpsKind::Adas;
    if (s == "rsu") return CpsKind::Rsu;
    if (s == "other_vehicle") return CpsKind::OtherVehicle;
    return std::nullopt;
}
template <>
inline std::optional<Lane> enum_from_string<Lane>(std::string_view s) {
    if (s == "original") return Lane::Original;
    if (s == "opposing") return Lane::Opposing;
    return std::nullopt;
}
template <>
inline std::optional<Heading> enum_from_string<Heading>(std::string_view s) {
    if (s == "forward") return Heading::Forward;
    if (s == "opposing") return Heading::Opposing;
    return std::nullopt;
}
template <>
inline std::optional<AwarenessKind> enum_from_string<AwarenessKind>(std::string_view s) {
    if (s == "by_self") return AwarenessKind::BySelf;
    if (s == "by_dependency") return AwarenessKind::ByDependency;
    if (s == "unaware") return AwarenessKind::Unaware;
    return std::nullopt;
}
template <>
inline std::optional<ControllabilityLevel> enum_from_string<ControllabilityLevel>(
    std::string_view s) {
    if (s == "controllable") return ControllabilityLevel::Controllable;
    if (s == "uncontrollable") return ControllabilityLevel::Uncontrollable;
    return std::nullopt;
}
template <>
inline std::optional<AutonomyLevel> enum_from_string<AutonomyLevel>(std::string_view s) {
    if (s == "full") return AutonomyLevel::Full;
    if (s == "partial") return AutonomyLevel::Partial;
    if (s == "limited") return AutonomyLevel::Limited;
    return std::nullopt;
}
template <>
inline std::optional<PowerBase> enum_from_string<PowerBase>(std::string_view s) {
    if (s == "reward") return PowerBase::Reward;
    if (s == "coercive") return PowerBase::Coercive;
    if (s == "legitimate") return PowerBase::Legitimate;
    if (s == "referent") return PowerBase::Referent;
    if (s == "expert") return PowerBase::Expert;
    return std::nullopt;
}
template <>
inline std::optional<ActivityKind> enum_from_string<ActivityKind>(std::string_view s) {
    if (s == "overtake") return ActivityKind::Overtake;
    return std::nullopt;
}

} // namespace govsim
