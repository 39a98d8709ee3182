#pragma once

// The derivation chain from classification to authority:
//   awareness x controllability -> autonomy level -> governance rules
//   -> power grants -> authority set
// plus the default overtaking rule set.

#include <array>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "govsim/core_model.hpp"
#include "govsim/rng.hpp"

namespace govsim {

/// Total map from power base to the authorities it confers.
///
/// Expert and Legitimate are fixed by the model (Expert -> {Monitoring,
/// Warning}, Legitimate -> all three) and cannot be overridden. The remaining
/// bases default to the empty set; their behavioral influence is representable
/// but grants no authority unless a deployment configures otherwise.
class AuthorityMapping {
public:
    AuthorityMapping() {
        entries_.fill(AuthoritySet::none());
        entry(PowerBase::Expert) = AuthoritySet{AuthorityKind::Monitoring, AuthorityKind::Warning};
        entry(PowerBase::Legitimate) = AuthoritySet{
            AuthorityKind::Monitoring, AuthorityKind::Warning, AuthorityKind::Controlling};
    }

    const AuthoritySet& of(PowerBase base) const {
        return entries_[static_cast<size_t>(base)];
    }

    void set(PowerBase base, const AuthoritySet& authorities) {
        if (base == PowerBase::Expert || base == PowerBase::Legitimate)
            throw std::invalid_argument("AuthorityMapping: Expert/Legitimate entries are fixed");
        entry(base) = authorities;
    }

private:
    AuthoritySet& entry(PowerBase base) { return entries_[static_cast<size_t>(base)]; }
    std::array<AuthoritySet, 5> entries_;
};

/// Bundles the classification inputs for one (subject, activity) at one tick.
struct GovernanceContext {
    EntityId subject;
    EntityId activity;
    ActivityKind activity_kind = ActivityKind::Overtake;
    AwarenessKind awareness = AwarenessKind::Unaware;
    ControllabilityLevel controllability = ControllabilityLevel::Uncontrollable;
    Tick tick = 0;
};

/// The autonomy table. Uncontrollable caps autonomy at Limited regardless of
/// awareness; unawareness does the same (a CPS must be aware of its sphere of
/// action to operate in it).
inline AutonomyLevel derive_autonomy(AwarenessKind awareness,
                                     ControllabilityLevel controllability) {
    if (controllability == ControllabilityLevel::Uncontrollable) return AutonomyLevel::Limited;
    switch (awareness) {
        case AwarenessKind::BySelf: return AutonomyLevel::Full;
        case AwarenessKind::ByDependency: return AutonomyLevel::Partial;
        case AwarenessKind::Unaware: return AutonomyLevel::Limited;
    }
    return AutonomyLevel::Limited;
}

/// The three default overtaking rules: Full grants nothing, Partial grants
/// Expert power to the ADAS, Limited grants Legitimate power.
inline std::vector<GovernanceRule> default_overtaking_rules(const EntityId& driver,
                                                            const EntityId& adas) {
    if (driver == adas)
        throw std::invalid_argument("default_overtaking_rules: driver and adas ids are identical");

    // Rule ids must stay within the id length budget whatever the input ids
    // look like, so they embed a hash of the pair instead of the ids themselves.
    char suffix[20];
    std::uint64_t h = fnv1a64(driver.value()) ^ (fnv1a64(adas.value()) * 0x9e3779b97f4a7c15ULL);
    std::snprintf(suffix, sizeof suffix, "%016llx", static_cast<unsigned long long>(h));

    auto rule = [&](const char* name, AutonomyLevel condition,
                    std::optional<PowerBase> base) {
        return GovernanceRule{EntityId(std::string("default-") + name + "-" + suffix),
                              condition,
                              base,
                              adas,
                              driver,
                              ActivityKind::Overtake};
    };
    return {
        rule("full", AutonomyLevel::Full, std::nullopt),
        rule("partial", AutonomyLevel::Partial, PowerBase::Expert),
        rule("limited", AutonomyLevel::Limited, PowerBase::Legitimate),
    };
}

/// Fires every rule whose condition matches the autonomy derived from the
/// context and whose activity kind and subject match. Rules without a grant
/// base fire silently (they grant nothing).
inline std::vector<PowerGrant> evaluate_rules(std::span<const GovernanceRule> rules,
                                              const GovernanceContext& ctx) {
    const AutonomyLevel autonomy = derive_autonomy(ctx.awareness, ctx.controllability);
    std::vector<PowerGrant> grants;
    for (const GovernanceRule& rule : rules) {
        if (rule.condition != autonomy) continue;
        if (rule.activity_kind != ctx.activity_kind) continue;
        if (rule.subject != ctx.subject) continue;
        if (!rule.grant_base) continue;
        grants.push_back(PowerGrant{rule.holder, rule.subject, ctx.activity, *rule.grant_base,
                                    ctx.tick});
    }
    return grants;
}

/// Union of the mapped authorities over all grants held by `holder` over
/// `subject`. Empty when no grant matches.
inline AuthoritySet authorities_of(std::span<const PowerGrant> grants,
                                   const AuthorityMapping& mapping, const EntityId& holder,
                                   const EntityId& subject) {
    AuthoritySet out = AuthoritySet::none();
    for (const PowerGrant& g : grants) {
        if (g.holder == holder && g.subject == subject) out = out.united_with(mapping.of(g.base));
    }
    return out;
}

} // namespace govsim
