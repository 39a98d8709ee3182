#pragma once

// Scenario value: everything a run needs, as parsed from a scenario document.

#include <map>
#include <string>
#include <vector>

#include "govsim/core_model.hpp"
#include "govsim/driver.hpp"
#include "govsim/world.hpp"

namespace govsim {

struct Scenario {
    int schema_version = 1;
    std::string name;
    double road_length = 1000.0;
    double visibility_range = 200.0;
    double dt = 0.1;
    SimParams params;
    std::vector<VehicleState> vehicles;
    std::vector<Cps> cpses;
    std::vector<RsuSite> rsus;
    std::map<std::string, DriverPolicy> driver_policies; // keyed by driver cps id
    std::vector<GovernanceRule> rules;                   // empty when default_rules
    bool default_rules = true;
    std::string overtake_type_label = "Type1";           // documentation only

    const Cps* find_cps(const EntityId& id) const {
        for (const Cps& c : cpses)
            if (c.id == id) return &c;
        return nullptr;
    }

    const Cps* find_cps_of_kind(CpsKind kind) const {
        for (const Cps& c : cpses)
            if (c.kind == kind) return &c;
        return nullptr;
    }
};

} // namespace govsim
