#pragma once

// Phases of the overtaking maneuver and the legal transition relation.

#include <optional>
#include <string_view>

namespace govsim {

enum class OvertakePhase {
    Following,   // trailing the preceding vehicle, no overtaking need yet
    GapWait,     // need established, waiting for an acceptable gap
    Initiating,  // lane change toward the opposing lane in progress
    Passing,     // in the opposing lane, pulling ahead of the preceding vehicle
    Returning,   // past the preceding vehicle, waiting/merging back
    Aborting,    // halting the maneuver and returning behind the preceding vehicle
    Completed,   // back in the original lane ahead of the preceding vehicle (terminal)
    Blocked,     // initiation permanently rejected (terminal)
};

inline bool is_terminal_phase(OvertakePhase p) {
    return p == OvertakePhase::Completed || p == OvertakePhase::Blocked;
}

/// Phases during which the maneuver occupies (or is about to occupy) the
/// opposing lane; zone classification treats only these as hazardous.
inline bool phase_occupies_opposing(OvertakePhase p) {
    return p == OvertakePhase::Initiating || p == OvertakePhase::Passing ||
           p == OvertakePhase::Returning;
}

/// Legal transition relation, self-loops included. Aborting is reachable from
/// every in-maneuver phase (gate interventions) and drains back to Following.
inline bool is_legal_phase_transition(OvertakePhase from, OvertakePhase to) {
    if (from == to) return true;
    switch (from) {
        case OvertakePhase::Following: return to == OvertakePhase::GapWait;
        case OvertakePhase::GapWait:
            return to == OvertakePhase::Initiating || to == OvertakePhase::Blocked;
        case OvertakePhase::Initiating:
            return to == OvertakePhase::Passing || to == OvertakePhase::Aborting;
        case OvertakePhase::Passing:
            return to == OvertakePhase::Returning || to == OvertakePhase::Aborting;
        case OvertakePhase::Returning:
            return to == OvertakePhase::Completed || to == OvertakePhase::Aborting;
        case OvertakePhase::Aborting: return to == OvertakePhase::Following;
        case OvertakePhase::Completed:
        case OvertakePhase::Blocked: return false;
    }
    return false;
}

inline std::string_view to_string(OvertakePhase p) {
    switch (p) {
        case OvertakePhase::Following: return "following";
        case OvertakePhase::GapWait: return "gap_wait";
        case OvertakePhase::Initiating: return "initiating";
        case OvertakePhase::Passing: return "passing";
        case OvertakePhase::Returning: return "returning";
        case OvertakePhase::Aborting: return "aborting";
        case OvertakePhase::Completed: return "completed";
        case OvertakePhase::Blocked: return "blocked";
    }
    return "?";
}

inline std::optional<OvertakePhase> phase_from_string(std::string_view s) {
    if (s == "following") return OvertakePhase::Following;
    if (s == "gap_wait") return OvertakePhase::GapWait;
    if (s == "initiating") return OvertakePhase::Initiating;
    if (s == "passing") return OvertakePhase::Passing;
    if (s == "returning") return OvertakePhase::Returning;
    if (s == "aborting") return OvertakePhase::Aborting;
    if (s == "completed") return OvertakePhase::Completed;
    if (s == "blocked") return OvertakePhase::Blocked;
    return std::nullopt;
}

} // namespace govsim
