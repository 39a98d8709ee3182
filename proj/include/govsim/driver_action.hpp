#pragma once

#include <optional>
#include <stdexcept>

#include "govsim/core_model.hpp"

namespace govsim {

/// Per-tick driver command. Initiating and aborting are mutually exclusive.
struct DriverAction {
    double accel = 0.0;
    std::optional<Lane> lane_change_request;
    bool initiate_overtake = false;
    bool abort_overtake = false;

    void check() const {
        if (initiate_overtake && abort_overtake)
            throw std::invalid_argument("DriverAction: initiate and abort both set");
    }
};

} // namespace govsim
