#pragma once

#include <set>

#include "gdprsim/operations.hpp"
#include "gdprsim/system_state.hpp"

namespace gdprsim {

// Advances the logical clock; sweeping is explicit.
OpResult tick(SystemState& state, std::uint64_t n);

// Removes every item with expiry < now from db and all hospital tables.
OpResult sweep(SystemState& state, std::set<ItemKey>& erased);

}  // namespace gdprsim
