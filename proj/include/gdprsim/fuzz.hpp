#pragma once

#include <cstdint>
#include <vector>

#include "gdprsim/scenario.hpp"

namespace gdprsim {

// Seeded random command traces over a small actor universe, biased ~70%
// toward satisfied preconditions so postconditions get exercised.
std::vector<ScenarioCommand> generate_commands(std::uint64_t seed,
                                               std::size_t steps);

}  // namespace gdprsim
