#pragma once

#include <stdexcept>
#include <string>

#include "gdprsim/system_state.hpp"

namespace gdprsim {

struct FormatVersionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CorruptSnapshot : std::runtime_error {
  CorruptSnapshot(int line_no, const std::string& what)
      : std::runtime_error("snapshot line " + std::to_string(line_no) + ": " +
                           what),
        line(line_no) {}
  int line;
};

// Versioned line-oriented dump; all sets are emitted in canonical sort
// order, so structurally equal states produce byte-identical text.
std::string snapshot_to_string(const SystemState& state);
SystemState snapshot_from_string(const std::string& text);

void snapshot_save(const SystemState& state, const std::string& path);
SystemState snapshot_load(const std::string& path);

}  // namespace gdprsim
