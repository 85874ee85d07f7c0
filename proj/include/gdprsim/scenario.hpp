#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "gdprsim/errors.hpp"
#include "gdprsim/system_state.hpp"

namespace gdprsim {

struct ParseError : std::runtime_error {
  ParseError(int line_no, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + what),
        line(line_no) {}
  int line;
};

struct ScenarioCommand {
  enum class Verb {
    register_patient,
    register_user,
    add_hospital,
    bind_device,
    upload,
    del,
    download,
    restrict,
    tick,
    sweep,
    sar,
    drain,
    expect_error,
    assert_invariants,
  };

  Verb verb = Verb::sweep;
  int line = 0;

  std::string device;
  ActorId actor;    // claimed id / registered actor
  ActorId owner;
  ActorId hospital;
  std::string credential;
  std::string payload;
  std::string purpose;
  std::string recipient;
  DeviceKind kind = DeviceKind::sphone;
  std::set<ActorId> readers;
  std::vector<ActorId> staff;
  std::uint64_t n = 0;       // TICK amount
  std::uint64_t expiry = 0;
  bool flag = false;
  ErrorCode expected = ErrorCode::Ok;
};

// Whitespace-separated line commands, '#' comments. Throws ParseError.
std::vector<ScenarioCommand> parse_scenario(const std::string& text);

std::string to_script(const std::vector<ScenarioCommand>& commands);

struct RunOptions {
  bool diff = false;
  bool strict_delete = false;
  unsigned sweep_every = 0;  // auto-sweep every N ticks; 0 = manual
  std::uint64_t seed = 0;
  bool check_each = false;   // invariants after every command vs on exit
};

struct RunResult {
  SystemState state;
  int exit_code = 0;  // 0 pass, 1 assertion/divergence
  std::string trace;
  std::string failure;  // first failure description, empty on pass
};

RunResult run_scenario(const std::vector<ScenarioCommand>& commands,
                       const RunOptions& options);

}  // namespace gdprsim
