#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "gdprsim/encode.hpp"
#include "gdprsim/fuzz.hpp"
#include "gdprsim/invariants.hpp"
#include "gdprsim/operations.hpp"
#include "gdprsim/scenario.hpp"
#include "gdprsim/snapshot.hpp"

using namespace gdprsim;

TEST_CASE("parser reports unknown verbs with line numbers") {
  try {
    parse_scenario("REGISTER-PATIENT alice\nFROBNICATE x\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
  CHECK_THROWS_AS(parse_scenario("TICK zero\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario("TICK 0\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario("UPLOAD ph1 alice\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario("EXPECT-ERROR NoSuchCode\n"), ParseError);
}

TEST_CASE("comments and blank lines are ignored") {
  auto commands = parse_scenario("# setup\n\nREGISTER-PATIENT alice # inline\n");
  REQUIRE(commands.size() == 1);
  CHECK(commands[0].actor == "alice");
  CHECK(commands[0].line == 3);
}

TEST_CASE("empty script runs to the initial state") {
  RunResult result = run_scenario({}, {});
  CHECK(result.exit_code == 0);
  CHECK(result.state == SystemState{});
}

TEST_CASE("script round-trips through to_script") {
  std::string text =
      "REGISTER-PATIENT alice\n"
      "REGISTER-USER hosp1\n"
      "ADD-HOSPITAL hosp1 drbob\n"
      "BIND-DEVICE ph1 sphone alice pin1\n"
      "UPLOAD ph1 alice alice hosp1 monitoring 10 hr=72\n"
      "DOWNLOAD hosp1 drbob alice\n"
      "RESTRICT ph1 alice alice hosp1 hr=72 true\n"
      "TICK 3\n"
      "SWEEP\n"
      "SAR ph1 alice\n"
      "DRAIN ph1\n"
      "DELETE ph1 alice alice hosp1 hr=72\n"
      "ASSERT-INVARIANTS\n";
  CHECK(to_script(parse_scenario(text)) == text);
}

TEST_CASE("EXPECT-ERROR consumes the next command's error") {
  std::string text =
      "REGISTER-PATIENT alice\n"
      "EXPECT-ERROR DuplicateRegistration\n"
      "REGISTER-PATIENT alice\n";
  RunResult result = run_scenario(parse_scenario(text), {});
  CHECK(result.exit_code == 0);

  // an unexpected success is an assertion failure
  std::string bad =
      "REGISTER-PATIENT alice\n"
      "EXPECT-ERROR DuplicateRegistration\n"
      "REGISTER-PATIENT bob\n";
  RunResult failed = run_scenario(parse_scenario(bad), {});
  CHECK(failed.exit_code == 1);
  CHECK(failed.failure.find("AssertionFailure") != std::string::npos);
}

TEST_CASE("snapshot rejects truncation and foreign versions") {
  SystemState state;
  REQUIRE(register_patient(state, "alice").ok());
  std::string text = snapshot_to_string(state);

  std::string truncated = text.substr(0, text.size() - 5);
  CHECK_THROWS_AS(snapshot_from_string(truncated), CorruptSnapshot);
  CHECK_THROWS_AS(snapshot_from_string("gdprsim-snapshot 999\nend\n"),
                  FormatVersionMismatch);
  try {
    snapshot_from_string("gdprsim-snapshot 1\ngarbage line here\nend\n");
    FAIL("expected CorruptSnapshot");
  } catch (const CorruptSnapshot& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("constructed reader-confinement violation is caught with a witness") {
  SystemState state;
  state.auth.patients.insert("alice");
  state.auth.reg_usrs.insert("hosp1");
  state.hospitals["hosp1"] = HospitalNode{"hosp1", {"drbob"}, {}};
  // hand-planted item whose readers exclude the holding hospital
  ItemKey key{{"alice", {"hosp2"}}, "d"};
  state.hospitals["hosp1"].table[key] = Meta{"m", 9, false};

  InvariantReport report = check_invariants(state);
  CHECK_FALSE(report.all_pass());
  bool found = false;
  for (const auto& entry : report.results) {
    if (entry.id == "I2" && !entry.pass) {
      found = true;
      CHECK(entry.witness.find("hosp1") != std::string::npos);
    }
  }
  CHECK(found);
}

TEST_CASE("fresh empty state passes every invariant") {
  CHECK(check_invariants(SystemState{}).all_pass());
}

TEST_CASE("seeded differential fuzz stays convergent and invariant-clean") {
  RunOptions options;
  options.diff = true;
  options.check_each = true;
  options.sweep_every = 10;
  auto commands = generate_commands(99, 1000);
  RunResult result = run_scenario(commands, options);
  CHECK(result.exit_code == 0);
  CHECK(result.failure.empty());
}

TEST_CASE("identical seeds give byte-identical snapshots, audits and traces") {
  RunOptions options;
  options.sweep_every = 10;
  auto commands = generate_commands(1234, 400);
  RunResult a = run_scenario(commands, options);
  RunResult b = run_scenario(generate_commands(1234, 400), options);
  CHECK(snapshot_to_string(a.state) == snapshot_to_string(b.state));
  CHECK(dump_audit(a.state.audit) == dump_audit(b.state.audit));
  CHECK(a.trace == b.trace);
}
