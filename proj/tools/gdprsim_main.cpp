#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gdprsim/encode.hpp"
#include "gdprsim/fuzz.hpp"
#include "gdprsim/invariants.hpp"
#include "gdprsim/scenario.hpp"
#include "gdprsim/snapshot.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int finish_run(const gdprsim::RunResult& result, const std::string& snapshot,
               const std::string& audit) {
  std::cout << result.trace;
  if (!snapshot.empty()) {
    gdprsim::snapshot_save(result.state, snapshot);
  }
  if (!audit.empty()) {
    write_file(audit, gdprsim::dump_audit(result.state.audit));
  }
  if (!result.failure.empty()) {
    std::cerr << result.failure << "\n";
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GDPR-labelled IoT healthcare data store simulator"};
  app.require_subcommand(1);

  std::string script_path, snapshot_path, audit_path, script_out;
  gdprsim::RunOptions options;
  std::uint64_t steps = 1000;

  auto* run = app.add_subcommand("run", "execute a scenario script");
  run->add_option("script", script_path, "scenario file")->required();
  run->add_flag("--diff", options.diff, "run the reference oracle in lockstep");
  run->add_flag("--strict-delete", options.strict_delete,
                "require presence in every reader hospital's table");
  run->add_option("--sweep-every", options.sweep_every,
                  "auto-sweep every N ticks");
  run->add_option("--seed", options.seed, "recorded seed (scripts are deterministic)");
  run->add_option("--snapshot", snapshot_path, "write final state snapshot");
  run->add_option("--audit", audit_path, "write audit log dump");
  run->add_flag("--check", options.check_each,
                "check invariants after every command (default: on exit)");

  auto* fuzz = app.add_subcommand("fuzz", "run a seeded random trace");
  fuzz->add_option("--seed", options.seed, "generator seed")->required();
  fuzz->add_option("--steps", steps, "number of commands")->required();
  fuzz->add_flag("--strict-delete", options.strict_delete, "strict delete mode");
  fuzz->add_option("--sweep-every", options.sweep_every,
                   "auto-sweep every N ticks");
  fuzz->add_option("--snapshot", snapshot_path, "write final state snapshot");
  fuzz->add_option("--audit", audit_path, "write audit log dump");
  fuzz->add_option("--script-out", script_out, "write the generated script");

  std::string check_path;
  auto* check = app.add_subcommand("check", "check invariants of a snapshot");
  check->add_option("snapshot", check_path, "snapshot file")->required();

  std::string replay_path, against_path;
  auto* replay = app.add_subcommand("replay", "rebuild state from an audit dump");
  replay->add_option("audit", replay_path, "audit dump file")->required();
  replay->add_option("--against", against_path,
                     "snapshot the replay must reproduce");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) {
      std::vector<gdprsim::ScenarioCommand> commands;
      try {
        commands = gdprsim::parse_scenario(read_file(script_path));
      } catch (const gdprsim::ParseError& e) {
        std::cerr << "ParseError: " << script_path << ":" << e.what() << "\n";
        return 2;
      }
      return finish_run(gdprsim::run_scenario(commands, options), snapshot_path,
                        audit_path);
    }
    if (fuzz->parsed()) {
      options.diff = true;
      options.check_each = true;
      auto commands = gdprsim::generate_commands(options.seed, steps);
      if (!script_out.empty()) {
        write_file(script_out, gdprsim::to_script(commands));
      }
      return finish_run(gdprsim::run_scenario(commands, options), snapshot_path,
                        audit_path);
    }
    if (check->parsed()) {
      gdprsim::SystemState state = gdprsim::snapshot_load(check_path);
      gdprsim::InvariantReport report = gdprsim::check_invariants(state);
      for (const auto& entry : report.results) {
        std::cout << entry.id << " " << (entry.pass ? "pass" : "FAIL");
        if (!entry.witness.empty()) std::cout << " (" << entry.witness << ")";
        std::cout << "\n";
      }
      return report.all_pass() ? 0 : 1;
    }
    if (replay->parsed()) {
      auto log = gdprsim::load_audit(read_file(replay_path));
      gdprsim::SystemState replayed = gdprsim::replay_audit(log);
      if (!against_path.empty()) {
        gdprsim::SystemState expected = gdprsim::snapshot_load(against_path);
        if (gdprsim::snapshot_to_string(replayed) !=
            gdprsim::snapshot_to_string(expected)) {
          std::cerr << "replayed state differs from snapshot\n";
          return 1;
        }
        std::cout << "replay matches snapshot\n";
      } else {
        std::cout << gdprsim::snapshot_to_string(replayed);
      }
      return 0;
    }
  } catch (const gdprsim::FormatVersionMismatch& e) {
    std::cerr << "FormatVersionMismatch: " << e.what() << "\n";
    return 2;
  } catch (const gdprsim::CorruptSnapshot& e) {
    std::cerr << "CorruptSnapshot: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
