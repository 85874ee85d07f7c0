#include "gdprsim/scenario.hpp"

#include <charconv>
#include <sstream>

#include "gdprsim/encode.hpp"
#include "gdprsim/invariants.hpp"
#include "gdprsim/operations.hpp"
#include "gdprsim/reference_model.hpp"
#include "gdprsim/retention.hpp"

namespace gdprsim {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') break;
    out.push_back(tok);
  }
  return out;
}

std::uint64_t parse_u64_or_throw(const std::string& text, int line_no) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(line_no, "expected integer, got '" + text + "'");
  }
  return value;
}

std::set<ActorId> parse_reader_list(const std::string& tok, int line_no) {
  std::set<ActorId> out;
  if (tok == "-") return out;
  std::string cur;
  for (char c : tok) {
    if (c == ',') {
      if (cur.empty()) throw ParseError(line_no, "empty reader in list");
      out.insert(unescape_token(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (cur.empty()) throw ParseError(line_no, "empty reader in list");
  out.insert(unescape_token(cur));
  return out;
}

std::string reader_list(const std::set<ActorId>& readers) {
  if (readers.empty()) return "-";
  std::string out;
  bool first = true;
  for (const auto& r : readers) {
    if (!first) out.push_back(',');
    out += escape_token(r);
    first = false;
  }
  return out;
}

void want(const std::vector<std::string>& toks, std::size_t n, int line_no) {
  if (toks.size() != n) {
    throw ParseError(line_no, toks[0] + " takes " + std::to_string(n - 1) +
                                  " argument(s), got " +
                                  std::to_string(toks.size() - 1));
  }
}

}  // namespace

std::vector<ScenarioCommand> parse_scenario(const std::string& text) {
  std::vector<ScenarioCommand> commands;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    ScenarioCommand cmd;
    cmd.line = line_no;
    const std::string& verb = toks[0];
    if (verb == "REGISTER-PATIENT") {
      want(toks, 2, line_no);
      cmd.verb = ScenarioCommand::Verb::register_patient;
      cmd.actor = unescape_token(toks[1]);
    } else if (verb == "REGISTER-USER") {
      want(toks, 2, line_no);
      cmd.verb = ScenarioCommand::Verb::register_user;
      cmd.actor = unescape_token(toks[1]);
    } else if (verb == "ADD-HOSPITAL") {
      if (toks.size() < 2) throw ParseError(line_no, "ADD-HOSPITAL needs an id");
      cmd.verb = ScenarioCommand::Verb::add_hospital;
      cmd.hospital = unescape_token(toks[1]);
      for (std::size_t i = 2; i < toks.size(); ++i) {
        cmd.staff.push_back(unescape_token(toks[i]));
      }
    } else if (verb == "BIND-DEVICE") {
      want(toks, 5, line_no);
      cmd.verb = ScenarioCommand::Verb::bind_device;
      cmd.device = unescape_token(toks[1]);
      if (toks[2] == "sphone") {
        cmd.kind = DeviceKind::sphone;
      } else if (toks[2] == "home") {
        cmd.kind = DeviceKind::home;
      } else {
        throw ParseError(line_no, "device kind must be sphone or home");
      }
      cmd.actor = unescape_token(toks[3]);
      cmd.credential = unescape_token(toks[4]);
    } else if (verb == "UPLOAD") {
      want(toks, 8, line_no);
      cmd.verb = ScenarioCommand::Verb::upload;
      cmd.device = unescape_token(toks[1]);
      cmd.actor = unescape_token(toks[2]);
      cmd.owner = unescape_token(toks[3]);
      cmd.readers = parse_reader_list(toks[4], line_no);
      cmd.purpose = unescape_token(toks[5]);
      cmd.expiry = parse_u64_or_throw(toks[6], line_no);
      cmd.payload = unescape_token(toks[7]);
    } else if (verb == "DELETE") {
      want(toks, 6, line_no);
      cmd.verb = ScenarioCommand::Verb::del;
      cmd.device = unescape_token(toks[1]);
      cmd.actor = unescape_token(toks[2]);
      cmd.owner = unescape_token(toks[3]);
      cmd.readers = parse_reader_list(toks[4], line_no);
      cmd.payload = unescape_token(toks[5]);
    } else if (verb == "DOWNLOAD") {
      want(toks, 4, line_no);
      cmd.verb = ScenarioCommand::Verb::download;
      cmd.hospital = unescape_token(toks[1]);
      cmd.actor = unescape_token(toks[2]);
      cmd.owner = unescape_token(toks[3]);
    } else if (verb == "RESTRICT") {
      want(toks, 7, line_no);
      cmd.verb = ScenarioCommand::Verb::restrict;
      cmd.device = unescape_token(toks[1]);
      cmd.actor = unescape_token(toks[2]);
      cmd.owner = unescape_token(toks[3]);
      cmd.readers = parse_reader_list(toks[4], line_no);
      cmd.payload = unescape_token(toks[5]);
      if (toks[6] == "true") {
        cmd.flag = true;
      } else if (toks[6] == "false") {
        cmd.flag = false;
      } else {
        throw ParseError(line_no, "flag must be true or false");
      }
    } else if (verb == "TICK") {
      want(toks, 2, line_no);
      cmd.verb = ScenarioCommand::Verb::tick;
      cmd.n = parse_u64_or_throw(toks[1], line_no);
      if (cmd.n < 1) throw ParseError(line_no, "TICK amount must be >= 1");
    } else if (verb == "SWEEP") {
      want(toks, 1, line_no);
      cmd.verb = ScenarioCommand::Verb::sweep;
    } else if (verb == "SAR") {
      want(toks, 3, line_no);
      cmd.verb = ScenarioCommand::Verb::sar;
      cmd.device = unescape_token(toks[1]);
      cmd.actor = unescape_token(toks[2]);
    } else if (verb == "DRAIN") {
      want(toks, 2, line_no);
      cmd.verb = ScenarioCommand::Verb::drain;
      cmd.recipient = unescape_token(toks[1]);
    } else if (verb == "EXPECT-ERROR") {
      want(toks, 2, line_no);
      cmd.verb = ScenarioCommand::Verb::expect_error;
      if (!error_code_from_string(toks[1], cmd.expected) ||
          cmd.expected == ErrorCode::Ok) {
        throw ParseError(line_no, "unknown error code: " + toks[1]);
      }
    } else if (verb == "ASSERT-INVARIANTS") {
      want(toks, 1, line_no);
      cmd.verb = ScenarioCommand::Verb::assert_invariants;
    } else {
      throw ParseError(line_no, "unknown verb: " + verb);
    }
    commands.push_back(std::move(cmd));
  }
  return commands;
}

std::string to_script(const std::vector<ScenarioCommand>& commands) {
  std::string out;
  for (const auto& cmd : commands) {
    using Verb = ScenarioCommand::Verb;
    switch (cmd.verb) {
      case Verb::register_patient:
        out += "REGISTER-PATIENT " + escape_token(cmd.actor);
        break;
      case Verb::register_user:
        out += "REGISTER-USER " + escape_token(cmd.actor);
        break;
      case Verb::add_hospital:
        out += "ADD-HOSPITAL " + escape_token(cmd.hospital);
        for (const auto& s : cmd.staff) out += " " + escape_token(s);
        break;
      case Verb::bind_device:
        out += "BIND-DEVICE " + escape_token(cmd.device) + " " +
               (cmd.kind == DeviceKind::sphone ? "sphone" : "home") + " " +
               escape_token(cmd.actor) + " " + escape_token(cmd.credential);
        break;
      case Verb::upload:
        out += "UPLOAD " + escape_token(cmd.device) + " " +
               escape_token(cmd.actor) + " " + escape_token(cmd.owner) + " " +
               reader_list(cmd.readers) + " " + escape_token(cmd.purpose) +
               " " + std::to_string(cmd.expiry) + " " +
               escape_token(cmd.payload);
        break;
      case Verb::del:
        out += "DELETE " + escape_token(cmd.device) + " " +
               escape_token(cmd.actor) + " " + escape_token(cmd.owner) + " " +
               reader_list(cmd.readers) + " " + escape_token(cmd.payload);
        break;
      case Verb::download:
        out += "DOWNLOAD " + escape_token(cmd.hospital) + " " +
               escape_token(cmd.actor) + " " + escape_token(cmd.owner);
        break;
      case Verb::restrict:
        out += "RESTRICT " + escape_token(cmd.device) + " " +
               escape_token(cmd.actor) + " " + escape_token(cmd.owner) + " " +
               reader_list(cmd.readers) + " " + escape_token(cmd.payload) +
               " " + (cmd.flag ? "true" : "false");
        break;
      case Verb::tick:
        out += "TICK " + std::to_string(cmd.n);
        break;
      case Verb::sweep:
        out += "SWEEP";
        break;
      case Verb::sar:
        out += "SAR " + escape_token(cmd.device) + " " + escape_token(cmd.actor);
        break;
      case Verb::drain:
        out += "DRAIN " + escape_token(cmd.recipient);
        break;
      case Verb::expect_error:
        out += "EXPECT-ERROR " + to_string(cmd.expected);
        break;
      case Verb::assert_invariants:
        out += "ASSERT-INVARIANTS";
        break;
    }
    out.push_back('\n');
  }
  return out;
}

namespace {

struct Runner {
  const RunOptions& options;
  SystemState state;
  ReferenceModel ref;
  TraceChecker checker;
  std::ostringstream trace;
  std::string failure;
  std::uint64_t prev_sweep_bucket = 0;

  explicit Runner(const RunOptions& opts) : options(opts) {}

  bool fail(const std::string& what) {
    if (failure.empty()) failure = what;
    trace << "FAIL " << what << "\n";
    return false;
  }

  bool check_step(int line) {
    for (const auto& v : checker.step(state)) {
      if (!v.pass) {
        return fail("AssertionFailure at line " + std::to_string(line) + ": " +
                    v.id + ": " + v.witness);
      }
    }
    return true;
  }

  bool check_retention(int line) {
    for (const auto& v : checker.check_retention(state)) {
      if (!v.pass) {
        return fail("AssertionFailure at line " + std::to_string(line) + ": " +
                    v.id + ": " + v.witness);
      }
    }
    return true;
  }

  bool diff_messages(const std::vector<Message>& engine,
                     const ReferenceModel::Outcome& oracle, int line) {
    auto project = [](const std::vector<Message>& msgs) {
      std::vector<std::tuple<MsgKind, std::string, std::vector<ItemKey>>> out;
      for (const auto& m : msgs) out.emplace_back(m.kind, m.recipient, m.items);
      return out;
    };
    if (project(engine) != project(oracle.emitted)) {
      return fail("DivergenceError at line " + std::to_string(line) +
                  ": emitted messages differ");
    }
    return true;
  }

  bool diff_state(int line) {
    if (auto why = ref.diverges_from(state)) {
      return fail("DivergenceError at line " + std::to_string(line) + ": " +
                  *why);
    }
    return true;
  }

  // Runs engine and, under --diff, the oracle; returns the engine outcome.
  bool exec(const ScenarioCommand& cmd, ErrorCode& outcome) {
    using Verb = ScenarioCommand::Verb;
    OpResult result;
    ReferenceModel::Outcome oracle;
    bool compare_msgs = true;
    switch (cmd.verb) {
      case Verb::register_patient:
        result = register_patient(state, cmd.actor);
        if (options.diff) oracle = ref.register_patient(cmd.actor);
        break;
      case Verb::register_user:
        result = register_user(state, cmd.actor);
        if (options.diff) oracle = ref.register_user(cmd.actor);
        break;
      case Verb::add_hospital: {
        std::set<ActorId> staff(cmd.staff.begin(), cmd.staff.end());
        result = add_hospital(state, cmd.hospital, staff);
        if (options.diff) oracle = ref.add_hospital(cmd.hospital, cmd.staff);
        break;
      }
      case Verb::bind_device:
        result = bind_device(state, cmd.device, cmd.kind, cmd.actor,
                             cmd.credential);
        if (options.diff) {
          oracle = ref.bind_device(cmd.device, cmd.kind == DeviceKind::sphone,
                                   cmd.actor, cmd.credential);
        }
        break;
      case Verb::upload: {
        DlmLabel label{cmd.owner, cmd.readers};
        Meta meta{cmd.purpose, cmd.expiry, false};
        result = upload(state, cmd.device, cmd.payload, label, meta, cmd.actor);
        if (options.diff) {
          oracle = ref.upload(cmd.device, cmd.payload, label, meta, cmd.actor);
        }
        break;
      }
      case Verb::del: {
        DlmLabel label{cmd.owner, cmd.readers};
        result = delete_item(state, cmd.device, cmd.payload, label, cmd.actor,
                             options.strict_delete);
        if (options.diff) {
          oracle = ref.delete_item(cmd.device, cmd.payload, label, cmd.actor,
                                   options.strict_delete);
        }
        break;
      }
      case Verb::download:
        result = download(state, cmd.hospital, cmd.actor, cmd.owner);
        if (options.diff) oracle = ref.download(cmd.hospital, cmd.actor,
                                                cmd.owner);
        break;
      case Verb::restrict: {
        DlmLabel label{cmd.owner, cmd.readers};
        result = restrict_item(state, cmd.device, cmd.payload, label, cmd.actor,
                               cmd.flag);
        if (options.diff) {
          oracle = ref.restrict_item(cmd.device, cmd.payload, label, cmd.actor,
                                     cmd.flag);
        }
        break;
      }
      case Verb::tick:
        result = tick(state, cmd.n);
        if (options.diff) oracle = ref.tick(cmd.n);
        break;
      case Verb::sweep: {
        std::set<ItemKey> erased;
        result = sweep(state, erased);
        if (options.diff) oracle = ref.sweep();
        for (const auto& key : erased) {
          trace << "  erased " << serialize_key(key) << "\n";
        }
        break;
      }
      case Verb::sar: {
        SarReport report;
        result = subject_access_request(state, cmd.device, cmd.actor, report);
        for (const auto& entry : report.entries) {
          trace << "  sar-item " << serialize_item(entry.key, entry.meta)
                << " locations ";
          for (std::size_t i = 0; i < entry.locations.size(); ++i) {
            if (i > 0) trace << ",";
            trace << entry.locations[i];
          }
          trace << " history " << entry.history.size() << "\n";
        }
        if (options.diff) {
          std::vector<ReferenceModel::SarLine> lines;
          oracle = ref.subject_access_request(cmd.device, cmd.actor, lines);
          if (oracle.outcome == result.outcome && result.ok()) {
            bool same = lines.size() == report.entries.size();
            for (std::size_t i = 0; same && i < lines.size(); ++i) {
              same = lines[i].key == report.entries[i].key &&
                     lines[i].meta == report.entries[i].meta &&
                     lines[i].locations == report.entries[i].locations;
            }
            if (!same) {
              return fail("DivergenceError at line " +
                          std::to_string(cmd.line) + ": SAR report differs");
            }
          }
        }
        break;
      }
      case Verb::drain: {
        std::vector<Message> drained = drain(state, cmd.recipient);
        for (const auto& msg : drained) {
          trace << "  drained " << serialize_message(msg) << "\n";
        }
        if (options.diff) {
          std::vector<Message> oracle_drained = ref.drain(cmd.recipient);
          auto project = [](const std::vector<Message>& msgs) {
            std::vector<std::pair<MsgKind, std::vector<ItemKey>>> out;
            for (const auto& m : msgs) out.emplace_back(m.kind, m.items);
            return out;
          };
          if (project(drained) != project(oracle_drained)) {
            return fail("DivergenceError at line " + std::to_string(cmd.line) +
                        ": drained messages differ");
          }
        }
        compare_msgs = false;
        break;
      }
      case Verb::expect_error:
      case Verb::assert_invariants:
        break;  // handled by the caller
    }
    outcome = result.outcome;
    for (const auto& msg : result.emitted) {
      trace << "  sent " << serialize_message(msg) << "\n";
    }
    if (options.diff) {
      if (oracle.outcome != result.outcome) {
        return fail("DivergenceError at line " + std::to_string(cmd.line) +
                    ": outcome " + to_string(result.outcome) + " vs oracle " +
                    to_string(oracle.outcome));
      }
      if (compare_msgs && !diff_messages(result.emitted, oracle, cmd.line)) {
        return false;
      }
      if (!diff_state(cmd.line)) return false;
    }
    return true;
  }
};

}  // namespace

RunResult run_scenario(const std::vector<ScenarioCommand>& commands,
                       const RunOptions& options) {
  Runner runner(options);
  bool expecting = false;
  ErrorCode expected = ErrorCode::Ok;
  int expect_line = 0;

  for (const auto& cmd : commands) {
    using Verb = ScenarioCommand::Verb;
    if (cmd.verb == Verb::expect_error) {
      if (expecting) {
        runner.fail("AssertionFailure at line " + std::to_string(cmd.line) +
                    ": dangling EXPECT-ERROR");
        break;
      }
      expecting = true;
      expected = cmd.expected;
      expect_line = cmd.line;
      continue;
    }
    if (cmd.verb == Verb::assert_invariants) {
      runner.trace << cmd.line << " ASSERT-INVARIANTS\n";
      if (!runner.check_step(cmd.line)) break;
      continue;
    }

    runner.trace << cmd.line << " "
                 << to_script({cmd}).substr(0, to_script({cmd}).size() - 1)
                 << "\n";
    ErrorCode outcome = ErrorCode::Ok;
    if (!runner.exec(cmd, outcome)) break;
    runner.trace << "  -> " << to_string(outcome) << "\n";

    if (expecting) {
      expecting = false;
      if (outcome != expected) {
        runner.fail("AssertionFailure at line " + std::to_string(expect_line) +
                    ": expected " + to_string(expected) + ", got " +
                    to_string(outcome));
        break;
      }
    }

    // auto-sweep when the clock crosses a multiple of N ticks
    if (cmd.verb == Verb::tick && options.sweep_every > 0) {
      std::uint64_t bucket = runner.state.clock / options.sweep_every;
      if (bucket > runner.prev_sweep_bucket) {
        runner.prev_sweep_bucket = bucket;
        std::set<ItemKey> erased;
        sweep(runner.state, erased);
        if (options.diff) runner.ref.sweep();
        for (const auto& key : erased) {
          runner.trace << "  auto-erased " << serialize_key(key) << "\n";
        }
        if (options.diff && !runner.diff_state(cmd.line)) break;
        if (options.check_each && !runner.check_retention(cmd.line)) break;
      }
    }
    if (cmd.verb == Verb::sweep && options.check_each) {
      if (!runner.check_retention(cmd.line)) break;
    }
    if (options.check_each && !runner.check_step(cmd.line)) break;
  }

  if (runner.failure.empty() && expecting) {
    runner.fail("AssertionFailure at line " + std::to_string(expect_line) +
                ": EXPECT-ERROR with no following command");
  }
  if (runner.failure.empty()) {
    runner.check_step(0);  // check on exit
  }

  RunResult result;
  result.state = std::move(runner.state);
  result.trace = runner.trace.str();
  result.failure = runner.failure;
  result.exit_code = runner.failure.empty() ? 0 : 1;
  return result;
}

}  // namespace gdprsim
