#include "gdprsim/snapshot.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "gdprsim/encode.hpp"

namespace gdprsim {

namespace {

constexpr const char* kHeader = "gdprsim-snapshot 1";

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ' ') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::uint64_t parse_u64(const std::string& text, int line_no) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw CorruptSnapshot(line_no, "bad integer: " + text);
  }
  return value;
}

}  // namespace

std::string snapshot_to_string(const SystemState& state) {
  std::string out;
  out += kHeader;
  out += '\n';
  out += "clock " + std::to_string(state.clock) + "\n";
  for (const auto& p : state.auth.patients) {
    out += "patient " + escape_token(p) + "\n";
  }
  for (const auto& u : state.auth.reg_usrs) {
    out += "reguser " + escape_token(u) + "\n";
  }
  for (const auto& [hid, node] : state.hospitals) {
    std::string staff = serialize_actor_set(node.staff);
    out += "hospital " + escape_token(hid) + " " +
           (staff.empty() ? "-" : staff) + "\n";
  }
  for (const auto& [token, session] : state.devices) {
    out += "device " + escape_token(token) + " " +
           (session.kind == DeviceKind::sphone ? "sphone" : "home") + " " +
           escape_token(session.bound_actor) + " " +
           escape_token(session.credential) + "\n";
  }
  for (const auto& [key, meta] : state.db.table) {
    out += "dbitem " + serialize_item(key, meta) + "\n";
  }
  for (const auto& [hid, node] : state.hospitals) {
    for (const auto& [key, meta] : node.table) {
      out += "hospitem " + escape_token(hid) + " " + serialize_item(key, meta) +
             "\n";
    }
  }
  for (const auto& record : state.audit) {
    out += "audit " + serialize_record(record, ' ') + "\n";
  }
  for (const auto& msg : state.outbox) {
    out += "msg " + serialize_message(msg) + "\n";
  }
  out += "end\n";
  return out;
}

SystemState snapshot_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line) || line != kHeader) {
    throw FormatVersionMismatch("expected '" + std::string(kHeader) + "'");
  }
  line_no = 1;
  SystemState state;
  bool ended = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (ended) throw CorruptSnapshot(line_no, "content after end marker");
    auto fields = split_ws(line);
    const std::string& tag = fields[0];
    try {
      if (tag == "end") {
        ended = true;
      } else if (tag == "clock" && fields.size() == 2) {
        state.clock = parse_u64(fields[1], line_no);
      } else if (tag == "patient" && fields.size() == 2) {
        state.auth.patients.insert(unescape_token(fields[1]));
      } else if (tag == "reguser" && fields.size() == 2) {
        state.auth.reg_usrs.insert(unescape_token(fields[1]));
      } else if (tag == "hospital" && fields.size() == 3) {
        ActorId hid = unescape_token(fields[1]);
        std::set<ActorId> staff =
            fields[2] == "-" ? std::set<ActorId>{} : parse_actor_set(fields[2]);
        state.hospitals[hid] = HospitalNode{hid, std::move(staff), {}};
      } else if (tag == "device" && fields.size() == 5) {
        DeviceSession session;
        session.device_id = unescape_token(fields[1]);
        if (fields[2] == "sphone") {
          session.kind = DeviceKind::sphone;
        } else if (fields[2] == "home") {
          session.kind = DeviceKind::home;
        } else {
          throw CorruptSnapshot(line_no, "bad device kind: " + fields[2]);
        }
        session.bound_actor = unescape_token(fields[3]);
        session.credential = unescape_token(fields[4]);
        state.devices[session.device_id] = std::move(session);
      } else if (tag == "dbitem" && fields.size() == 2) {
        ItemKey key;
        Meta meta;
        parse_item(fields[1], key, meta);
        state.db.table[key] = meta;
      } else if (tag == "hospitem" && fields.size() == 3) {
        ActorId hid = unescape_token(fields[1]);
        auto it = state.hospitals.find(hid);
        if (it == state.hospitals.end()) {
          throw CorruptSnapshot(line_no, "item for unknown hospital " + hid);
        }
        ItemKey key;
        Meta meta;
        parse_item(fields[2], key, meta);
        it->second.table[key] = meta;
      } else if (tag == "audit" && fields.size() == 9) {
        std::string rest = line.substr(6);  // strip "audit "
        state.audit.push_back(parse_record(rest, ' '));
      } else if (tag == "msg" && fields.size() == 2) {
        state.outbox.push_back(parse_message(fields[1]));
      } else {
        throw CorruptSnapshot(line_no, "unrecognized line: " + line);
      }
    } catch (const DecodeError& e) {
      throw CorruptSnapshot(line_no, e.what());
    }
  }
  if (!ended) throw CorruptSnapshot(line_no, "missing end marker (truncated?)");
  return state;
}

void snapshot_save(const SystemState& state, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << snapshot_to_string(state);
}

SystemState snapshot_load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return snapshot_from_string(buf.str());
}

}  // namespace gdprsim
