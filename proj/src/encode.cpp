#include "gdprsim/encode.hpp"

#include <array>
#include <charconv>
#include <sstream>

namespace gdprsim {

namespace {

bool needs_escape(char c) {
  return c == '%' || c == '|' || c == ',' || c == ';' || c == ' ' ||
         c == '\t' || c == '\n' || c == '\r';
}

int hex_val(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::uint64_t parse_u64(const std::string& text) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw DecodeError("bad integer: " + text);
  }
  return value;
}

const std::array<std::string, 4> kMsgKinds = {"upload_ok", "delete_ok",
                                              "download_ok", "access"};
const std::array<std::string, 8> kEffects = {"added",      "removed", "read",
                                             "flagged",    "registered",
                                             "ticked",     "sent",    "drained"};

}  // namespace

std::string escape_token(const std::string& raw) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  out.reserve(raw.size());
  for (unsigned char c : raw) {
    if (needs_escape(static_cast<char>(c))) {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xF]);
    } else {
      out.push_back(static_cast<char>(c));
    }
  }
  return out;
}

std::string unescape_token(const std::string& tok) {
  std::string out;
  out.reserve(tok.size());
  for (std::size_t i = 0; i < tok.size(); ++i) {
    if (tok[i] == '%') {
      if (i + 2 >= tok.size()) throw DecodeError("truncated escape: " + tok);
      int hi = hex_val(tok[i + 1]);
      int lo = hex_val(tok[i + 2]);
      if (hi < 0 || lo < 0) throw DecodeError("bad escape: " + tok);
      out.push_back(static_cast<char>(hi * 16 + lo));
      i += 2;
    } else {
      out.push_back(tok[i]);
    }
  }
  return out;
}

namespace {

std::string readers_field(const std::set<ActorId>& readers) {
  std::string out;
  bool first = true;
  for (const auto& r : readers) {
    if (!first) out.push_back(',');
    out += escape_token(r);
    first = false;
  }
  return out;
}

std::set<ActorId> parse_readers(const std::string& field) {
  std::set<ActorId> out;
  if (field.empty()) return out;
  for (const auto& tok : split(field, ',')) out.insert(unescape_token(tok));
  return out;
}

}  // namespace

std::string serialize_actor_set(const std::set<ActorId>& actors) {
  return readers_field(actors);
}

std::set<ActorId> parse_actor_set(const std::string& field) {
  return parse_readers(field);
}

std::string serialize_key(const ItemKey& key) {
  return escape_token(key.label.owner) + "|" + readers_field(key.label.readers) +
         "|" + escape_token(key.payload);
}

ItemKey parse_key(const std::string& text) {
  auto fields = split(text, '|');
  if (fields.size() != 3) throw DecodeError("bad key: " + text);
  ItemKey key;
  key.label.owner = unescape_token(fields[0]);
  key.label.readers = parse_readers(fields[1]);
  key.payload = unescape_token(fields[2]);
  return key;
}

std::string serialize_item(const ItemKey& key, const Meta& meta) {
  return serialize_key(key) + "|" + escape_token(meta.purpose) + "|" +
         std::to_string(meta.expiry) + "|" + (meta.restricted ? "1" : "0");
}

void parse_item(const std::string& text, ItemKey& key, Meta& meta) {
  auto fields = split(text, '|');
  if (fields.size() != 6) throw DecodeError("bad item: " + text);
  key.label.owner = unescape_token(fields[0]);
  key.label.readers = parse_readers(fields[1]);
  key.payload = unescape_token(fields[2]);
  meta.purpose = unescape_token(fields[3]);
  meta.expiry = parse_u64(fields[4]);
  if (fields[5] != "0" && fields[5] != "1") throw DecodeError("bad flag: " + text);
  meta.restricted = fields[5] == "1";
}

std::string serialize_message(const Message& msg) {
  std::string keys;
  bool first = true;
  for (const auto& key : msg.items) {
    if (!first) keys.push_back(';');
    keys += serialize_key(key);
    first = false;
  }
  return to_string(msg.kind) + "|" + escape_token(msg.recipient) + "|" +
         std::to_string(msg.op_seq) + "|" + keys;
}

Message parse_message(const std::string& text) {
  auto fields = split(text, '|');
  // a key itself contains two '|' separators, so expect 4 + 3*(n-1) fields
  if (fields.size() < 4) throw DecodeError("bad message: " + text);
  Message msg;
  if (!msg_kind_from_string(fields[0], msg.kind)) {
    throw DecodeError("bad message kind: " + fields[0]);
  }
  msg.recipient = unescape_token(fields[1]);
  msg.op_seq = parse_u64(fields[2]);
  std::string keys;
  for (std::size_t i = 3; i < fields.size(); ++i) {
    if (i > 3) keys.push_back('|');
    keys += fields[i];
  }
  if (!keys.empty()) {
    for (const auto& part : split(keys, ';')) msg.items.push_back(parse_key(part));
  }
  return msg;
}

const std::string& to_string(MsgKind kind) {
  return kMsgKinds[static_cast<std::size_t>(kind)];
}

bool msg_kind_from_string(const std::string& name, MsgKind& out) {
  for (std::size_t i = 0; i < kMsgKinds.size(); ++i) {
    if (kMsgKinds[i] == name) {
      out = static_cast<MsgKind>(i);
      return true;
    }
  }
  return false;
}

const std::string& to_string(Effect effect) {
  return kEffects[static_cast<std::size_t>(effect)];
}

bool effect_from_string(const std::string& name, Effect& out) {
  for (std::size_t i = 0; i < kEffects.size(); ++i) {
    if (kEffects[i] == name) {
      out = static_cast<Effect>(i);
      return true;
    }
  }
  return false;
}

std::string serialize_record(const AuditRecord& record, char sep) {
  std::string line;
  line += std::to_string(record.seq);
  line += sep;
  line += std::to_string(record.at);
  line += sep;
  line += escape_token(record.op);
  line += sep;
  line += escape_token(record.actor);
  line += sep;
  line += escape_token(record.node);
  line += sep;
  line += record.object.empty() ? "-" : record.object;
  line += sep;
  line += to_string(record.effect);
  line += sep;
  line += to_string(record.outcome);
  return line;
}

AuditRecord parse_record(const std::string& line, char sep) {
  auto fields = split(line, sep);
  if (fields.size() != 8) throw DecodeError("bad record: " + line);
  AuditRecord record;
  record.seq = parse_u64(fields[0]);
  record.at = parse_u64(fields[1]);
  record.op = unescape_token(fields[2]);
  record.actor = unescape_token(fields[3]);
  record.node = unescape_token(fields[4]);
  record.object = fields[5] == "-" ? "" : fields[5];
  if (!effect_from_string(fields[6], record.effect)) {
    throw DecodeError("bad effect: " + fields[6]);
  }
  if (!error_code_from_string(fields[7], record.outcome)) {
    throw DecodeError("bad outcome: " + fields[7]);
  }
  switch (record.effect) {
    case Effect::added:
    case Effect::flagged: {
      ItemKey key;
      Meta meta;
      parse_item(record.object, key, meta);
      record.item = key;
      break;
    }
    case Effect::removed:
      record.item = parse_key(record.object);
      break;
    default:
      break;
  }
  return record;
}

std::string dump_audit(const std::vector<AuditRecord>& audit) {
  std::string out;
  for (const auto& record : audit) {
    out += serialize_record(record);
    out.push_back('\n');
  }
  return out;
}

std::vector<AuditRecord> load_audit(const std::string& text) {
  std::vector<AuditRecord> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(parse_record(line));
  }
  return out;
}

}  // namespace gdprsim
