#pragma once

#include <string>
#include <vector>

#include "gdprsim/audit_messaging.hpp"
#include "gdprsim/label_model.hpp"

// Deterministic textual encodings shared by the snapshot, audit dump and
// trace writers. Tokens are %-escaped so composites stay single-column.

namespace gdprsim {

struct DecodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Escapes %, whitespace and the composite separators | , ;
std::string escape_token(const std::string& raw);
std::string unescape_token(const std::string& tok);

// owner|r1,r2|payload
std::string serialize_key(const ItemKey& key);
ItemKey parse_key(const std::string& text);

// owner|r1,r2|payload|purpose|expiry|restricted
std::string serialize_item(const ItemKey& key, const Meta& meta);
void parse_item(const std::string& text, ItemKey& key, Meta& meta);

// comma-joined escaped tokens; empty string for the empty set
std::string serialize_actor_set(const std::set<ActorId>& actors);
std::set<ActorId> parse_actor_set(const std::string& field);

// kind|recipient|opseq|key1;key2
std::string serialize_message(const Message& msg);
Message parse_message(const std::string& text);

const std::string& to_string(MsgKind kind);
bool msg_kind_from_string(const std::string& name, MsgKind& out);

const std::string& to_string(Effect effect);
bool effect_from_string(const std::string& name, Effect& out);

// One line: seq at op actor node object effect outcome
std::string serialize_record(const AuditRecord& record, char sep = '\t');
AuditRecord parse_record(const std::string& line, char sep = '\t');

std::string dump_audit(const std::vector<AuditRecord>& audit);
std::vector<AuditRecord> load_audit(const std::string& text);

}  // namespace gdprsim
