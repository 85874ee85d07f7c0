#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gdprsim/errors.hpp"
#include "gdprsim/label_model.hpp"

namespace gdprsim {

struct SystemState;

// The four schema-named notification kinds.
enum class MsgKind { upload_ok, delete_ok, download_ok, access };

struct Message {
  MsgKind kind = MsgKind::upload_ok;
  std::string recipient;       // actor id or device token
  std::vector<ItemKey> items;  // correlation
  std::uint64_t op_seq = 0;    // audit seq of the originating operation's first record

  auto operator<=>(const Message&) const = default;
};

enum class Effect { added, removed, read, flagged, registered, ticked, sent, drained };

struct AuditRecord {
  std::uint64_t seq = 0;
  std::uint64_t at = 0;  // clock tick
  std::string op;
  ActorId actor;
  std::string node;  // "db", "auth", "clock", "outbox" or a hospital id
  std::optional<ItemKey> item;
  std::string object;  // serialized payload, enough to replay the effect
  Effect effect = Effect::read;
  ErrorCode outcome = ErrorCode::Ok;

  auto operator<=>(const AuditRecord&) const = default;
};

struct SequenceGapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Appends with the gapless-seq check; throws SequenceGapError on violation.
void append(std::vector<AuditRecord>& audit, AuditRecord record);

// Removes and returns all outbox messages for the recipient, emission order.
std::vector<Message> drain(SystemState& state, const std::string& recipient);

// All records whose item is owned by owner, in seq order.
std::vector<AuditRecord> query_audit(const SystemState& state, const ActorId& owner);

}  // namespace gdprsim
