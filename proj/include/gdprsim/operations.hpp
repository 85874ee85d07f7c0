#pragma once

#include <set>
#include <string>
#include <vector>

#include "gdprsim/errors.hpp"
#include "gdprsim/system_state.hpp"

namespace gdprsim {

struct OpResult {
  ErrorCode outcome = ErrorCode::Ok;
  std::vector<Message> emitted;
  std::set<ItemKey> touched;

  bool ok() const { return outcome == ErrorCode::Ok; }
};

// Registry setup. All operations leave the state untouched on error.
OpResult register_patient(SystemState& state, const ActorId& actor);
OpResult register_user(SystemState& state, const ActorId& actor);
OpResult add_hospital(SystemState& state, const ActorId& hospital_id,
                      const std::set<ActorId>& staff);
OpResult bind_device(SystemState& state, const std::string& device_id,
                     DeviceKind kind, const ActorId& actor,
                     const std::string& credential);

// Stand-in for the authentication protocol: the session must be bound to
// exactly the claimed identity.
ErrorCode authenticate(const SystemState& state, const std::string& device_id,
                       const ActorId& claimed_id);

OpResult upload(SystemState& state, const std::string& device_id,
                const std::string& payload, const DlmLabel& label,
                const Meta& meta, const ActorId& claimed_id);

OpResult delete_item(SystemState& state, const std::string& device_id,
                     const std::string& payload, const DlmLabel& label,
                     const ActorId& claimed_id, bool strict);

OpResult download(SystemState& state, const ActorId& hospital_id,
                  const ActorId& claimed_id, const ActorId& owner);

OpResult restrict_item(SystemState& state, const std::string& device_id,
                       const std::string& payload, const DlmLabel& label,
                       const ActorId& claimed_id, bool flag);

struct SarEntry {
  ItemKey key;
  Meta meta;                           // db copy if present, else first holder
  std::vector<std::string> locations;  // "db" and/or hospital ids, sorted
  std::vector<AuditRecord> history;
};

struct SarReport {
  ActorId subject;
  std::vector<SarEntry> entries;  // key order
};

OpResult subject_access_request(SystemState& state, const std::string& device_id,
                                const ActorId& claimed_id, SarReport& report);

}  // namespace gdprsim
