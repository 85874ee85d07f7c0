#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gdprsim/errors.hpp"
#include "gdprsim/system_state.hpp"

namespace gdprsim {

// Naive executable semantics for differential testing: plain vectors,
// linear scans, no indexing. Shares value types (labels, messages) with
// the engine but none of its table machinery.
class ReferenceModel {
 public:
  struct Outcome {
    ErrorCode outcome = ErrorCode::Ok;
    std::vector<Message> emitted;
  };

  struct SarLine {
    ItemKey key;
    Meta meta;
    std::vector<std::string> locations;
  };

  Outcome register_patient(const ActorId& actor);
  Outcome register_user(const ActorId& actor);
  Outcome add_hospital(const ActorId& hospital_id,
                       const std::vector<ActorId>& staff);
  Outcome bind_device(const std::string& device_id, bool is_phone,
                      const ActorId& actor, const std::string& credential);
  Outcome upload(const std::string& device_id, const std::string& payload,
                 const DlmLabel& label, const Meta& meta,
                 const ActorId& claimed_id);
  Outcome delete_item(const std::string& device_id, const std::string& payload,
                      const DlmLabel& label, const ActorId& claimed_id,
                      bool strict);
  Outcome download(const ActorId& hospital_id, const ActorId& claimed_id,
                   const ActorId& owner);
  Outcome restrict_item(const std::string& device_id, const std::string& payload,
                        const DlmLabel& label, const ActorId& claimed_id,
                        bool flag);
  Outcome subject_access_request(const std::string& device_id,
                                 const ActorId& claimed_id,
                                 std::vector<SarLine>& report);
  Outcome tick(std::uint64_t n);
  Outcome sweep();
  std::vector<Message> drain(const std::string& recipient);

  // Description of the first mismatch against the engine state, or nullopt.
  // Messages are compared per recipient on (kind, item keys).
  std::optional<std::string> diverges_from(const SystemState& engine) const;

 private:
  struct Item {
    ActorId owner;
    std::vector<ActorId> readers;  // sorted
    std::string payload;
    Meta meta;
  };
  struct Hospital {
    ActorId id;
    std::vector<ActorId> staff;
    std::vector<Item> table;
  };
  struct Device {
    std::string id;
    bool is_phone = true;
    ActorId actor;
    std::string credential;
  };

  static ItemKey key_of(const Item& item);
  static bool same_key(const Item& item, const DlmLabel& label,
                       const std::string& payload);
  Item* find_item(std::vector<Item>& table, const DlmLabel& label,
                  const std::string& payload);
  Hospital* find_hospital(const ActorId& id);
  Device* find_device(const std::string& id);
  ErrorCode authenticate(const std::string& device_id, const ActorId& claimed);
  std::vector<std::string> phones_of(const ActorId& actor) const;
  void emit(Outcome& out, Message msg);

  std::vector<ActorId> patients_;
  std::vector<ActorId> reg_usrs_;
  std::vector<Item> db_;
  std::vector<Hospital> hospitals_;
  std::vector<Device> devices_;
  std::uint64_t clock_ = 0;
  std::vector<Message> outbox_;
};

}  // namespace gdprsim
