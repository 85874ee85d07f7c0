#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gdprsim/audit_messaging.hpp"
#include "gdprsim/label_model.hpp"

namespace gdprsim {

struct AuthRegistry {
  std::set<ActorId> patients;
  std::set<ActorId> reg_usrs;  // may overlap with patients

  auto operator<=>(const AuthRegistry&) const = default;
};

// Keyed by item identity; meta rides along as the mapped value.
using Table = std::map<ItemKey, Meta>;

struct CloudDb {
  Table table;

  auto operator<=>(const CloudDb&) const = default;
};

struct HospitalNode {
  ActorId hospital_id;
  std::set<ActorId> staff;
  Table table;

  auto operator<=>(const HospitalNode&) const = default;
};

enum class DeviceKind { sphone, home };

// Outside the security perimeter: a session never holds labelled items.
struct DeviceSession {
  std::string device_id;
  DeviceKind kind = DeviceKind::sphone;
  ActorId bound_actor;
  std::string credential;

  auto operator<=>(const DeviceSession&) const = default;
};

struct SystemState {
  AuthRegistry auth;
  CloudDb db;
  std::map<ActorId, HospitalNode> hospitals;      // key == hospital_id
  std::map<std::string, DeviceSession> devices;   // key == device_id
  std::uint64_t clock = 0;
  std::vector<AuditRecord> audit;
  std::vector<Message> outbox;

  bool operator==(const SystemState&) const = default;
};

}  // namespace gdprsim
