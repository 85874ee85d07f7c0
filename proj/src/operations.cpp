#include "gdprsim/operations.hpp"

#include <algorithm>

#include "gdprsim/encode.hpp"
#include "internal.hpp"

namespace gdprsim {

namespace {

using detail::audit_push;

// All preconditions are checked before the first mutation, so error paths
// return without touching the state.

void emit(SystemState& state, OpResult& result, const std::string& op,
          Message msg) {
  audit_push(state, op, msg.recipient, "outbox", std::nullopt,
             serialize_message(msg), Effect::sent);
  state.outbox.push_back(msg);
  result.emitted.push_back(std::move(msg));
}

// Device tokens of every sphone session bound to the actor, token order.
std::vector<std::string> phone_sessions(const SystemState& state,
                                        const ActorId& actor) {
  std::vector<std::string> out;
  for (const auto& [token, session] : state.devices) {
    if (session.kind == DeviceKind::sphone && session.bound_actor == actor) {
      out.push_back(token);
    }
  }
  return out;
}

OpResult fail(ErrorCode code) { return OpResult{code, {}, {}}; }

}  // namespace

OpResult register_patient(SystemState& state, const ActorId& actor) {
  if (state.auth.patients.contains(actor)) {
    return fail(ErrorCode::DuplicateRegistration);
  }
  state.auth.patients.insert(actor);
  audit_push(state, "register_patient", actor, "auth", std::nullopt, "",
             Effect::registered);
  return {};
}

OpResult register_user(SystemState& state, const ActorId& actor) {
  if (state.auth.reg_usrs.contains(actor)) {
    return fail(ErrorCode::DuplicateRegistration);
  }
  state.auth.reg_usrs.insert(actor);
  audit_push(state, "register_user", actor, "auth", std::nullopt, "",
             Effect::registered);
  return {};
}

OpResult add_hospital(SystemState& state, const ActorId& hospital_id,
                      const std::set<ActorId>& staff) {
  if (state.hospitals.contains(hospital_id)) {
    return fail(ErrorCode::DuplicateRegistration);
  }
  state.hospitals[hospital_id] = HospitalNode{hospital_id, staff, {}};
  audit_push(state, "add_hospital", hospital_id, "auth", std::nullopt,
             serialize_actor_set(staff), Effect::registered);
  return {};
}

OpResult bind_device(SystemState& state, const std::string& device_id,
                     DeviceKind kind, const ActorId& actor,
                     const std::string& credential) {
  if (state.devices.contains(device_id)) {
    return fail(ErrorCode::DuplicateRegistration);
  }
  state.devices[device_id] = DeviceSession{device_id, kind, actor, credential};
  std::string object = escape_token(device_id) + "|" +
                       (kind == DeviceKind::sphone ? "sphone" : "home") + "|" +
                       escape_token(credential);
  audit_push(state, "bind_device", actor, "auth", std::nullopt, object,
             Effect::registered);
  return {};
}

ErrorCode authenticate(const SystemState& state, const std::string& device_id,
                       const ActorId& claimed_id) {
  auto it = state.devices.find(device_id);
  if (it == state.devices.end()) return ErrorCode::UnknownDevice;
  if (it->second.bound_actor != claimed_id) return ErrorCode::AuthMismatch;
  return ErrorCode::Ok;
}

OpResult upload(SystemState& state, const std::string& device_id,
                const std::string& payload, const DlmLabel& label,
                const Meta& meta, const ActorId& claimed_id) {
  if (ErrorCode code = authenticate(state, device_id, claimed_id);
      code != ErrorCode::Ok) {
    return fail(code);
  }
  if (claimed_id != label.owner) return fail(ErrorCode::AuthMismatch);
  if (!state.auth.patients.contains(label.owner)) {
    return fail(ErrorCode::NotAPatient);
  }
  if (!std::ranges::includes(state.auth.reg_usrs, label.readers)) {
    return fail(ErrorCode::UnregisteredReader);
  }

  ItemKey key{label, payload};
  Meta stored = meta;
  stored.restricted = false;  // restriction is requested later, never at upload
  state.db.table[key] = stored;  // set union; re-upload refreshes meta

  OpResult result;
  result.touched.insert(key);
  std::uint64_t op_seq = state.audit.size();
  audit_push(state, "upload", claimed_id, "db", key, serialize_item(key, stored),
             Effect::added);
  emit(state, result, "upload",
       Message{MsgKind::upload_ok, device_id, {key}, op_seq});
  return result;
}

OpResult delete_item(SystemState& state, const std::string& device_id,
                     const std::string& payload, const DlmLabel& label,
                     const ActorId& claimed_id, bool strict) {
  if (ErrorCode code = authenticate(state, device_id, claimed_id);
      code != ErrorCode::Ok) {
    return fail(code);
  }
  if (claimed_id != label.owner) return fail(ErrorCode::AuthMismatch);
  if (state.devices.at(device_id).kind != DeviceKind::sphone) {
    return fail(ErrorCode::WrongDeviceKind);
  }
  ItemKey key{label, payload};
  if (!state.db.table.contains(key)) return fail(ErrorCode::NotFound);
  if (strict) {
    for (const auto& reader : label.readers) {
      auto it = state.hospitals.find(reader);
      if (it != state.hospitals.end() && !it->second.table.contains(key)) {
        return fail(ErrorCode::StrictPreconditionFailed);
      }
    }
  }

  OpResult result;
  result.touched.insert(key);
  std::uint64_t op_seq = state.audit.size();
  state.db.table.erase(key);
  audit_push(state, "delete", claimed_id, "db", key, serialize_key(key),
             Effect::removed);
  for (auto& [hid, node] : state.hospitals) {
    if (node.table.erase(key) > 0) {
      audit_push(state, "delete", claimed_id, hid, key, serialize_key(key),
                 Effect::removed);
    }
  }
  emit(state, result, "delete",
       Message{MsgKind::delete_ok, device_id, {key}, op_seq});
  return result;
}

OpResult download(SystemState& state, const ActorId& hospital_id,
                  const ActorId& claimed_id, const ActorId& owner) {
  auto hosp_it = state.hospitals.find(hospital_id);
  if (hosp_it == state.hospitals.end()) return fail(ErrorCode::UnknownHospital);
  HospitalNode& hospital = hosp_it->second;
  if (!hospital.staff.contains(claimed_id)) return fail(ErrorCode::NotStaff);
  if (!state.auth.patients.contains(owner)) return fail(ErrorCode::NotAPatient);
  if (!state.auth.reg_usrs.contains(hospital_id)) {
    return fail(ErrorCode::HospitalNotRegistered);
  }

  std::vector<std::pair<ItemKey, Meta>> matches;
  for (const auto& [key, meta] : state.db.table) {
    if (key.label.owner == owner && key.label.readers.contains(hospital_id) &&
        !meta.restricted) {
      matches.emplace_back(key, meta);
    }
  }
  if (matches.empty()) return fail(ErrorCode::NoAccessibleData);

  OpResult result;
  std::uint64_t op_seq = state.audit.size();
  for (const auto& [key, meta] : matches) {
    hospital.table[key] = meta;  // meta travels with the copy
    result.touched.insert(key);
    audit_push(state, "download", claimed_id, hospital_id, key,
               serialize_item(key, meta), Effect::added);
  }
  // One access notice per item, to each sphone session of the owner; with no
  // session the message parks in the outbox addressed to the owner directly.
  std::vector<std::string> phones = phone_sessions(state, owner);
  for (const auto& [key, meta] : matches) {
    if (phones.empty()) {
      emit(state, result, "download",
           Message{MsgKind::access, owner, {key}, op_seq});
    } else {
      for (const auto& token : phones) {
        emit(state, result, "download",
             Message{MsgKind::access, token, {key}, op_seq});
      }
    }
  }
  std::vector<ItemKey> keys;
  for (const auto& [key, meta] : matches) keys.push_back(key);
  emit(state, result, "download",
       Message{MsgKind::download_ok, claimed_id, keys, op_seq});
  return result;
}

OpResult restrict_item(SystemState& state, const std::string& device_id,
                       const std::string& payload, const DlmLabel& label,
                       const ActorId& claimed_id, bool flag) {
  if (ErrorCode code = authenticate(state, device_id, claimed_id);
      code != ErrorCode::Ok) {
    return fail(code);
  }
  if (claimed_id != label.owner) return fail(ErrorCode::AuthMismatch);
  if (state.devices.at(device_id).kind != DeviceKind::sphone) {
    return fail(ErrorCode::WrongDeviceKind);
  }
  ItemKey key{label, payload};
  auto it = state.db.table.find(key);
  if (it == state.db.table.end()) return fail(ErrorCode::NotFound);

  it->second.restricted = flag;  // db copy only; hospital copies keep theirs
  OpResult result;
  result.touched.insert(key);
  audit_push(state, "restrict", claimed_id, "db", key,
             serialize_item(key, it->second), Effect::flagged);
  return result;
}

OpResult subject_access_request(SystemState& state, const std::string& device_id,
                                const ActorId& claimed_id, SarReport& report) {
  if (ErrorCode code = authenticate(state, device_id, claimed_id);
      code != ErrorCode::Ok) {
    return fail(code);
  }
  if (!state.auth.patients.contains(claimed_id)) {
    return fail(ErrorCode::NotAPatient);
  }

  std::map<ItemKey, SarEntry> entries;
  for (const auto& [key, meta] : state.db.table) {
    if (key.label.owner != claimed_id) continue;
    entries[key] = SarEntry{key, meta, {"db"}, {}};
  }
  for (const auto& [hid, node] : state.hospitals) {
    for (const auto& [key, meta] : node.table) {
      if (key.label.owner != claimed_id) continue;
      auto it = entries.find(key);
      if (it == entries.end()) {
        entries[key] = SarEntry{key, meta, {hid}, {}};
      } else {
        it->second.locations.push_back(hid);
      }
    }
  }
  report.subject = claimed_id;
  report.entries.clear();
  for (auto& [key, entry] : entries) {
    for (const auto& record : state.audit) {
      if (record.item && *record.item == key) entry.history.push_back(record);
    }
    report.entries.push_back(std::move(entry));
  }

  audit_push(state, "sar", claimed_id, "db", std::nullopt, "", Effect::read);
  OpResult result;
  return result;
}

std::vector<Message> drain(SystemState& state, const std::string& recipient) {
  std::vector<Message> out;
  std::vector<Message> kept;
  for (auto& msg : state.outbox) {
    if (msg.recipient == recipient) {
      out.push_back(std::move(msg));
    } else {
      kept.push_back(std::move(msg));
    }
  }
  state.outbox = std::move(kept);
  audit_push(state, "drain", recipient, "outbox", std::nullopt, "",
             Effect::drained);
  return out;
}

}  // namespace gdprsim
