#include "gdprsim/reference_model.hpp"

#include <algorithm>
#include <sstream>

#include "gdprsim/encode.hpp"

namespace gdprsim {

namespace {

bool contains(const std::vector<ActorId>& haystack, const ActorId& needle) {
  return std::find(haystack.begin(), haystack.end(), needle) != haystack.end();
}

}  // namespace

ItemKey ReferenceModel::key_of(const Item& item) {
  ItemKey key;
  key.label.owner = item.owner;
  key.label.readers.insert(item.readers.begin(), item.readers.end());
  key.payload = item.payload;
  return key;
}

bool ReferenceModel::same_key(const Item& item, const DlmLabel& label,
                              const std::string& payload) {
  if (item.owner != label.owner || item.payload != payload) return false;
  std::vector<ActorId> readers(label.readers.begin(), label.readers.end());
  return item.readers == readers;
}

ReferenceModel::Item* ReferenceModel::find_item(std::vector<Item>& table,
                                                const DlmLabel& label,
                                                const std::string& payload) {
  for (auto& item : table) {
    if (same_key(item, label, payload)) return &item;
  }
  return nullptr;
}

ReferenceModel::Hospital* ReferenceModel::find_hospital(const ActorId& id) {
  for (auto& hospital : hospitals_) {
    if (hospital.id == id) return &hospital;
  }
  return nullptr;
}

ReferenceModel::Device* ReferenceModel::find_device(const std::string& id) {
  for (auto& device : devices_) {
    if (device.id == id) return &device;
  }
  return nullptr;
}

ErrorCode ReferenceModel::authenticate(const std::string& device_id,
                                       const ActorId& claimed) {
  Device* device = find_device(device_id);
  if (device == nullptr) return ErrorCode::UnknownDevice;
  if (device->actor != claimed) return ErrorCode::AuthMismatch;
  return ErrorCode::Ok;
}

std::vector<std::string> ReferenceModel::phones_of(const ActorId& actor) const {
  std::vector<std::string> out;
  for (const auto& device : devices_) {
    if (device.is_phone && device.actor == actor) out.push_back(device.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void ReferenceModel::emit(Outcome& out, Message msg) {
  outbox_.push_back(msg);
  out.emitted.push_back(std::move(msg));
}

ReferenceModel::Outcome ReferenceModel::register_patient(const ActorId& actor) {
  if (contains(patients_, actor)) return {ErrorCode::DuplicateRegistration, {}};
  patients_.push_back(actor);
  return {};
}

ReferenceModel::Outcome ReferenceModel::register_user(const ActorId& actor) {
  if (contains(reg_usrs_, actor)) return {ErrorCode::DuplicateRegistration, {}};
  reg_usrs_.push_back(actor);
  return {};
}

ReferenceModel::Outcome ReferenceModel::add_hospital(
    const ActorId& hospital_id, const std::vector<ActorId>& staff) {
  if (find_hospital(hospital_id) != nullptr) {
    return {ErrorCode::DuplicateRegistration, {}};
  }
  Hospital hospital;
  hospital.id = hospital_id;
  hospital.staff = staff;
  std::sort(hospital.staff.begin(), hospital.staff.end());
  hospital.staff.erase(
      std::unique(hospital.staff.begin(), hospital.staff.end()),
      hospital.staff.end());
  hospitals_.push_back(std::move(hospital));
  return {};
}

ReferenceModel::Outcome ReferenceModel::bind_device(
    const std::string& device_id, bool is_phone, const ActorId& actor,
    const std::string& credential) {
  if (find_device(device_id) != nullptr) {
    return {ErrorCode::DuplicateRegistration, {}};
  }
  devices_.push_back(Device{device_id, is_phone, actor, credential});
  return {};
}

ReferenceModel::Outcome ReferenceModel::upload(const std::string& device_id,
                                               const std::string& payload,
                                               const DlmLabel& label,
                                               const Meta& meta,
                                               const ActorId& claimed_id) {
  if (ErrorCode code = authenticate(device_id, claimed_id);
      code != ErrorCode::Ok) {
    return {code, {}};
  }
  if (claimed_id != label.owner) return {ErrorCode::AuthMismatch, {}};
  if (!contains(patients_, label.owner)) return {ErrorCode::NotAPatient, {}};
  for (const auto& reader : label.readers) {
    if (!contains(reg_usrs_, reader)) return {ErrorCode::UnregisteredReader, {}};
  }

  Meta stored = meta;
  stored.restricted = false;
  if (Item* existing = find_item(db_, label, payload)) {
    existing->meta = stored;
  } else {
    Item item;
    item.owner = label.owner;
    item.readers.assign(label.readers.begin(), label.readers.end());
    item.payload = payload;
    item.meta = stored;
    db_.push_back(std::move(item));
  }

  Outcome out;
  emit(out, Message{MsgKind::upload_ok, device_id,
                    {ItemKey{label, payload}}, 0});
  return out;
}

ReferenceModel::Outcome ReferenceModel::delete_item(
    const std::string& device_id, const std::string& payload,
    const DlmLabel& label, const ActorId& claimed_id, bool strict) {
  if (ErrorCode code = authenticate(device_id, claimed_id);
      code != ErrorCode::Ok) {
    return {code, {}};
  }
  if (claimed_id != label.owner) return {ErrorCode::AuthMismatch, {}};
  if (!find_device(device_id)->is_phone) return {ErrorCode::WrongDeviceKind, {}};
  if (find_item(db_, label, payload) == nullptr) return {ErrorCode::NotFound, {}};
  if (strict) {
    for (const auto& reader : label.readers) {
      Hospital* hospital = find_hospital(reader);
      if (hospital != nullptr &&
          find_item(hospital->table, label, payload) == nullptr) {
        return {ErrorCode::StrictPreconditionFailed, {}};
      }
    }
  }

  std::erase_if(db_, [&](const Item& item) {
    return same_key(item, label, payload);
  });
  for (auto& hospital : hospitals_) {
    std::erase_if(hospital.table, [&](const Item& item) {
      return same_key(item, label, payload);
    });
  }
  Outcome out;
  emit(out, Message{MsgKind::delete_ok, device_id,
                    {ItemKey{label, payload}}, 0});
  return out;
}

ReferenceModel::Outcome ReferenceModel::download(const ActorId& hospital_id,
                                                 const ActorId& claimed_id,
                                                 const ActorId& owner) {
  Hospital* hospital = find_hospital(hospital_id);
  if (hospital == nullptr) return {ErrorCode::UnknownHospital, {}};
  if (!contains(hospital->staff, claimed_id)) return {ErrorCode::NotStaff, {}};
  if (!contains(patients_, owner)) return {ErrorCode::NotAPatient, {}};
  if (!contains(reg_usrs_, hospital_id)) {
    return {ErrorCode::HospitalNotRegistered, {}};
  }

  std::vector<Item> matches;
  for (const auto& item : db_) {
    if (item.owner == owner && contains(item.readers, hospital_id) &&
        !item.meta.restricted) {
      matches.push_back(item);
    }
  }
  if (matches.empty()) return {ErrorCode::NoAccessibleData, {}};
  std::sort(matches.begin(), matches.end(), [](const Item& a, const Item& b) {
    return key_of(a) < key_of(b);
  });

  Outcome out;
  for (const auto& match : matches) {
    DlmLabel label = key_of(match).label;
    if (Item* existing = find_item(hospital->table, label, match.payload)) {
      existing->meta = match.meta;
    } else {
      hospital->table.push_back(match);
    }
  }
  std::vector<std::string> phones = phones_of(owner);
  for (const auto& match : matches) {
    if (phones.empty()) {
      emit(out, Message{MsgKind::access, owner, {key_of(match)}, 0});
    } else {
      for (const auto& phone : phones) {
        emit(out, Message{MsgKind::access, phone, {key_of(match)}, 0});
      }
    }
  }
  std::vector<ItemKey> keys;
  for (const auto& match : matches) keys.push_back(key_of(match));
  emit(out, Message{MsgKind::download_ok, claimed_id, std::move(keys), 0});
  return out;
}

ReferenceModel::Outcome ReferenceModel::restrict_item(
    const std::string& device_id, const std::string& payload,
    const DlmLabel& label, const ActorId& claimed_id, bool flag) {
  if (ErrorCode code = authenticate(device_id, claimed_id);
      code != ErrorCode::Ok) {
    return {code, {}};
  }
  if (claimed_id != label.owner) return {ErrorCode::AuthMismatch, {}};
  if (!find_device(device_id)->is_phone) return {ErrorCode::WrongDeviceKind, {}};
  Item* item = find_item(db_, label, payload);
  if (item == nullptr) return {ErrorCode::NotFound, {}};
  item->meta.restricted = flag;
  return {};
}

ReferenceModel::Outcome ReferenceModel::subject_access_request(
    const std::string& device_id, const ActorId& claimed_id,
    std::vector<SarLine>& report) {
  report.clear();
  if (ErrorCode code = authenticate(device_id, claimed_id);
      code != ErrorCode::Ok) {
    return {code, {}};
  }
  if (!contains(patients_, claimed_id)) return {ErrorCode::NotAPatient, {}};

  for (const auto& item : db_) {
    if (item.owner == claimed_id) {
      report.push_back(SarLine{key_of(item), item.meta, {"db"}});
    }
  }
  std::vector<const Hospital*> sorted;
  for (const auto& hospital : hospitals_) sorted.push_back(&hospital);
  std::sort(sorted.begin(), sorted.end(),
            [](const Hospital* a, const Hospital* b) { return a->id < b->id; });
  for (const Hospital* hospital : sorted) {
    for (const auto& item : hospital->table) {
      if (item.owner != claimed_id) continue;
      ItemKey key = key_of(item);
      bool found = false;
      for (auto& line : report) {
        if (line.key == key) {
          line.locations.push_back(hospital->id);
          found = true;
          break;
        }
      }
      if (!found) report.push_back(SarLine{key, item.meta, {hospital->id}});
    }
  }
  std::sort(report.begin(), report.end(),
            [](const SarLine& a, const SarLine& b) { return a.key < b.key; });
  return {};
}

ReferenceModel::Outcome ReferenceModel::tick(std::uint64_t n) {
  clock_ += n;
  return {};
}

ReferenceModel::Outcome ReferenceModel::sweep() {
  auto expired = [&](const Item& item) { return item.meta.expiry < clock_; };
  std::erase_if(db_, expired);
  for (auto& hospital : hospitals_) std::erase_if(hospital.table, expired);
  return {};
}

std::vector<Message> ReferenceModel::drain(const std::string& recipient) {
  std::vector<Message> out;
  std::vector<Message> kept;
  for (auto& msg : outbox_) {
    if (msg.recipient == recipient) {
      out.push_back(std::move(msg));
    } else {
      kept.push_back(std::move(msg));
    }
  }
  outbox_ = std::move(kept);
  return out;
}

std::optional<std::string> ReferenceModel::diverges_from(
    const SystemState& engine) const {
  std::set<ActorId> patients(patients_.begin(), patients_.end());
  if (patients != engine.auth.patients) return "patients registry differs";
  std::set<ActorId> users(reg_usrs_.begin(), reg_usrs_.end());
  if (users != engine.auth.reg_usrs) return "reg_usrs registry differs";
  if (clock_ != engine.clock) return "clock differs";

  auto to_table = [](const std::vector<Item>& items) {
    std::map<ItemKey, Meta> table;
    for (const auto& item : items) table[key_of(item)] = item.meta;
    return table;
  };
  std::map<ItemKey, Meta> db(engine.db.table.begin(), engine.db.table.end());
  if (to_table(db_) != db) return "db table differs";

  if (hospitals_.size() != engine.hospitals.size()) {
    return "hospital count differs";
  }
  for (const auto& hospital : hospitals_) {
    auto it = engine.hospitals.find(hospital.id);
    if (it == engine.hospitals.end()) {
      return "hospital " + hospital.id + " missing in engine";
    }
    std::set<ActorId> staff(hospital.staff.begin(), hospital.staff.end());
    if (staff != it->second.staff) return "staff differs at " + hospital.id;
    std::map<ItemKey, Meta> table(it->second.table.begin(),
                                  it->second.table.end());
    if (to_table(hospital.table) != table) {
      return "table differs at " + hospital.id;
    }
  }

  if (devices_.size() != engine.devices.size()) return "device count differs";
  for (const auto& device : devices_) {
    auto it = engine.devices.find(device.id);
    if (it == engine.devices.end()) return "device " + device.id + " missing";
    const DeviceSession& session = it->second;
    if (session.bound_actor != device.actor ||
        session.credential != device.credential ||
        (session.kind == DeviceKind::sphone) != device.is_phone) {
      return "device " + device.id + " differs";
    }
  }

  // per-recipient message sequences on (kind, item keys)
  auto project = [](const std::vector<Message>& msgs) {
    std::map<std::string, std::vector<std::pair<MsgKind, std::vector<ItemKey>>>>
        out;
    for (const auto& msg : msgs) {
      out[msg.recipient].emplace_back(msg.kind, msg.items);
    }
    return out;
  };
  if (project(outbox_) != project(engine.outbox)) return "outbox differs";
  return std::nullopt;
}

}  // namespace gdprsim
