#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <string>

namespace gdprsim {

// Actors share one namespace: patients, doctors, hospitals and devices are
// all opaque non-empty tokens. Role comes from registry membership.
using ActorId = std::string;

struct DlmLabel {
  ActorId owner;
  std::set<ActorId> readers;

  auto operator<=>(const DlmLabel&) const = default;
};

struct Meta {
  std::string purpose;
  std::uint64_t expiry = 0;  // absolute logical tick; expiry < now is swept
  bool restricted = false;

  auto operator<=>(const Meta&) const = default;
};

// Table identity is (label, payload). Meta rides along and is excluded.
struct ItemKey {
  DlmLabel label;
  std::string payload;

  auto operator<=>(const ItemKey&) const = default;
};

struct LabelledItem {
  DlmLabel label;
  Meta meta;
  std::string payload;

  ItemKey key() const { return ItemKey{label, payload}; }

  auto operator<=>(const LabelledItem&) const = default;
};

// The owner is an implicit reader.
bool may_read(const DlmLabel& label, const ActorId& actor);

// The single gate every inter-node copy must pass.
bool flow_permitted(const LabelledItem& item, const ActorId& destination);

ItemKey item_identity(const LabelledItem& item);

}  // namespace gdprsim
