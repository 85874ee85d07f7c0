#pragma once

#include "gdprsim/system_state.hpp"

namespace gdprsim::detail {

inline void audit_push(SystemState& state, std::string op, ActorId actor,
                       std::string node, std::optional<ItemKey> item,
                       std::string object, Effect effect) {
  AuditRecord record;
  record.seq = state.audit.size();
  record.at = state.clock;
  record.op = std::move(op);
  record.actor = std::move(actor);
  record.node = std::move(node);
  record.item = std::move(item);
  record.object = std::move(object);
  record.effect = effect;
  append(state.audit, std::move(record));
}

}  // namespace gdprsim::detail
