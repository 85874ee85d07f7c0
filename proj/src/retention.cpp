#include "gdprsim/retention.hpp"

#include "gdprsim/encode.hpp"
#include "internal.hpp"

namespace gdprsim {

namespace {

using detail::audit_push;

void sweep_table(SystemState& state, Table& table, const std::string& node,
                 std::set<ItemKey>& erased) {
  for (auto it = table.begin(); it != table.end();) {
    if (it->second.expiry < state.clock) {
      audit_push(state, "sweep", "", node, it->first, serialize_key(it->first),
                 Effect::removed);
      erased.insert(it->first);
      it = table.erase(it);
    } else {
      ++it;
    }
  }
}

}  // namespace

OpResult tick(SystemState& state, std::uint64_t n) {
  state.clock += n;
  audit_push(state, "tick", "", "clock", std::nullopt,
             std::to_string(state.clock), Effect::ticked);
  return {};
}

OpResult sweep(SystemState& state, std::set<ItemKey>& erased) {
  erased.clear();
  OpResult result;
  sweep_table(state, state.db.table, "db", erased);
  for (auto& [hid, node] : state.hospitals) {
    sweep_table(state, node.table, hid, erased);
  }
  result.touched = erased;
  return result;
}

}  // namespace gdprsim
