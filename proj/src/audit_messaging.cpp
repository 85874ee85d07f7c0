#include "gdprsim/audit_messaging.hpp"

#include "gdprsim/system_state.hpp"

namespace gdprsim {

void append(std::vector<AuditRecord>& audit, AuditRecord record) {
  if (record.seq != audit.size()) {
    throw SequenceGapError("audit seq " + std::to_string(record.seq) +
                           " != length " + std::to_string(audit.size()));
  }
  audit.push_back(std::move(record));
}

std::vector<AuditRecord> query_audit(const SystemState& state, const ActorId& owner) {
  std::vector<AuditRecord> out;
  for (const auto& record : state.audit) {
    if (record.item && record.item->label.owner == owner) out.push_back(record);
  }
  return out;
}

}  // namespace gdprsim
