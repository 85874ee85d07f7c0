#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gdprsim/system_state.hpp"

namespace gdprsim {

struct InvariantResult {
  std::string id;
  bool pass = true;
  std::string witness;  // minimal witness on failure, note otherwise
};

struct InvariantReport {
  std::vector<InvariantResult> results;
  bool all_pass() const;
};

// Rebuilds a SystemState by re-executing every logged effect from the
// initial (empty) state. Throws on malformed or gapped logs.
SystemState replay_audit(const std::vector<AuditRecord>& log);

// Incremental checker fed the state after each command. Keeps a running
// replay of the audit log so long traces stay linear-time.
class TraceChecker {
 public:
  // Violations found at this step (empty = all hold).
  std::vector<InvariantResult> step(const SystemState& after);

  // Retention check (I6); call right after a sweep.
  std::vector<InvariantResult> check_retention(const SystemState& after);

  const SystemState& replayed() const { return replayed_; }

 private:
  void check_record(const AuditRecord& record,
                    std::vector<InvariantResult>& out);
  void apply_record(const AuditRecord& record);

  SystemState replayed_;
  std::size_t consumed_ = 0;
  std::uint64_t last_clock_ = 0;
  std::map<ActorId, std::uint64_t> copies_;   // items copied by downloads
  std::map<ActorId, std::uint64_t> notices_;  // distinct access correlations
  std::set<std::pair<std::uint64_t, ItemKey>> seen_notices_;
};

// Full evaluation of I1-I10 from scratch; failures are data, not errors.
InvariantReport check_invariants(const SystemState& state);

}  // namespace gdprsim
