#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "gdprsim/encode.hpp"
#include "gdprsim/invariants.hpp"
#include "gdprsim/operations.hpp"
#include "gdprsim/retention.hpp"

using namespace gdprsim;

namespace {

SystemState base_state() {
  SystemState state;
  REQUIRE(register_patient(state, "alice").ok());
  REQUIRE(register_user(state, "hosp1").ok());
  REQUIRE(add_hospital(state, "hosp1", {"drbob"}).ok());
  REQUIRE(bind_device(state, "ph1", DeviceKind::sphone, "alice", "p1").ok());
  return state;
}

}  // namespace

TEST_CASE("append is gapless") {
  std::vector<AuditRecord> audit;
  AuditRecord record;
  record.seq = 0;
  append(audit, record);
  CHECK(audit.size() == 1);

  AuditRecord gap;
  gap.seq = 5;
  CHECK_THROWS_AS(append(audit, gap), SequenceGapError);
}

TEST_CASE("replaying the full log reproduces the final state") {
  SystemState state = base_state();
  REQUIRE(upload(state, "ph1", "d", {"alice", {"hosp1"}}, {"m", 9}, "alice").ok());
  REQUIRE(download(state, "hosp1", "drbob", "alice").ok());
  REQUIRE(restrict_item(state, "ph1", "d", {"alice", {"hosp1"}}, "alice", true)
              .ok());
  tick(state, 10);
  std::set<ItemKey> erased;
  sweep(state, erased);
  drain(state, "ph1");

  CHECK(replay_audit(state.audit) == state);
}

TEST_CASE("drain returns messages in emission order, once") {
  SystemState state = base_state();
  REQUIRE(upload(state, "ph1", "d", {"alice", {"hosp1"}}, {"m", 9}, "alice").ok());

  std::vector<Message> msgs = drain(state, "ph1");
  REQUIRE(msgs.size() == 1);
  CHECK(msgs[0].kind == MsgKind::upload_ok);
  CHECK(drain(state, "ph1").empty());
}

TEST_CASE("per-recipient delivery order equals emission order") {
  std::mt19937_64 rng(41);
  SystemState state = base_state();
  std::map<std::string, std::vector<Message>> emission_log;
  for (int i = 0; i < 40; ++i) {
    OpResult result;
    switch (rng() % 3) {
      case 0:
        result = upload(state, "ph1", "p" + std::to_string(rng() % 6),
                        {"alice", {"hosp1"}}, {"m", 99}, "alice");
        break;
      case 1:
        result = download(state, "hosp1", "drbob", "alice");
        break;
      case 2: {
        std::string payload = "p" + std::to_string(rng() % 6);
        result = delete_item(state, "ph1", payload, {"alice", {"hosp1"}},
                             "alice", false);
        break;
      }
    }
    for (const auto& msg : result.emitted) {
      emission_log[msg.recipient].push_back(msg);
    }
  }
  for (auto& [recipient, expected] : emission_log) {
    CHECK(drain(state, recipient) == expected);
  }
  CHECK(state.outbox.empty());
}

TEST_CASE("query_audit returns the owner's records in order") {
  SystemState state = base_state();
  REQUIRE(upload(state, "ph1", "d", {"alice", {"hosp1"}}, {"m", 9}, "alice").ok());
  REQUIRE(download(state, "hosp1", "drbob", "alice").ok());
  REQUIRE(delete_item(state, "ph1", "d", {"alice", {"hosp1"}}, "alice", false)
              .ok());

  std::vector<AuditRecord> records = query_audit(state, "alice");
  CHECK(records.size() >= 4);  // add, copy-add, two removals
  for (std::size_t i = 1; i < records.size(); ++i) {
    CHECK(records[i - 1].seq < records[i].seq);
  }
  for (const auto& record : records) {
    REQUIRE(record.item.has_value());
    CHECK(record.item->label.owner == "alice");
  }
  CHECK(query_audit(state, "nobody").empty());
}

TEST_CASE("audit dump round-trips") {
  SystemState state = base_state();
  REQUIRE(upload(state, "ph1", "d", {"alice", {"hosp1"}}, {"m", 9}, "alice").ok());
  REQUIRE(download(state, "hosp1", "drbob", "alice").ok());

  std::string dump = dump_audit(state.audit);
  CHECK(load_audit(dump) == state.audit);
}
