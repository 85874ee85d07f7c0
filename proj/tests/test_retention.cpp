#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
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

TEST_CASE("tick advances the clock and composes additively") {
  SystemState state;
  tick(state, 5);
  CHECK(state.clock == 5);

  SystemState split;
  tick(split, 2);
  tick(split, 3);
  CHECK(split.clock == state.clock);
}

TEST_CASE("clock never decreases over random traces") {
  std::mt19937_64 rng(31);
  SystemState state;
  std::uint64_t last = 0;
  for (int i = 0; i < 200; ++i) {
    tick(state, 1 + rng() % 7);
    CHECK(state.clock >= last);
    last = state.clock;
  }
}

TEST_CASE("sweep erases expired items from every table") {
  SystemState state = base_state();
  REQUIRE(upload(state, "ph1", "old", {"alice", {"hosp1"}}, {"m", 5}, "alice")
              .ok());
  REQUIRE(upload(state, "ph1", "new", {"alice", {"hosp1"}}, {"m", 50}, "alice")
              .ok());
  REQUIRE(download(state, "hosp1", "drbob", "alice").ok());
  tick(state, 6);  // clock = 6 > expiry 5

  std::set<ItemKey> erased;
  sweep(state, erased);
  ItemKey old_key{{"alice", {"hosp1"}}, "old"};
  ItemKey new_key{{"alice", {"hosp1"}}, "new"};
  CHECK(erased == std::set<ItemKey>{old_key});
  CHECK_FALSE(state.db.table.contains(old_key));
  CHECK_FALSE(state.hospitals.at("hosp1").table.contains(old_key));
  CHECK(state.db.table.contains(new_key));
  CHECK(state.hospitals.at("hosp1").table.contains(new_key));
}

TEST_CASE("expiry equal to now survives (strict comparison)") {
  SystemState state = base_state();
  REQUIRE(upload(state, "ph1", "d", {"alice", {"hosp1"}}, {"m", 5}, "alice").ok());
  tick(state, 5);
  std::set<ItemKey> erased;
  sweep(state, erased);
  CHECK(erased.empty());
  CHECK(state.db.table.size() == 1);
}

TEST_CASE("sweep of a fresh state changes nothing but the audit") {
  SystemState state = base_state();
  REQUIRE(upload(state, "ph1", "d", {"alice", {"hosp1"}}, {"m", 50}, "alice").ok());
  SystemState before = state;
  std::set<ItemKey> erased;
  sweep(state, erased);
  CHECK(erased.empty());
  CHECK(state == before);  // nothing expired, nothing logged
}

TEST_CASE("sweep agrees with a brute-force filter over all tables") {
  std::mt19937_64 rng(33);
  for (int round = 0; round < 20; ++round) {
    SystemState state = base_state();
    for (int i = 0; i < 10; ++i) {
      upload(state, "ph1", "p" + std::to_string(i), {"alice", {"hosp1"}},
             {"m", rng() % 12}, "alice");
    }
    download(state, "hosp1", "drbob", "alice");
    tick(state, 1 + rng() % 10);

    auto filter = [&](const Table& table) {
      Table kept;
      for (const auto& [key, meta] : table) {
        if (meta.expiry >= state.clock) kept[key] = meta;
      }
      return kept;
    };
    Table expected_db = filter(state.db.table);
    Table expected_h = filter(state.hospitals.at("hosp1").table);

    std::set<ItemKey> erased;
    sweep(state, erased);
    CHECK(state.db.table == expected_db);
    CHECK(state.hospitals.at("hosp1").table == expected_h);

    // I6: nothing expired survives
    for (const auto& [key, meta] : state.db.table) {
      CHECK(meta.expiry >= state.clock);
    }

    // idempotence modulo audit
    SystemState once = state;
    sweep(state, erased);
    CHECK(erased.empty());
    SystemState again = state;
    again.audit = once.audit;
    CHECK(again == once);
  }
}
