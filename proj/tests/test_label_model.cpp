#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"
#include "gdprsim/label_model.hpp"

using namespace gdprsim;

namespace {

// independent oracle: plain linear membership over a vector universe
bool oracle_may_read(const ActorId& owner, const std::vector<ActorId>& readers,
                     const ActorId& actor) {
  if (actor == owner) return true;
  return std::find(readers.begin(), readers.end(), actor) != readers.end();
}

}  // namespace

TEST_CASE("may_read: readers, owner, outsiders") {
  DlmLabel label{"alice", {"hosp1"}};
  CHECK(may_read(label, "hosp1"));
  CHECK(may_read(label, "alice"));  // owner is an implicit reader
  CHECK_FALSE(may_read(label, "bob"));
}

TEST_CASE("flow_permitted: reader set gates the copy") {
  LabelledItem item{{"alice", {"hosp1"}}, {}, "d"};
  CHECK(flow_permitted(item, "hosp1"));
  LabelledItem sealed{{"alice", {}}, {}, "d"};
  CHECK_FALSE(flow_permitted(sealed, "hosp1"));
}

TEST_CASE("flow_permitted agrees with exhaustive membership oracle") {
  const std::vector<ActorId> universe = {"a", "b", "c", "d"};
  // every owner, every reader subset, every destination
  for (const auto& owner : universe) {
    for (unsigned mask = 0; mask < (1u << universe.size()); ++mask) {
      std::vector<ActorId> readers;
      std::set<ActorId> reader_set;
      for (std::size_t i = 0; i < universe.size(); ++i) {
        if (mask & (1u << i)) {
          readers.push_back(universe[i]);
          reader_set.insert(universe[i]);
        }
      }
      LabelledItem item{{owner, reader_set}, {}, "d"};
      for (const auto& dest : universe) {
        CHECK(flow_permitted(item, dest) == oracle_may_read(owner, readers, dest));
      }
    }
  }
}

TEST_CASE("owner is always permitted") {
  std::mt19937_64 rng(11);
  const std::vector<ActorId> universe = {"a", "b", "c", "d", "e"};
  for (int i = 0; i < 200; ++i) {
    DlmLabel label;
    label.owner = universe[rng() % universe.size()];
    for (const auto& actor : universe) {
      if (rng() % 2) label.readers.insert(actor);
    }
    CHECK(may_read(label, label.owner));
  }
}

TEST_CASE("flow_permitted is monotone in readers") {
  std::mt19937_64 rng(12);
  const std::vector<ActorId> universe = {"a", "b", "c", "d", "e"};
  for (int i = 0; i < 500; ++i) {
    LabelledItem item;
    item.label.owner = universe[rng() % universe.size()];
    for (const auto& actor : universe) {
      if (rng() % 2) item.label.readers.insert(actor);
    }
    item.payload = "d";
    ActorId dest = universe[rng() % universe.size()];
    bool before = flow_permitted(item, dest);
    LabelledItem wider = item;
    wider.label.readers.insert(universe[rng() % universe.size()]);
    if (before) CHECK(flow_permitted(wider, dest));
  }
}

TEST_CASE("item identity excludes meta") {
  LabelledItem a{{"alice", {"hosp1"}}, {"cardio", 5, false}, "d"};
  LabelledItem b{{"alice", {"hosp1"}}, {"neuro", 9, true}, "d"};
  CHECK(item_identity(a) == item_identity(b));
}

TEST_CASE("item identity distinguishes payloads and labels") {
  LabelledItem a{{"alice", {"hosp1"}}, {}, "d1"};
  LabelledItem b{{"alice", {"hosp1"}}, {}, "d2"};
  CHECK(item_identity(a) != item_identity(b));

  // tuple-equality oracle: same payload, different reader sets
  LabelledItem c{{"alice", {"hosp1"}}, {}, "d"};
  LabelledItem d{{"alice", {"hosp1", "hosp2"}}, {}, "d"};
  bool tuples_equal = c.label.owner == d.label.owner &&
                      c.label.readers == d.label.readers &&
                      c.payload == d.payload;
  CHECK(tuples_equal == (item_identity(c) == item_identity(d)));
  CHECK(item_identity(c) != item_identity(d));
}
