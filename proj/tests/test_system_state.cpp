#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "gdprsim/operations.hpp"
#include "gdprsim/snapshot.hpp"

using namespace gdprsim;

TEST_CASE("registration builds up the registries") {
  SystemState state;
  CHECK(register_patient(state, "alice").ok());
  CHECK(state.auth.patients == std::set<ActorId>{"alice"});
  CHECK(register_user(state, "hosp1").ok());
  CHECK(add_hospital(state, "hosp1", {"drbob"}).ok());
  CHECK(state.hospitals.at("hosp1").staff.contains("drbob"));
  CHECK(bind_device(state, "ph1", DeviceKind::sphone, "alice", "pin").ok());
  CHECK(state.devices.at("ph1").bound_actor == "alice");
}

TEST_CASE("duplicate registrations are rejected without mutation") {
  SystemState state;
  REQUIRE(register_patient(state, "alice").ok());
  REQUIRE(add_hospital(state, "hosp1", {"drbob"}).ok());
  SystemState before = state;

  CHECK(register_patient(state, "alice").outcome ==
        ErrorCode::DuplicateRegistration);
  CHECK(add_hospital(state, "hosp1", {}).outcome ==
        ErrorCode::DuplicateRegistration);
  CHECK(state == before);
}

TEST_CASE("authenticate matches the bound identity") {
  SystemState state;
  REQUIRE(bind_device(state, "ph1", DeviceKind::sphone, "alice", "pin").ok());
  CHECK(authenticate(state, "ph1", "alice") == ErrorCode::Ok);
  CHECK(authenticate(state, "ph1", "bob") == ErrorCode::AuthMismatch);
  CHECK(authenticate(state, "nosuch", "alice") == ErrorCode::UnknownDevice);
}

TEST_CASE("scripted setup round-trips through snapshot save/load") {
  SystemState state;
  REQUIRE(register_patient(state, "alice").ok());
  REQUIRE(register_patient(state, "bob").ok());
  REQUIRE(register_user(state, "hosp1").ok());
  REQUIRE(register_user(state, "hosp2").ok());
  REQUIRE(add_hospital(state, "hosp1", {"drbob", "dreve"}).ok());
  REQUIRE(add_hospital(state, "hosp2", {"dreve"}).ok());
  REQUIRE(bind_device(state, "ph1", DeviceKind::sphone, "alice", "p1").ok());
  REQUIRE(bind_device(state, "ph2", DeviceKind::sphone, "bob", "p2").ok());
  REQUIRE(bind_device(state, "hm1", DeviceKind::home, "alice", "hk").ok());

  SystemState loaded = snapshot_from_string(snapshot_to_string(state));
  CHECK(loaded == state);
  // canonical serialization: equal states, identical bytes
  CHECK(snapshot_to_string(loaded) == snapshot_to_string(state));
}
