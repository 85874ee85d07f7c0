#include "gdprsim/fuzz.hpp"

#include <random>

namespace gdprsim {

namespace {

struct LiveKey {
  ActorId owner;
  std::set<ActorId> readers;
  std::string payload;
  std::uint64_t expiry;
};

struct Generator {
  std::mt19937_64 rng;
  std::vector<ScenarioCommand> out;
  std::vector<LiveKey> live;  // keys believed to be in db
  std::uint64_t clock = 0;
  std::uint64_t payload_counter = 0;

  const std::vector<ActorId> patients = {"pa0", "pa1", "pa2", "pa3"};
  const std::vector<ActorId> hospitals = {"h0", "h1", "h2"};
  const std::vector<ActorId> doctors = {"dr0", "dr1", "dr2"};
  const std::vector<std::string> phones = {"ph0", "ph1", "ph2", "ph3"};

  explicit Generator(std::uint64_t seed) : rng(seed) {}

  std::size_t pick(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  }
  bool chance(int percent) {
    return std::uniform_int_distribution<int>(0, 99)(rng) < percent;
  }

  void push(ScenarioCommand cmd) {
    cmd.line = static_cast<int>(out.size() + 1);
    out.push_back(std::move(cmd));
  }

  void setup() {
    using Verb = ScenarioCommand::Verb;
    for (const auto& p : patients) {
      ScenarioCommand c;
      c.verb = Verb::register_patient;
      c.actor = p;
      push(c);
    }
    for (const auto& h : hospitals) {
      ScenarioCommand c;
      c.verb = Verb::register_user;
      c.actor = h;
      push(c);
    }
    // two patients double as registered readers
    for (const auto& p : {patients[0], patients[1]}) {
      ScenarioCommand c;
      c.verb = Verb::register_user;
      c.actor = p;
      push(c);
    }
    const std::vector<std::vector<ActorId>> staff = {
        {"dr0"}, {"dr0", "dr1"}, {"dr2"}};
    for (std::size_t i = 0; i < hospitals.size(); ++i) {
      ScenarioCommand c;
      c.verb = Verb::add_hospital;
      c.hospital = hospitals[i];
      c.staff = staff[i];
      push(c);
    }
    for (std::size_t i = 0; i < patients.size(); ++i) {
      ScenarioCommand c;
      c.verb = Verb::bind_device;
      c.device = phones[i];
      c.kind = DeviceKind::sphone;
      c.actor = patients[i];
      c.credential = "pin" + std::to_string(i);
      push(c);
    }
    {
      ScenarioCommand c;
      c.verb = Verb::bind_device;
      c.device = "hm0";
      c.kind = DeviceKind::home;
      c.actor = patients[0];
      c.credential = "hk";
      push(c);
    }
  }

  std::set<ActorId> random_readers() {
    std::set<ActorId> readers;
    for (const auto& h : hospitals) {
      if (chance(45)) readers.insert(h);
    }
    if (chance(15)) readers.insert(patients[0]);
    if (chance(10)) readers.insert(patients[1]);
    return readers;
  }

  void gen_upload(bool valid) {
    ScenarioCommand c;
    c.verb = ScenarioCommand::Verb::upload;
    std::size_t pi = pick(patients.size());
    c.owner = patients[pi];
    c.actor = c.owner;
    c.device = pi == 0 && chance(30) ? "hm0" : phones[pi];
    c.readers = random_readers();
    c.purpose = "monitoring";
    c.expiry = clock + pick(16);
    c.payload = "p" + std::to_string(payload_counter++);
    if (!valid) {
      switch (pick(4)) {
        case 0:
          c.actor = patients[(pi + 1) % patients.size()];  // session mismatch
          break;
        case 1:
          c.owner = patients[(pi + 1) % patients.size()];  // id != o
          break;
        case 2:
          c.readers.insert("mallory");  // unregistered reader
          break;
        case 3:
          c.device = "ghost";  // unbound token
          break;
      }
    }
    if (valid) live.push_back({c.owner, c.readers, c.payload, c.expiry});
    push(c);
  }

  void gen_delete(bool valid) {
    ScenarioCommand c;
    c.verb = ScenarioCommand::Verb::del;
    if (live.empty() || !valid) {
      std::size_t pi = pick(patients.size());
      c.owner = patients[pi];
      c.actor = c.owner;
      c.device = phones[pi];
      c.readers = random_readers();
      c.payload = "nosuch" + std::to_string(pick(5));
      if (!valid && chance(30)) c.device = "hm0";  // home is not a control unit
      if (!valid && chance(30)) c.actor = patients[pick(patients.size())];
    } else {
      std::size_t ki = pick(live.size());
      const LiveKey& key = live[ki];
      c.owner = key.owner;
      c.actor = key.owner;
      c.readers = key.readers;
      c.payload = key.payload;
      for (std::size_t i = 0; i < patients.size(); ++i) {
        if (patients[i] == key.owner) c.device = phones[i];
      }
      live.erase(live.begin() + static_cast<std::ptrdiff_t>(ki));
    }
    push(c);
  }

  void gen_download(bool valid) {
    ScenarioCommand c;
    c.verb = ScenarioCommand::Verb::download;
    if (valid && !live.empty()) {
      // prefer a (hospital, owner) pair with accessible data
      for (std::size_t attempt = 0; attempt < 4; ++attempt) {
        const LiveKey& key = live[pick(live.size())];
        for (std::size_t hi = 0; hi < hospitals.size(); ++hi) {
          if (key.readers.contains(hospitals[hi])) {
            c.hospital = hospitals[hi];
            c.owner = key.owner;
            break;
          }
        }
        if (!c.hospital.empty()) break;
      }
    }
    if (c.hospital.empty()) {
      c.hospital = hospitals[pick(hospitals.size())];
      c.owner = patients[pick(patients.size())];
    }
    std::size_t hi = 0;
    for (std::size_t i = 0; i < hospitals.size(); ++i) {
      if (hospitals[i] == c.hospital) hi = i;
    }
    const std::vector<std::vector<ActorId>> staff = {
        {"dr0"}, {"dr0", "dr1"}, {"dr2"}};
    c.actor = staff[hi][pick(staff[hi].size())];
    if (!valid) {
      if (chance(50)) {
        c.actor = doctors[pick(doctors.size())];  // may not be staff here
      } else {
        c.hospital = "clinicX";  // unknown hospital
      }
    }
    push(c);
  }

  void gen_restrict(bool valid) {
    ScenarioCommand c;
    c.verb = ScenarioCommand::Verb::restrict;
    c.flag = chance(50);
    if (valid && !live.empty()) {
      const LiveKey& key = live[pick(live.size())];
      c.owner = key.owner;
      c.actor = key.owner;
      c.readers = key.readers;
      c.payload = key.payload;
      for (std::size_t i = 0; i < patients.size(); ++i) {
        if (patients[i] == key.owner) c.device = phones[i];
      }
    } else {
      std::size_t pi = pick(patients.size());
      c.owner = patients[pi];
      c.actor = c.owner;
      c.device = chance(20) ? "hm0" : phones[pi];
      c.readers = random_readers();
      c.payload = "nosuch" + std::to_string(pick(5));
    }
    push(c);
  }

  void gen_sar(bool valid) {
    ScenarioCommand c;
    c.verb = ScenarioCommand::Verb::sar;
    std::size_t pi = pick(patients.size());
    c.device = phones[pi];
    c.actor = valid ? patients[pi] : patients[(pi + 1) % patients.size()];
    push(c);
  }

  void gen_drain() {
    ScenarioCommand c;
    c.verb = ScenarioCommand::Verb::drain;
    std::vector<std::string> recipients = phones;
    recipients.insert(recipients.end(), doctors.begin(), doctors.end());
    recipients.insert(recipients.end(), patients.begin(), patients.end());
    c.recipient = recipients[pick(recipients.size())];
    push(c);
  }

  void gen_tick() {
    ScenarioCommand c;
    c.verb = ScenarioCommand::Verb::tick;
    c.n = 1 + pick(4);
    clock += c.n;
    std::erase_if(live, [&](const LiveKey& key) { return key.expiry < clock; });
    push(c);
  }

  void gen_sweep() {
    ScenarioCommand c;
    c.verb = ScenarioCommand::Verb::sweep;
    std::erase_if(live, [&](const LiveKey& key) { return key.expiry < clock; });
    push(c);
  }

  void gen_duplicate_registration() {
    ScenarioCommand c;
    if (chance(50)) {
      c.verb = ScenarioCommand::Verb::register_patient;
      c.actor = patients[pick(patients.size())];
    } else {
      c.verb = ScenarioCommand::Verb::register_user;
      c.actor = hospitals[pick(hospitals.size())];
    }
    push(c);
  }

  void step() {
    bool valid = chance(70);
    int roll = std::uniform_int_distribution<int>(0, 99)(rng);
    if (roll < 22) {
      gen_upload(valid);
    } else if (roll < 40) {
      gen_download(valid);
    } else if (roll < 50) {
      gen_delete(valid);
    } else if (roll < 58) {
      gen_restrict(valid);
    } else if (roll < 70) {
      gen_tick();
    } else if (roll < 75) {
      gen_sweep();
    } else if (roll < 83) {
      gen_sar(valid);
    } else if (roll < 95) {
      gen_drain();
    } else {
      gen_duplicate_registration();
    }
  }
};

}  // namespace

std::vector<ScenarioCommand> generate_commands(std::uint64_t seed,
                                               std::size_t steps) {
  Generator gen(seed);
  gen.setup();
  while (gen.out.size() < steps) gen.step();
  return gen.out;
}

}  // namespace gdprsim
