#include <map>
#include <sstream>

#include "byzct/config_io.hpp"
#include "byzct/simnet.hpp"
#include "doctest.h"

using namespace byzct;

namespace {

SimConfig kset_config() {
  SimConfig c;
  c.n_plus_1 = 4;
  c.t = 1;
  c.protocol = ProtocolKind::kKset;
  c.inputs = {"a", "a", "b", "z"};
  c.faulty = {pid(3)};
  return c;
}

struct Parsed {
  std::map<std::string, std::string> fields;
};

Parsed parse(const std::string& line) {
  Parsed p;
  std::istringstream in(line);
  std::string kv;
  while (in >> kv) {
    auto eq = kv.find('=');
    p.fields[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return p;
}

}  // namespace

TEST_CASE("same seed, same trace") {
  auto c = kset_config();
  c.adversary.kind = AdversaryKind::kGarbage;
  c.seed = 42;
  auto a = run(c, 100000).trace.serialize();
  auto b = run(c, 100000).trace.serialize();
  CHECK(a == b);
  c.seed = 43;
  CHECK(run(c, 100000).trace.serialize() != a);
}

TEST_CASE("trace lines have the documented fields") {
  auto c = kset_config();
  auto r = run(c, 100000);
  REQUIRE_FALSE(r.trace.events().empty());
  auto first = parse(format_event(r.trace.events().front()));
  for (const char* key : {"step", "kind", "from", "to", "tag", "payload"}) CHECK(first.fields.contains(key));
  CHECK(first.fields["kind"] == "SEND");
  CHECK(r.trace.events().back().kind == EventKind::kQuiescent);
}

TEST_CASE("channels are FIFO and senders are never forged") {
  auto c = kset_config();
  c.adversary.kind = AdversaryKind::kEquivocate;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    c.seed = seed;
    auto r = run(c, 100000);
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> sent, delivered;
    for (const auto& e : r.trace.events()) {
      if (e.kind != EventKind::kSend && e.kind != EventKind::kDeliver) continue;
      auto p = parse(format_event(e));
      const auto key = std::make_pair(p.fields["from"], p.fields["to"]);
      const auto body = p.fields["tag"] + "/" + p.fields["payload"] + "/" + p.fields["origin"];
      (e.kind == EventKind::kSend ? sent : delivered)[key].push_back(body);
    }
    for (const auto& [key, got] : delivered) {
      const auto& out = sent[key];
      REQUIRE(got.size() <= out.size());
      for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == out[i]);
    }
  }
}

TEST_CASE("network rejects forged senders") {
  Network net(4);
  Message m;
  m.from = pid(1);
  CHECK_THROWS_AS(net.push(pid(3), pid(0), m), ModelViolation);
  CHECK_THROWS_AS(net.push(pid(1), pid(9), m), ModelViolation);
  net.push(pid(1), pid(0), m);
  CHECK(net.in_flight() == 1);
  CHECK(net.ready_channels() == std::vector<std::size_t>{4});
}

TEST_CASE("fair scheduler never skips a channel more than the bound") {
  FairScheduler s(9, 3, 4);
  std::vector<std::size_t> ready{0, 1, 2, 3};
  std::vector<std::size_t> skipped(4, 0);
  for (int i = 0; i < 2000; ++i) {
    auto ch = s.pick(ready);
    for (auto r : ready) skipped[r] = r == ch ? 0 : skipped[r] + 1;
    for (auto k : skipped) CHECK(k <= 3 + ready.size());
  }
}

TEST_CASE("adversaries") {
  auto c = validated(kset_config());
  Network net(4);
  Observation obs{net, 0};

  c.adversary.kind = AdversaryKind::kMute;
  CHECK(make_adversary(c, pid(3))->on_start(obs).empty());

  c.adversary.kind = AdversaryKind::kEquivocate;
  c.adversary.per_receiver = {{pid(1), "a"}, {pid(2), "b"}};
  c.adversary.values = {"a", "b"};
  auto inits = make_adversary(c, pid(3))->on_start(obs);
  std::map<std::uint32_t, Payload> shown;
  for (const auto& e : inits) {
    CHECK(e.msg.from == pid(3));
    if (e.msg.phase == Phase::kInit) shown[index(e.to)] = e.msg.content;
  }
  CHECK(shown[1] == encode_value("a"));
  CHECK(shown[2] == encode_value("b"));

  c.adversary.kind = AdversaryKind::kGarbage;
  c.adversary.garbage_seed = 5;
  auto g1 = make_adversary(c, pid(3))->on_start(obs);
  auto g2 = make_adversary(c, pid(3))->on_start(obs);
  CHECK_FALSE(g1.empty());
  REQUIRE(g1.size() == g2.size());
  for (std::size_t i = 0; i < g1.size(); ++i) CHECK(g1[i].msg == g2[i].msg);
}

TEST_CASE("config validation") {
  auto c = kset_config();
  c.faulty = {pid(2), pid(3)};
  CHECK_THROWS_AS(validated(c), ConfigError);
  c = kset_config();
  c.inputs.pop_back();
  CHECK_THROWS_AS(validated(c), ConfigError);
  c = kset_config();
  c.fairness_bound = 0;
  CHECK_THROWS_AS(validated(c), ConfigError);
  c = kset_config();
  c.core_size = 3;
  c.faulty = {pid(2), pid(3)};
  CHECK(validated(c).t == 2);
}

TEST_CASE("verdicts") {
  auto c = kset_config();
  CHECK(run(c, 1).verdict.kind == RunVerdict::Kind::kStepBudgetExceeded);
  CHECK(run(c, 100000).verdict.kind == RunVerdict::Kind::kAllDecided);

  c.inputs = {"a", "b", "c", "d"};
  c.adversary.kind = AdversaryKind::kCrash;
  c.adversary.crash_step = 0;
  auto r = run(c, 100000);
  CHECK(r.verdict.kind == RunVerdict::Kind::kQuiescent);
  CHECK(r.verdict.undecided.size() == 3);
}

TEST_CASE("explore") {
  auto c = kset_config();
  auto empty = explore(c, {}, 1000);
  CHECK(empty.runs == 0);
  CHECK(empty.verdicts.empty());

  auto r = explore(c, {1, 2, 3}, 100000);
  CHECK(r.runs == 3);
  CHECK(r.verdicts["AllDecided"] == 3);
  CHECK_FALSE(r.counterexample_seed.has_value());
}

TEST_CASE("exhaustive exploration") {
  auto c = kset_config();
  auto r = explore_exhaustive(c, 12);
  CHECK(r.messages == 12);
  CHECK(r.violations.empty());
  CHECK(r.terminal_states > 1);
  CHECK(r.verdicts["AllDecided"] == r.terminal_states);

  c.adversary.kind = AdversaryKind::kEquivocate;
  CHECK_THROWS_AS(explore_exhaustive(c, 12), ConfigError);
  c.adversary.kind = AdversaryKind::kCollude;
  CHECK_THROWS_AS(explore_exhaustive(c, 12), ConfigError);  // 16 messages
}

TEST_CASE("config files round trip") {
  auto c = kset_config();
  c.adversary.kind = AdversaryKind::kEquivocate;
  c.adversary.per_receiver = {{pid(0), "x"}};
  c.seed = 17;
  auto back = config_from_json(config_to_json(c));
  CHECK(back.n_plus_1 == c.n_plus_1);
  CHECK(back.faulty == c.faulty);
  CHECK(back.adversary.kind == c.adversary.kind);
  CHECK(back.adversary.per_receiver == c.adversary.per_receiver);
  CHECK(back.seed == 17);
  CHECK(run(back, 100000).trace.serialize() == run(c, 100000).trace.serialize());

  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"protocol", "paxos"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"adversary", {{"kind", "sneaky"}}}}), ConfigError);
}
