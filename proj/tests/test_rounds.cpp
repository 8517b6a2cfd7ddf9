#include "byzct/payload.hpp"
#include "byzct/rounds.hpp"
#include "doctest.h"

using namespace byzct;

namespace {

MessageSet set_of(std::initializer_list<std::pair<std::uint32_t, const char*>> entries) {
  MessageSet m;
  for (auto [p, v] : entries) m.emplace(pid(p), encode_value(v));
  return m;
}

}  // namespace

TEST_CASE("payload encoding round trips") {
  CHECK(encode_value("ab") == std::string("\0\0\0\x02" "ab", 6));
  CHECK(decode_value(encode_value("xyz")) == "xyz");
  CHECK_FALSE(decode_value("\x00\x00").has_value());
  CHECK(encode_set({"b", "a", "b"}) == encode_set({"a", "b"}));
  CHECK(decode_set(encode_set({"b", "a"})) == std::vector<std::string>{"a", "b"});

  auto m = set_of({{0, "a"}, {2, "b"}});
  CHECK(decode_message_set(encode_message_set(m), 4) == m);
  CHECK_FALSE(decode_message_set(encode_message_set(m), 2).has_value());
  CHECK_FALSE(decode_message_set(encode_message_set(m) + "x", 4).has_value());
  CHECK(to_hex("\x01\xab") == "01ab");
}

TEST_CASE("quorum_of") {
  auto m = set_of({{0, "a"}, {1, "a"}, {2, "b"}});
  CHECK(quorum_of(m, 2) == QuorumSet{encode_value("a")});
  CHECK(quorum_of(m, 1).size() == 2);
  auto thin = set_of({{0, "a"}, {1, "a"}, {2, "b"}, {3, "b"}});
  CHECK(quorum_of(thin, 3).empty());
}

TEST_CASE("quorum collector waits for size and a quorum") {
  QuorumCollector q(RoundParams{4, 1});
  CHECK_FALSE(q.add(pid(0), encode_value("a")));
  CHECK_FALSE(q.add(pid(1), encode_value("b")));
  CHECK_FALSE(q.add(pid(2), encode_value("c")));  // three messages, no quorum
  CHECK_FALSE(q.add(pid(2), encode_value("a")));  // same sender again
  CHECK(q.add(pid(3), encode_value("a")));
  CHECK(q.complete());
  CHECK(q.quorum() == QuorumSet{encode_value("a")});
  CHECK_FALSE(q.add(pid(3), encode_value("a")));
}

TEST_CASE("stable collector returns once n+1-t reports equal M") {
  RoundParams params{4, 1};
  StableCollector s(params);
  CHECK(s.on_message(pid(0), encode_value("a")).reports.empty());
  CHECK(s.on_message(pid(1), encode_value("b")).reports.empty());
  auto third = s.on_message(pid(2), encode_value("a"));
  REQUIRE(third.reports.size() == 1);
  const auto m = s.current();
  CHECK(m.size() == 3);

  CHECK_FALSE(s.on_report(pid(0), third.reports[0]).returned);
  CHECK_FALSE(s.on_report(pid(1), third.reports[0]).returned);
  auto done = s.on_report(pid(2), third.reports[0]);
  CHECK(done.returned);
  CHECK(s.result() == m);

  // Keeps reporting after the return; the result stays frozen.
  auto late = s.on_message(pid(3), encode_value("b"));
  CHECK(late.reports.size() == 1);
  CHECK(s.result() == m);
  CHECK(s.own_reports_monotone());

  // A shrinking report from a peer is recorded.
  s.on_report(pid(1), encode_message_set(set_of({{0, "a"}})));
  CHECK(s.shrinking_reporters().contains(pid(1)));
}

TEST_CASE("malformed reports are ignored") {
  StableCollector s(RoundParams{4, 1});
  CHECK_FALSE(s.on_report(pid(0), "garbage").returned);
  CHECK_FALSE(s.reports()[0].has_value());
}

TEST_CASE("subset") {
  auto a = set_of({{0, "a"}});
  auto b = set_of({{0, "a"}, {1, "b"}});
  CHECK(is_subset(a, b));
  CHECK_FALSE(is_subset(b, a));
  CHECK_FALSE(is_subset(set_of({{0, "z"}}), b));
}
