#include <stdexcept>
#include "byzct/rbcast.hpp"
#include "doctest.h"

using namespace byzct;

namespace {

Message msg(std::uint32_t from, std::uint32_t origin, Phase phase, const Payload& c, RbTag tag = plain_tag(1)) {
  return Message{pid(from), pid(origin), tag, phase, c};
}

std::size_t count_phase(const std::vector<Envelope>& out, Phase p) {
  std::size_t n = 0;
  for (const auto& e : out) n += e.msg.phase == p ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("broadcast fans out to every process") {
  ReliableBroadcast rb(pid(0), {4, 1});
  auto out = rb.broadcast(plain_tag(0), "a");
  REQUIRE(out.size() == 4);
  for (std::uint32_t p = 0; p < 4; ++p) {
    CHECK(index(out[p].to) == p);
    CHECK(out[p].msg.content == "a");
    CHECK(out[p].msg.phase == Phase::kInit);
  }
  CHECK_THROWS_AS(rb.broadcast(plain_tag(0), "a"), std::logic_error);

  ReliableBroadcast reporter(pid(2), {4, 1});
  auto reports = reporter.broadcast(report_tag(1, 0), encode_set({"m2", "m1"}));
  CHECK(reports.size() == 4);
  CHECK(reports[0].msg.content == encode_set({"m1", "m2"}));
}

TEST_CASE("thresholds at n+1=4, t=1") {
  RbParams p{4, 1};
  CHECK(p.echo_threshold() == 3);
  CHECK(p.ready_amplify_threshold() == 2);
  CHECK(p.deliver_threshold() == 3);
  CHECK(RbParams{7, 2}.echo_threshold() == 5);
  CHECK(RbParams{4, 1, -1}.echo_threshold() == 2);
}

TEST_CASE("echo on first init, ready on the third echo") {
  ReliableBroadcast rb(pid(1), {4, 1});
  auto s = rb.handle(msg(0, 0, Phase::kInit, "c"));
  CHECK(count_phase(s.out, Phase::kEcho) == 4);
  // A second init is ignored.
  CHECK(rb.handle(msg(0, 0, Phase::kInit, "c")).out.empty());

  CHECK(rb.handle(msg(0, 0, Phase::kEcho, "c")).out.empty());
  CHECK(rb.handle(msg(1, 0, Phase::kEcho, "c")).out.empty());
  auto third = rb.handle(msg(2, 0, Phase::kEcho, "c"));
  CHECK(count_phase(third.out, Phase::kReady) == 4);
  // At most one ready.
  CHECK(rb.handle(msg(3, 0, Phase::kEcho, "c")).out.empty());
}

TEST_CASE("ready amplification and delivery") {
  ReliableBroadcast rb(pid(3), {4, 1});
  CHECK(rb.handle(msg(0, 0, Phase::kReady, "c")).out.empty());
  auto second = rb.handle(msg(1, 0, Phase::kReady, "c"));
  CHECK(count_phase(second.out, Phase::kReady) == 4);
  CHECK(second.delivered.empty());
  auto third = rb.handle(msg(2, 0, Phase::kReady, "c"));
  REQUIRE(third.delivered.size() == 1);
  CHECK(third.delivered[0].content == "c");
  CHECK(index(third.delivered[0].origin) == 0);
  // Delivery happens once.
  CHECK(rb.handle(msg(3, 0, Phase::kReady, "c")).delivered.empty());
}

TEST_CASE("duplicate and malformed votes are discarded") {
  ReliableBroadcast rb(pid(0), {4, 1});
  rb.handle(msg(1, 2, Phase::kEcho, "c"));
  auto dup = rb.handle(msg(1, 2, Phase::kEcho, "c"));
  CHECK(dup.out.empty());
  // A sender voting for a second content is not counted either.
  rb.handle(msg(1, 2, Phase::kEcho, "d"));
  const auto* st = rb.instance(pid(2), plain_tag(1));
  REQUIRE(st != nullptr);
  CHECK(st->echoes.at("c").size() == 1);
  CHECK_FALSE(st->echoes.contains("d"));

  CHECK(rb.handle(msg(9, 0, Phase::kEcho, "c")).out.empty());
  CHECK(rb.handle(msg(1, 0, Phase::kInit, "c")).out.empty());  // init relayed by someone else
  CHECK(rb.handle(msg(0, 0, Phase::kDirect, "c")).out.empty());
  RbTag bad = plain_tag(1);
  bad.seq = 3;
  CHECK(rb.handle(msg(0, 0, Phase::kInit, "c", bad)).out.empty());
}

TEST_CASE("delivery order per origin") {
  DeliveryOrder order;
  auto r1 = order.release({pid(0), report_tag(1, 1), "r1"});
  CHECK(r1.empty());
  auto plain = order.release({pid(0), plain_tag(1), "p"});
  REQUIRE(plain.size() == 1);
  CHECK(order.buffered() == 1);
  auto r0 = order.release({pid(0), report_tag(1, 0), "r0"});
  REQUIRE(r0.size() == 2);
  CHECK(r0[0].content == "r0");
  CHECK(r0[1].content == "r1");
  CHECK(order.buffered() == 0);

  // Other origins are independent.
  CHECK(order.release({pid(1), plain_tag(1), "q"}).size() == 1);
  CHECK(order.release({pid(2), report_tag(1, 0), "x"}).empty());
  CHECK(order.release({pid(1), report_tag(1, 0), "y"}).size() == 1);
}

TEST_CASE("tag labels") {
  CHECK(tag_label(plain_tag(0), Phase::kInit) == "0.1.plain");
  CHECK(tag_label(plain_tag(0), Phase::kEcho) == "0.1.echo");
  CHECK(tag_label(report_tag(2, 3), Phase::kEcho) == "2.1.report3-echo");
  CHECK(tag_label(report_tag(2, 3), Phase::kReady) == "2.1.report3-ready");
  CHECK(tag_label(plain_tag(1), Phase::kDirect) == "1.1.plain-direct");
}
