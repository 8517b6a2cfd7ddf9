#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <string>
#include <vector>

#include "byzct/payload.hpp"

namespace byzct {

enum class Stream : std::uint8_t { kPlain, kReport };

/// Identifies one broadcast instance together with its origin. Reports carry
/// a per-origin sequence number so that each growing report is its own
/// instance.
struct RbTag {
  std::uint32_t instance = 0;
  std::uint32_t round = 1;
  Stream stream = Stream::kPlain;
  std::uint32_t seq = 0;

  friend auto operator<=>(const RbTag&, const RbTag&) = default;
};

inline RbTag plain_tag(std::uint32_t instance, std::uint32_t round = 1) {
  return {instance, round, Stream::kPlain, 0};
}
inline RbTag report_tag(std::uint32_t instance, std::uint32_t seq, std::uint32_t round = 1) {
  return {instance, round, Stream::kReport, seq};
}

/// kDirect is the idealised broadcast used by the exhaustive scheduler: a
/// single hop standing in for a completed reliable broadcast.
enum class Phase : std::uint8_t { kInit, kEcho, kReady, kDirect };

struct Message {
  ProcessId from{};    // channel sender, fixed by the network
  ProcessId origin{};  // process whose broadcast this belongs to
  RbTag tag;
  Phase phase = Phase::kInit;
  Payload content;

  friend bool operator==(const Message&, const Message&) = default;
};

struct Envelope {
  ProcessId to{};
  Message msg;
};

struct RbDelivery {
  ProcessId origin{};
  RbTag tag;
  Payload content;

  friend bool operator==(const RbDelivery&, const RbDelivery&) = default;
};

/// "instance.round.sub", e.g. "0.1.plain", "2.1.report3-echo".
std::string tag_label(const RbTag& tag, Phase phase);

struct RbParams {
  std::uint32_t n_plus_1 = 4;
  std::uint32_t t = 1;
  /// Test-only mutation: added to the echo threshold.
  int echo_threshold_shift = 0;

  /// n - t + 1 echoes for the same content.
  std::uint32_t echo_threshold() const;
  /// t + 1 readies for the same content.
  std::uint32_t ready_amplify_threshold() const { return t + 1; }
  /// n - t + 1 readies for the same content.
  std::uint32_t deliver_threshold() const { return n_plus_1 - t; }
};

/// Per (origin, tag) bookkeeping.
struct RbInstanceState {
  std::optional<Payload> init;
  std::map<Payload, std::set<ProcessId>> echoes;
  std::map<Payload, std::set<ProcessId>> readies;
  std::set<ProcessId> echo_voters;
  std::set<ProcessId> ready_voters;
  bool sent_echo = false;
  bool sent_ready = false;
  bool delivered = false;
};

/// Echo/ready reliable broadcast for one process. Purely reactive: every
/// call maps one event to the point-to-point messages it causes.
class ReliableBroadcast {
 public:
  ReliableBroadcast(ProcessId self, RbParams params);

  /// Fan-out of the initial message to all n+1 processes, self included.
  /// Throws std::logic_error if this process already used `tag`.
  std::vector<Envelope> broadcast(const RbTag& tag, Payload content);

  struct Step {
    std::vector<Envelope> out;
    std::vector<RbDelivery> delivered;
  };

  /// Malformed traffic is dropped without effect.
  Step handle(const Message& in);

  const RbInstanceState* instance(ProcessId origin, const RbTag& tag) const;
  ProcessId self() const { return self_; }
  const RbParams& params() const { return params_; }

 private:
  std::vector<Envelope> send_all(ProcessId origin, const RbTag& tag, Phase phase, const Payload& content) const;
  void maybe_ready(RbInstanceState& st, ProcessId origin, const RbTag& tag, Step& step);

  ProcessId self_;
  RbParams params_;
  std::set<RbTag> used_tags_;
  std::map<std::pair<ProcessId, RbTag>, RbInstanceState> instances_;
};

/// Restores per-origin order across broadcast instances of one
/// (instance, round): the plain message first, then reports by sequence
/// number. Out-of-order completions wait in a buffer.
class DeliveryOrder {
 public:
  std::vector<RbDelivery> release(RbDelivery d);

  std::size_t buffered() const;

 private:
  struct Slot {
    bool plain_done = false;
    std::uint32_t next_seq = 0;
    std::map<std::uint32_t, RbDelivery> pending;
  };
  std::map<std::tuple<ProcessId, std::uint32_t, std::uint32_t>, Slot> slots_;
};

}  // namespace byzct
