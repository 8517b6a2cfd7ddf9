#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "byzct/rbcast.hpp"
#include "byzct/rounds.hpp"
#include "byzct/topology.hpp"

namespace byzct {

enum class ProtocolKind {
  kBroadcast,     // one reliable broadcast per process, nothing decided
  kQuorum,        // decide the set returned by quorum collection
  kStable,        // decide the set returned by stable vectors
  kKset,          // k-set agreement
  kBary,          // one barycentric agreement
  kBaryIterated,  // `depth` barycentric agreements in sequence
  kTask,          // k-set, `depth` barycentric agreements, then the approximation map
};

const char* to_string(ProtocolKind kind);
std::optional<ProtocolKind> protocol_from_string(std::string_view name);

/// Order used by k-set agreement to pick the least-ranked quorum value.
/// Known vertices compare by rank and precede unknown values, which compare
/// by name.
class ValueRanking {
 public:
  ValueRanking() = default;
  explicit ValueRanking(const Complex& k);

  bool less(const std::string& a, const std::string& b) const;

 private:
  std::map<std::string, Rank, std::less<>> ranks_;
};

struct ProtocolSpec {
  ProtocolKind kind = ProtocolKind::kKset;
  RbParams rb;
  RoundParams round;
  std::size_t depth = 1;
  ValueRanking ranking;
  /// kTask: vertex of bary^depth(skel^t(I)) by name -> output vertex name.
  std::map<std::string, std::string> approx;
  /// Single-hop idealised broadcast (exhaustive scheduler only).
  bool ideal_broadcast = false;
};

/// Builds the kTask lookup table from a plan found by decide_solvability.
std::map<std::string, std::string> approx_table(const TaskPlan& plan, const ColorlessTask& task);

enum class PhaseKind { kBroadcast, kQuorum, kStable, kKset, kBary, kMap };

const char* to_string(PhaseKind kind);

struct PhaseRecord {
  PhaseKind kind = PhaseKind::kKset;
  std::uint32_t instance = 0;
  std::string input;
  /// Message set the round returned (quorum and stable based phases).
  std::optional<MessageSet> returned;
  std::optional<std::string> output;
};

/// Trace hook: something happened inside the machine.
struct MachineNote {
  enum class Kind { kRbDeliver, kReturn, kDecide } kind;
  RbTag tag;
  Payload payload;
};

/// One non-faulty process running a protocol stack over reliable broadcast.
/// Deterministic and single-threaded: (state, event) -> (state, messages).
class ProcessMachine {
 public:
  ProcessMachine(ProcessId self, std::shared_ptr<const ProtocolSpec> spec, std::string input);

  std::vector<Envelope> start();
  std::vector<Envelope> handle(const Message& in);

  ProcessId self() const { return self_; }
  const std::string& input() const { return input_; }
  bool decided() const { return decision_.has_value(); }
  const std::optional<std::string>& decision() const { return decision_; }

  const std::vector<PhaseRecord>& phases() const { return phases_; }
  /// Every broadcast this process started, in order.
  const std::vector<RbDelivery>& sent() const { return sent_; }
  /// Every reliable delivery, in completion order (before reordering).
  const std::vector<RbDelivery>& delivered() const { return delivered_; }
  const std::map<std::uint32_t, StableCollector>& stable_collectors() const { return stable_; }

  std::vector<MachineNote> take_notes();

 private:
  struct Round {
    bool started = false;
    std::deque<RbDelivery> inbox;
  };

  void broadcast(const RbTag& tag, Payload content);
  void on_delivery(RbDelivery d);
  void process(const RbDelivery& d);
  void begin_phase(std::size_t index);
  void finish_phase(std::string output, std::optional<MessageSet> returned);
  std::string kset_choice(const QuorumSet& q) const;
  std::string bary_choice(const QuorumSet& q) const;

  ProcessId self_;
  std::shared_ptr<const ProtocolSpec> spec_;
  std::string input_;
  ReliableBroadcast rb_;
  DeliveryOrder order_;
  std::vector<PhaseKind> plan_;
  std::size_t current_ = 0;
  std::vector<PhaseRecord> phases_;
  std::map<std::uint32_t, Round> rounds_;
  std::map<std::uint32_t, QuorumCollector> quorum_;
  std::map<std::uint32_t, StableCollector> stable_;
  std::map<std::uint32_t, std::uint32_t> report_seq_;
  std::set<std::pair<ProcessId, RbTag>> direct_seen_;
  std::vector<RbDelivery> sent_;
  std::vector<RbDelivery> delivered_;
  std::optional<std::string> decision_;
  std::vector<Envelope> out_;
  std::vector<MachineNote> notes_;
};

/// Human-readable rendering of a message set whose contents are values.
std::string describe(const MessageSet& m);

}  // namespace byzct
