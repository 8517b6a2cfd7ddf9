#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "byzct/agreement.hpp"
#include "byzct/rbcast.hpp"
#include "byzct/topology.hpp"

namespace byzct {

enum class AdversaryKind { kCrash, kMute, kEquivocate, kGarbage, kCollude };

const char* to_string(AdversaryKind kind);
std::optional<AdversaryKind> adversary_from_string(std::string_view name);

struct AdversarySpec {
  AdversaryKind kind = AdversaryKind::kMute;
  /// kCrash: global step at which the process stops; 0 = never starts.
  std::size_t crash_step = 0;
  /// kEquivocate: value shown to each receiver. Receivers without an entry
  /// get `values[receiver % values.size()]`.
  std::map<ProcessId, std::string> per_receiver;
  std::vector<std::string> values;
  /// kGarbage
  std::uint64_t garbage_seed = 0;
  std::size_t garbage_budget = 0;  // 0 = 4 * (n+1)^2
  /// kCollude: every faulty process runs the protocol on this input.
  std::string target;
};

/// Test-only protocol mutations; zero means the protocol as specified.
struct Mutation {
  int quorum_threshold_shift = 0;
  int echo_threshold_shift = 0;
};

struct SimConfig {
  std::uint32_t n_plus_1 = 4;
  std::uint32_t t = 1;
  /// When set, t is c - 1.
  std::optional<std::uint32_t> core_size;
  std::set<ProcessId> faulty;
  AdversarySpec adversary;
  std::uint64_t seed = 0;
  std::size_t fairness_bound = 64;
  ProtocolKind protocol = ProtocolKind::kKset;
  /// One per process; faulty entries feed crash-before-failure behaviour.
  std::vector<std::string> inputs;
  /// Barycentric iterations for kBaryIterated.
  std::size_t depth = 1;
  /// Ranks for k-set agreement; required for kTask.
  std::shared_ptr<const ColorlessTask> task;
  /// kTask: plan to execute. Found with decide_solvability(max_subdiv) when absent.
  std::shared_ptr<const TaskPlan> plan;
  std::size_t max_subdiv = 2;
  Mutation mutation;
  bool record_trace = true;
  /// Replace echo/ready broadcast by single-hop ideal broadcast.
  bool ideal_broadcast = false;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Applies core_size, checks invariants and fills the task plan. Throws
/// ConfigError.
SimConfig validated(SimConfig config);

std::shared_ptr<const ProtocolSpec> make_protocol_spec(const SimConfig& config);

/// Read-only view the full-information adversary receives.
class Network;

struct Observation {
  const Network& network;
  std::size_t step;
};

/// Strategy for one faulty process. Returned envelopes must carry the
/// faulty process as sender; the network rejects anything else.
class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual std::vector<Envelope> on_start(const Observation& obs) = 0;
  virtual std::vector<Envelope> on_message(const Message& in, const Observation& obs) = 0;
};

std::unique_ptr<Adversary> make_adversary(const SimConfig& config, ProcessId self);

/// The network model rejected a message (e.g. a forged sender id).
class ModelViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Reliable FIFO channels between every ordered pair of processes.
class Network {
 public:
  explicit Network(std::uint32_t n_plus_1);

  std::uint32_t size() const { return n_; }
  void push(ProcessId from, ProcessId to, Message msg);
  bool empty() const { return in_flight_ == 0; }
  std::size_t in_flight() const { return in_flight_; }

  const std::deque<Message>& channel(ProcessId from, ProcessId to) const;
  /// Channel indices (from * (n+1) + to) with a message waiting.
  std::vector<std::size_t> ready_channels() const;
  Message pop(std::size_t channel);

 private:
  std::uint32_t n_;
  std::vector<std::deque<Message>> channels_;
  std::size_t in_flight_ = 0;
};

/// Picks the next channel to deliver from: uniform over non-empty channels,
/// except that a channel head skipped `fairness_bound` times is forced.
class FairScheduler {
 public:
  FairScheduler(std::uint64_t seed, std::size_t fairness_bound, std::size_t channel_count);
  std::size_t pick(const std::vector<std::size_t>& ready);
  /// The head of `channel` changed (new message at the front).
  void reset(std::size_t channel) { skips_[channel] = 0; }

 private:
  std::mt19937_64 rng_;
  std::size_t bound_;
  std::vector<std::size_t> skips_;
};

enum class EventKind { kSend, kDeliver, kTransition, kDecide, kQuiescent };

struct TraceEvent {
  std::size_t step = 0;
  EventKind kind = EventKind::kSend;
  std::optional<ProcessId> from;
  std::optional<ProcessId> to;
  std::optional<ProcessId> origin;
  std::string tag;
  Payload payload;
};

/// step=<int> kind=<...> from=<id> to=<id> tag=<instance.round.sub>
/// payload=<hex>, plus origin=<id> on message events.
std::string format_event(const TraceEvent& e);

class Trace {
 public:
  void add(TraceEvent e) { events_.push_back(std::move(e)); }
  const std::vector<TraceEvent>& events() const { return events_; }
  std::string serialize() const;

 private:
  std::vector<TraceEvent> events_;
};

struct RunVerdict {
  enum class Kind { kAllDecided, kQuiescent, kStepBudgetExceeded, kPropertyViolation } kind;
  std::vector<ProcessId> undecided;
  std::vector<std::string> violations;
};

const char* to_string(RunVerdict::Kind kind);

struct RunResult {
  SimConfig config;
  Trace trace;
  RunVerdict verdict;
  std::size_t steps = 0;
  /// Non-faulty machines by process index; nullopt for faulty processes.
  std::vector<std::optional<ProcessMachine>> machines;

  std::vector<ProcessId> correct() const;
};

RunResult run(SimConfig config, std::size_t max_steps);

/// "P0=a P1=b ..." over non-faulty processes; "-" for undecided.
std::string decision_vector(const std::vector<std::optional<ProcessMachine>>& machines);

struct ExploreReport {
  std::size_t runs = 0;
  std::map<std::string, std::size_t> verdicts;
  std::map<std::string, std::size_t> failures;  // checker name -> runs failing
  std::size_t violating_runs = 0;
  /// Runs per distinct set of correct decisions, e.g. "{a,b}".
  std::map<std::string, std::size_t> outcomes;
  std::optional<std::uint64_t> counterexample_seed;
  std::string counterexample_detail;
  std::string counterexample_trace;
};

/// Runs every seed and aggregates verdicts and checker failures. The first
/// violating seed is re-run with tracing for the counterexample.
ExploreReport explore(const SimConfig& config, const std::vector<std::uint64_t>& seeds, std::size_t max_steps);

struct ExhaustiveReport {
  std::size_t states = 0;
  std::size_t terminal_states = 0;
  std::size_t messages = 0;
  std::map<std::string, std::size_t> verdicts;
  std::vector<std::string> violations;
  /// decision_vector() of every terminal state.
  std::set<std::string> outcomes;
};

/// Every interleaving of the ideal-broadcast network, deduplicating
/// identical global states. Limited to n+1 <= 4 and at most `max_messages`
/// point-to-point messages in total.
ExhaustiveReport explore_exhaustive(SimConfig config, std::size_t max_messages = 12);

}  // namespace byzct
