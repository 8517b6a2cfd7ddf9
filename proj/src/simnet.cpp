#include "byzct/simnet.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "byzct/checks.hpp"

namespace byzct {

const char* to_string(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::kCrash: return "crash";
    case AdversaryKind::kMute: return "mute";
    case AdversaryKind::kEquivocate: return "equivocate";
    case AdversaryKind::kGarbage: return "garbage";
    case AdversaryKind::kCollude: return "collude";
  }
  return "?";
}

std::optional<AdversaryKind> adversary_from_string(std::string_view name) {
  for (auto k : {AdversaryKind::kCrash, AdversaryKind::kMute, AdversaryKind::kEquivocate, AdversaryKind::kGarbage,
                 AdversaryKind::kCollude}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

const char* to_string(RunVerdict::Kind kind) {
  switch (kind) {
    case RunVerdict::Kind::kAllDecided: return "AllDecided";
    case RunVerdict::Kind::kQuiescent: return "Quiescent";
    case RunVerdict::Kind::kStepBudgetExceeded: return "StepBudgetExceeded";
    case RunVerdict::Kind::kPropertyViolation: return "PropertyViolation";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Configuration

SimConfig validated(SimConfig c) {
  if (c.core_size) {
    if (*c.core_size < 1) throw ConfigError("core_size must be at least 1");
    c.t = *c.core_size - 1;
  }
  if (c.n_plus_1 < 1 || c.n_plus_1 > 256) throw ConfigError("n_plus_1 must be in [1, 256]");
  if (c.inputs.size() != c.n_plus_1) {
    throw ConfigError("expected " + std::to_string(c.n_plus_1) + " inputs, got " + std::to_string(c.inputs.size()));
  }
  if (c.faulty.size() > c.t) {
    throw ConfigError("faulty set has " + std::to_string(c.faulty.size()) + " members but t = " + std::to_string(c.t));
  }
  for (auto p : c.faulty) {
    if (index(p) >= c.n_plus_1) throw ConfigError("faulty process id out of range");
  }
  if (c.fairness_bound < 1) throw ConfigError("fairness_bound must be at least 1");

  std::vector<std::string> correct_inputs;
  for (std::uint32_t p = 0; p < c.n_plus_1; ++p) {
    if (!c.faulty.contains(pid(p))) correct_inputs.push_back(c.inputs[p]);
  }
  std::sort(correct_inputs.begin(), correct_inputs.end());
  correct_inputs.erase(std::unique(correct_inputs.begin(), correct_inputs.end()), correct_inputs.end());

  if (c.adversary.kind == AdversaryKind::kEquivocate && c.adversary.values.empty()) {
    c.adversary.values = correct_inputs;
    if (c.adversary.values.size() < 2) c.adversary.values.push_back(c.adversary.values.front() + "'");
  }
  if (c.adversary.kind == AdversaryKind::kCollude && c.adversary.target.empty()) {
    if (correct_inputs.empty()) throw ConfigError("collude needs a target value");
    c.adversary.target = correct_inputs.front();
  }

  if (c.protocol == ProtocolKind::kTask) {
    if (!c.task) throw ConfigError("protocol 'task' needs a task");
    if (!c.task->input.simplex_of(correct_inputs)) {
      throw ConfigError("correct inputs do not span a simplex of the input complex");
    }
    if (!c.plan) {
      auto verdict = decide_solvability(*c.task, c.n_plus_1, static_cast<int>(c.t), c.max_subdiv);
      if (auto* s = std::get_if<Solvable>(&verdict)) {
        c.plan = std::make_shared<const TaskPlan>(std::move(s->plan));
      } else if (auto* u = std::get_if<Unsolvable>(&verdict)) {
        throw ConfigError("task is not solvable: " + u->reason);
      } else {
        throw ConfigError("no approximation found up to depth " + std::to_string(c.max_subdiv));
      }
    }
    c.depth = c.plan->depth;
  }
  return c;
}

std::shared_ptr<const ProtocolSpec> make_protocol_spec(const SimConfig& c) {
  auto spec = std::make_shared<ProtocolSpec>();
  spec->kind = c.protocol;
  spec->rb = RbParams{c.n_plus_1, c.t, c.mutation.echo_threshold_shift};
  spec->round = RoundParams{c.n_plus_1, c.t, c.mutation.quorum_threshold_shift};
  spec->depth = c.depth;
  if (c.task) spec->ranking = ValueRanking(c.task->input);
  if (c.protocol == ProtocolKind::kTask) spec->approx = approx_table(*c.plan, *c.task);
  spec->ideal_broadcast = c.ideal_broadcast;
  return spec;
}

// ---------------------------------------------------------------------------
// Network and scheduling

Network::Network(std::uint32_t n_plus_1) : n_(n_plus_1), channels_(static_cast<std::size_t>(n_plus_1) * n_plus_1) {}

void Network::push(ProcessId from, ProcessId to, Message msg) {
  if (index(from) >= n_ || index(to) >= n_) throw ModelViolation("message addressed outside the system");
  if (msg.from != from) {
    throw ModelViolation("P" + std::to_string(index(from)) + " tried to send as P" + std::to_string(index(msg.from)));
  }
  channels_[static_cast<std::size_t>(index(from)) * n_ + index(to)].push_back(std::move(msg));
  ++in_flight_;
}

const std::deque<Message>& Network::channel(ProcessId from, ProcessId to) const {
  return channels_.at(static_cast<std::size_t>(index(from)) * n_ + index(to));
}

std::vector<std::size_t> Network::ready_channels() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    if (!channels_[i].empty()) out.push_back(i);
  }
  return out;
}

Message Network::pop(std::size_t channel) {
  auto& q = channels_.at(channel);
  Message m = std::move(q.front());
  q.pop_front();
  --in_flight_;
  return m;
}

FairScheduler::FairScheduler(std::uint64_t seed, std::size_t fairness_bound, std::size_t channel_count)
    : rng_(seed), bound_(fairness_bound), skips_(channel_count, 0) {}

std::size_t FairScheduler::pick(const std::vector<std::size_t>& ready) {
  std::size_t chosen = ready.front();
  std::size_t oldest = 0;
  for (auto ch : ready) {
    if (skips_[ch] >= bound_ && skips_[ch] > oldest) {
      oldest = skips_[ch];
      chosen = ch;
    }
  }
  if (oldest == 0) chosen = ready[rng_() % ready.size()];
  for (auto ch : ready) ++skips_[ch];
  skips_[chosen] = 0;
  return chosen;
}

// ---------------------------------------------------------------------------
// Trace

std::string format_event(const TraceEvent& e) {
  static constexpr const char* kKinds[] = {"SEND", "DELIVER", "TRANSITION", "DECIDE", "QUIESCENT"};
  auto id = [](const std::optional<ProcessId>& p) { return p ? std::to_string(index(*p)) : std::string("-"); };
  std::string line = "step=" + std::to_string(e.step) + " kind=" + kKinds[static_cast<int>(e.kind)] +
                     " from=" + id(e.from) + " to=" + id(e.to) + " tag=" + (e.tag.empty() ? "-" : e.tag) +
                     " payload=" + to_hex(e.payload);
  if (e.origin) line += " origin=" + id(e.origin);
  return line;
}

std::string Trace::serialize() const {
  std::string out;
  for (const auto& e : events_) {
    out += format_event(e);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Adversaries

namespace {

/// Runs honest machines and filters what each may say to whom. One machine
/// per shown value; receiver r only hears the machine assigned to it.
///
/// In split mode each machine also only listens to its own receivers and
/// talks to itself over a private loop, so the copies drift apart the way
/// two disjoint groups of correct processes would.
class ShadowAdversary : public Adversary {
 public:
  ShadowAdversary(ProcessId self, std::shared_ptr<const ProtocolSpec> spec, std::vector<std::string> values,
                  std::vector<std::size_t> assignment, std::optional<std::size_t> stop_step, bool split)
      : self_(self), assignment_(std::move(assignment)), stop_step_(stop_step), split_(split) {
    for (auto& v : values) shadows_.emplace_back(self, spec, std::move(v));
  }

  std::vector<Envelope> on_start(const Observation& obs) override {
    if (stopped(obs)) return {};
    std::vector<Envelope> out;
    for (std::size_t i = 0; i < shadows_.size(); ++i) keep(i, shadows_[i].start(), out);
    return out;
  }

  std::vector<Envelope> on_message(const Message& in, const Observation& obs) override {
    if (stopped(obs)) return {};
    std::vector<Envelope> out;
    if (split_) {
      const auto i = assignment_.at(index(in.from));
      keep(i, shadows_[i].handle(in), out);
      return out;
    }
    for (std::size_t i = 0; i < shadows_.size(); ++i) keep(i, shadows_[i].handle(in), out);
    return out;
  }

 private:
  bool stopped(const Observation& obs) const { return stop_step_ && obs.step >= *stop_step_; }

  void keep(std::size_t shadow, std::vector<Envelope> produced, std::vector<Envelope>& out) {
    std::deque<Message> loop;
    for (;;) {
      for (auto& e : produced) {
        if (split_ && e.to == self_) {
          loop.push_back(std::move(e.msg));
        } else if (assignment_.at(index(e.to)) == shadow) {
          out.push_back(std::move(e));
        }
      }
      if (loop.empty()) return;
      produced = shadows_[shadow].handle(loop.front());
      loop.pop_front();
    }
  }

  ProcessId self_;
  std::vector<ProcessMachine> shadows_;
  std::vector<std::size_t> assignment_;
  std::optional<std::size_t> stop_step_;
  bool split_;
};

class MuteAdversary : public Adversary {
 public:
  std::vector<Envelope> on_start(const Observation&) override { return {}; }
  std::vector<Envelope> on_message(const Message&, const Observation&) override { return {}; }
};

/// Random, mostly malformed traffic. Mixes contents lifted from in-flight
/// messages with random bytes; stops after a fixed budget.
class GarbageAdversary : public Adversary {
 public:
  GarbageAdversary(ProcessId self, std::uint32_t n_plus_1, std::uint64_t seed, std::size_t budget)
      : self_(self), n_(n_plus_1), rng_(seed ^ (0x9e3779b97f4a7c15ULL * (index(self) + 1))), budget_(budget) {}

  std::vector<Envelope> on_start(const Observation& obs) override { return burst(n_, obs); }
  std::vector<Envelope> on_message(const Message&, const Observation& obs) override { return burst(2, obs); }

 private:
  std::uint64_t below(std::uint64_t k) { return rng_() % k; }

  Payload random_content(const Observation& obs) {
    switch (below(4)) {
      case 0: {
        Payload p(below(12), '\0');
        for (auto& c : p) c = static_cast<char>(below(256));
        return p;
      }
      case 1:
        return encode_value("g" + std::to_string(below(1000)));
      case 2: {
        MessageSet m;
        const auto count = below(n_ + 1);
        for (std::uint64_t i = 0; i < count; ++i) m.emplace(pid(static_cast<std::uint32_t>(below(n_))), encode_value("g"));
        return encode_message_set(m);
      }
      default: {
        // Full information: replay a content that is currently in flight.
        const auto& net = obs.network;
        for (int tries = 0; tries < 8; ++tries) {
          const auto from = pid(static_cast<std::uint32_t>(below(n_)));
          const auto to = pid(static_cast<std::uint32_t>(below(n_)));
          const auto& ch = net.channel(from, to);
          if (!ch.empty()) return ch.front().content;
        }
        return encode_value("");
      }
    }
  }

  std::vector<Envelope> burst(std::size_t count, const Observation& obs) {
    std::vector<Envelope> out;
    for (std::size_t i = 0; i < count && sent_ < budget_; ++i, ++sent_) {
      Message m;
      m.from = self_;
      m.origin = below(4) == 0 ? self_ : pid(static_cast<std::uint32_t>(below(n_ + 1)));
      m.tag.instance = static_cast<std::uint32_t>(below(3));
      m.tag.round = static_cast<std::uint32_t>(below(3));
      m.tag.stream = below(2) ? Stream::kPlain : Stream::kReport;
      m.tag.seq = static_cast<std::uint32_t>(below(3));
      m.phase = static_cast<Phase>(below(4));
      m.content = random_content(obs);
      out.push_back({pid(static_cast<std::uint32_t>(below(n_))), std::move(m)});
    }
    return out;
  }

  ProcessId self_;
  std::uint32_t n_;
  std::mt19937_64 rng_;
  std::size_t budget_;
  std::size_t sent_ = 0;
};

}  // namespace

std::unique_ptr<Adversary> make_adversary(const SimConfig& c, ProcessId self) {
  const auto& a = c.adversary;
  auto spec = make_protocol_spec(c);
  const std::vector<std::size_t> everyone(c.n_plus_1, 0);
  switch (a.kind) {
    case AdversaryKind::kMute:
      return std::make_unique<MuteAdversary>();
    case AdversaryKind::kCrash:
      if (a.crash_step == 0) return std::make_unique<MuteAdversary>();
      return std::make_unique<ShadowAdversary>(self, spec, std::vector<std::string>{c.inputs[index(self)]}, everyone,
                                               a.crash_step, false);
    case AdversaryKind::kCollude:
      return std::make_unique<ShadowAdversary>(self, spec, std::vector<std::string>{a.target}, everyone, std::nullopt, false);
    case AdversaryKind::kEquivocate: {
      std::vector<std::string> shown(c.n_plus_1);
      for (std::uint32_t r = 0; r < c.n_plus_1; ++r) {
        auto it = a.per_receiver.find(pid(r));
        shown[r] = it != a.per_receiver.end() ? it->second : a.values.at(r % a.values.size());
      }
      std::vector<std::string> values = shown;
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      std::vector<std::size_t> assignment(c.n_plus_1);
      for (std::uint32_t r = 0; r < c.n_plus_1; ++r) {
        assignment[r] = static_cast<std::size_t>(std::lower_bound(values.begin(), values.end(), shown[r]) - values.begin());
      }
      return std::make_unique<ShadowAdversary>(self, spec, std::move(values), std::move(assignment), std::nullopt, true);
    }
    case AdversaryKind::kGarbage: {
      const auto budget = a.garbage_budget ? a.garbage_budget : 4u * c.n_plus_1 * c.n_plus_1;
      return std::make_unique<GarbageAdversary>(self, c.n_plus_1, a.garbage_seed ^ c.seed, budget);
    }
  }
  return std::make_unique<MuteAdversary>();
}

// ---------------------------------------------------------------------------
// Runs

std::vector<ProcessId> RunResult::correct() const {
  std::vector<ProcessId> out;
  for (std::uint32_t p = 0; p < machines.size(); ++p) {
    if (machines[p]) out.push_back(pid(p));
  }
  return out;
}

namespace {

void log_notes(Trace& trace, bool enabled, std::size_t step, ProcessId p, std::vector<MachineNote> notes) {
  if (!enabled) return;
  for (auto& n : notes) {
    TraceEvent e;
    e.step = step;
    e.from = p;
    e.to = p;
    switch (n.kind) {
      case MachineNote::Kind::kRbDeliver:
        e.kind = EventKind::kTransition;
        e.tag = tag_label(n.tag, Phase::kInit) + "-rbrecv";
        break;
      case MachineNote::Kind::kReturn:
        e.kind = EventKind::kTransition;
        e.tag = std::to_string(n.tag.instance) + "." + std::to_string(n.tag.round) + ".return";
        break;
      case MachineNote::Kind::kDecide:
        e.kind = EventKind::kDecide;
        e.tag = std::to_string(n.tag.instance) + ".0.decide";
        break;
    }
    e.payload = std::move(n.payload);
    trace.add(std::move(e));
  }
}

RunVerdict classify(const SimConfig& c, const std::vector<std::optional<ProcessMachine>>& machines, bool quiescent,
                 bool out_of_steps) {
  RunVerdict v;
  v.violations = check_all(CheckContext{c, machines, quiescent});
  for (const auto& m : machines) {
    if (!m) continue;
    const bool done = c.protocol == ProtocolKind::kBroadcast ? quiescent : m->decided();
    if (!done) v.undecided.push_back(m->self());
  }
  if (!v.violations.empty()) {
    v.kind = RunVerdict::Kind::kPropertyViolation;
  } else if (out_of_steps) {
    v.kind = RunVerdict::Kind::kStepBudgetExceeded;
  } else if (v.undecided.empty()) {
    v.kind = RunVerdict::Kind::kAllDecided;
  } else {
    v.kind = RunVerdict::Kind::kQuiescent;
  }
  return v;
}

}  // namespace

std::string decision_vector(const std::vector<std::optional<ProcessMachine>>& machines) {
  std::string out;
  for (std::uint32_t p = 0; p < machines.size(); ++p) {
    if (!machines[p]) continue;
    if (!out.empty()) out += ' ';
    out += "P" + std::to_string(p) + "=" + machines[p]->decision().value_or("-");
  }
  return out;
}

RunResult run(SimConfig config, std::size_t max_steps) {
  RunResult result;
  result.config = validated(std::move(config));
  const auto& c = result.config;
  const bool tracing = c.record_trace;
  const auto spec = make_protocol_spec(c);

  Network net(c.n_plus_1);
  FairScheduler sched(c.seed, c.fairness_bound, static_cast<std::size_t>(c.n_plus_1) * c.n_plus_1);
  std::vector<std::unique_ptr<Adversary>> adversaries(c.n_plus_1);
  result.machines.resize(c.n_plus_1);
  for (std::uint32_t p = 0; p < c.n_plus_1; ++p) {
    if (c.faulty.contains(pid(p))) {
      adversaries[p] = make_adversary(c, pid(p));
    } else {
      result.machines[p].emplace(pid(p), spec, c.inputs[p]);
    }
  }

  std::size_t step = 0;
  auto emit = [&](ProcessId from, std::vector<Envelope> out) {
    for (auto& e : out) {
      if (tracing) {
        result.trace.add({step, EventKind::kSend, e.msg.from, e.to, e.msg.origin, tag_label(e.msg.tag, e.msg.phase),
                          e.msg.content});
      }
      net.push(from, e.to, std::move(e.msg));
    }
  };

  for (std::uint32_t p = 0; p < c.n_plus_1; ++p) {
    if (adversaries[p]) {
      emit(pid(p), adversaries[p]->on_start(Observation{net, step}));
    } else {
      emit(pid(p), result.machines[p]->start());
      log_notes(result.trace, tracing, step, pid(p), result.machines[p]->take_notes());
    }
  }

  bool out_of_steps = false;
  while (!net.empty()) {
    if (step >= max_steps) {
      out_of_steps = true;
      break;
    }
    const auto ch = sched.pick(net.ready_channels());
    Message msg = net.pop(ch);
    ++step;
    const auto to = pid(static_cast<std::uint32_t>(ch % c.n_plus_1));
    if (tracing) {
      result.trace.add({step, EventKind::kDeliver, msg.from, to, msg.origin, tag_label(msg.tag, msg.phase), msg.content});
    }
    if (adversaries[index(to)]) {
      emit(to, adversaries[index(to)]->on_message(msg, Observation{net, step}));
    } else {
      auto& m = *result.machines[index(to)];
      emit(to, m.handle(msg));
      log_notes(result.trace, tracing, step, to, m.take_notes());
    }
  }
  const bool quiescent = net.empty();
  if (quiescent && tracing) result.trace.add({step, EventKind::kQuiescent, std::nullopt, std::nullopt, std::nullopt, "", ""});
  result.steps = step;
  result.verdict = classify(c, result.machines, quiescent, out_of_steps);
  return result;
}

ExploreReport explore(const SimConfig& config, const std::vector<std::uint64_t>& seeds, std::size_t max_steps) {
  ExploreReport report;
  for (auto seed : seeds) {
    SimConfig c = config;
    c.seed = seed;
    c.record_trace = false;
    auto r = run(std::move(c), max_steps);
    ++report.runs;
    ++report.verdicts[to_string(r.verdict.kind)];
    std::set<std::string> decided;
    for (const auto& m : r.machines) {
      if (m && m->decision()) decided.insert(*m->decision());
    }
    std::vector<std::string> sorted(decided.begin(), decided.end());
    ++report.outcomes[sorted.empty() ? "{}" : face_name(sorted)];
    std::set<std::string> failed;
    for (const auto& v : r.verdict.violations) failed.insert(checker_name(v));
    for (const auto& f : failed) ++report.failures[f];
    if (!r.verdict.violations.empty()) {
      ++report.violating_runs;
      if (!report.counterexample_seed) {
        report.counterexample_seed = seed;
        report.counterexample_detail = r.verdict.violations.front();
        SimConfig again = config;
        again.seed = seed;
        again.record_trace = true;
        report.counterexample_trace = run(std::move(again), max_steps).trace.serialize();
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Exhaustive exploration

namespace {

struct GlobalState {
  std::vector<std::optional<ProcessMachine>> correct;
  std::vector<std::optional<ProcessMachine>> faulty;  // colluders; nullopt = silent
  Network net;
  /// history[p]: senders of the messages p has received, in order.
  std::vector<std::string> history;
  std::size_t sent = 0;
};

}  // namespace

ExhaustiveReport explore_exhaustive(SimConfig config, std::size_t max_messages) {
  config.ideal_broadcast = true;
  config.record_trace = false;
  const auto c = validated(std::move(config));
  if (c.n_plus_1 > 4) throw ConfigError("exhaustive mode supports at most 4 processes");
  const auto kind = c.adversary.kind;
  const bool silent = kind == AdversaryKind::kMute || (kind == AdversaryKind::kCrash && c.adversary.crash_step == 0);
  if (!silent && kind != AdversaryKind::kCollude) {
    throw ConfigError("exhaustive mode supports mute, crash(0) and collude adversaries");
  }
  const auto spec = make_protocol_spec(c);

  ExhaustiveReport report;
  GlobalState init{{}, {}, Network(c.n_plus_1), std::vector<std::string>(c.n_plus_1), 0};
  init.correct.resize(c.n_plus_1);
  init.faulty.resize(c.n_plus_1);

  auto push_all = [&](GlobalState& s, ProcessId from, std::vector<Envelope> out) {
    for (auto& e : out) {
      s.net.push(from, e.to, std::move(e.msg));
      if (++s.sent > max_messages) {
        throw ConfigError("execution exceeds the exhaustive bound of " + std::to_string(max_messages) + " messages");
      }
    }
  };

  for (std::uint32_t p = 0; p < c.n_plus_1; ++p) {
    if (c.faulty.contains(pid(p))) {
      if (kind == AdversaryKind::kCollude) {
        init.faulty[p].emplace(pid(p), spec, c.adversary.target);
        push_all(init, pid(p), init.faulty[p]->start());
      }
    } else {
      init.correct[p].emplace(pid(p), spec, c.inputs[p]);
      push_all(init, pid(p), init.correct[p]->start());
    }
  }
  report.messages = init.sent;

  std::unordered_set<std::string> visited;
  auto key_of = [](const GlobalState& s) {
    std::string key;
    for (const auto& h : s.history) {
      key += h;
      key += '|';
    }
    return key;
  };

  auto dfs = [&](auto&& self, const GlobalState& s) -> void {
    if (!visited.insert(key_of(s)).second) return;
    ++report.states;
    report.messages = std::max(report.messages, s.sent);
    if (s.net.empty()) {
      ++report.terminal_states;
      auto verdict = classify(c, s.correct, true, false);
      ++report.verdicts[to_string(verdict.kind)];
      report.outcomes.insert(decision_vector(s.correct));
      for (auto& v : verdict.violations) {
        if (report.violations.size() < 16) report.violations.push_back(std::move(v));
      }
      return;
    }
    for (auto ch : s.net.ready_channels()) {
      GlobalState next = s;
      Message msg = next.net.pop(ch);
      const auto to = static_cast<std::uint32_t>(ch % c.n_plus_1);
      next.history[to] += static_cast<char>('0' + index(msg.from));
      if (next.correct[to]) {
        push_all(next, pid(to), next.correct[to]->handle(msg));
      } else if (next.faulty[to]) {
        push_all(next, pid(to), next.faulty[to]->handle(msg));
      }
      self(self, next);
    }
  };
  dfs(dfs, init);
  return report;
}

}  // namespace byzct
