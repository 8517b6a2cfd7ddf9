#include "byzct/agreement.hpp"

#include <algorithm>
#include <stdexcept>

namespace byzct {

const char* to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::kBroadcast: return "broadcast";
    case ProtocolKind::kQuorum: return "quorum";
    case ProtocolKind::kStable: return "stable";
    case ProtocolKind::kKset: return "kset";
    case ProtocolKind::kBary: return "bary";
    case ProtocolKind::kBaryIterated: return "bary_iterated";
    case ProtocolKind::kTask: return "task";
  }
  return "?";
}

std::optional<ProtocolKind> protocol_from_string(std::string_view name) {
  for (auto k : {ProtocolKind::kBroadcast, ProtocolKind::kQuorum, ProtocolKind::kStable, ProtocolKind::kKset,
                 ProtocolKind::kBary, ProtocolKind::kBaryIterated, ProtocolKind::kTask}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

const char* to_string(PhaseKind kind) {
  switch (kind) {
    case PhaseKind::kBroadcast: return "broadcast";
    case PhaseKind::kQuorum: return "quorum";
    case PhaseKind::kStable: return "stable";
    case PhaseKind::kKset: return "kset";
    case PhaseKind::kBary: return "bary";
    case PhaseKind::kMap: return "map";
  }
  return "?";
}

ValueRanking::ValueRanking(const Complex& k) {
  for (const auto& v : k.vertices()) ranks_.emplace(v.name, v.rank);
}

bool ValueRanking::less(const std::string& a, const std::string& b) const {
  auto ia = ranks_.find(a);
  auto ib = ranks_.find(b);
  const bool ka = ia != ranks_.end();
  const bool kb = ib != ranks_.end();
  if (ka && kb) return ia->second < ib->second;
  if (ka != kb) return ka;
  return a < b;
}

std::map<std::string, std::string> approx_table(const TaskPlan& plan, const ColorlessTask& task) {
  const auto& dom = plan.domain.complex;
  if (plan.approx.image.size() != dom.vertex_count()) {
    throw std::invalid_argument("approximation map does not cover the subdivided input");
  }
  std::map<std::string, std::string> table;
  for (VertexId v = 0; v < dom.vertex_count(); ++v) {
    const auto w = plan.approx.image[v];
    if (w >= task.output.vertex_count()) throw std::invalid_argument("approximation map leaves the output complex");
    table.emplace(dom.name(v), task.output.name(w));
  }
  return table;
}

std::string describe(const MessageSet& m) {
  std::string out = "{";
  bool first = true;
  for (const auto& [sender, content] : m) {
    if (!first) out += ',';
    first = false;
    auto v = decode_value(content);
    out += "P" + std::to_string(index(sender)) + ":" + (v ? *v : "#" + to_hex(content));
  }
  return out + "}";
}

namespace {

std::vector<PhaseKind> phase_plan(const ProtocolSpec& spec) {
  switch (spec.kind) {
    case ProtocolKind::kBroadcast: return {PhaseKind::kBroadcast};
    case ProtocolKind::kQuorum: return {PhaseKind::kQuorum};
    case ProtocolKind::kStable: return {PhaseKind::kStable};
    case ProtocolKind::kKset: return {PhaseKind::kKset};
    case ProtocolKind::kBary: return {PhaseKind::kBary};
    case ProtocolKind::kBaryIterated: return std::vector<PhaseKind>(spec.depth, PhaseKind::kBary);
    case ProtocolKind::kTask: {
      std::vector<PhaseKind> plan{PhaseKind::kKset};
      plan.insert(plan.end(), spec.depth, PhaseKind::kBary);
      plan.push_back(PhaseKind::kMap);
      return plan;
    }
  }
  return {};
}

std::vector<std::string> quorum_values(const QuorumSet& q) {
  std::vector<std::string> out;
  for (const auto& c : q) {
    if (auto v = decode_value(c)) out.push_back(std::move(*v));
  }
  return out;
}

}  // namespace

ProcessMachine::ProcessMachine(ProcessId self, std::shared_ptr<const ProtocolSpec> spec, std::string input)
    : self_(self), spec_(std::move(spec)), input_(std::move(input)), rb_(self, spec_->rb), plan_(phase_plan(*spec_)) {}

std::vector<MachineNote> ProcessMachine::take_notes() { return std::exchange(notes_, {}); }

std::vector<Envelope> ProcessMachine::start() {
  if (plan_.empty()) {
    decision_ = input_;
    notes_.push_back({MachineNote::Kind::kDecide, plain_tag(0), input_});
  } else {
    begin_phase(0);
  }
  return std::exchange(out_, {});
}

void ProcessMachine::broadcast(const RbTag& tag, Payload content) {
  sent_.push_back({self_, tag, content});
  if (spec_->ideal_broadcast) {
    for (std::uint32_t p = 0; p < spec_->rb.n_plus_1; ++p) {
      out_.push_back({pid(p), Message{self_, self_, tag, Phase::kDirect, content}});
    }
    return;
  }
  auto out = rb_.broadcast(tag, std::move(content));
  out_.insert(out_.end(), std::make_move_iterator(out.begin()), std::make_move_iterator(out.end()));
}

std::vector<Envelope> ProcessMachine::handle(const Message& in) {
  if (spec_->ideal_broadcast) {
    if (in.phase == Phase::kDirect && in.from == in.origin && index(in.origin) < spec_->rb.n_plus_1 &&
        direct_seen_.insert({in.origin, in.tag}).second) {
      on_delivery({in.origin, in.tag, in.content});
    }
    return std::exchange(out_, {});
  }
  auto step = rb_.handle(in);
  out_.insert(out_.end(), std::make_move_iterator(step.out.begin()), std::make_move_iterator(step.out.end()));
  for (auto& d : step.delivered) on_delivery(std::move(d));
  return std::exchange(out_, {});
}

void ProcessMachine::on_delivery(RbDelivery d) {
  delivered_.push_back(d);
  notes_.push_back({MachineNote::Kind::kRbDeliver, d.tag, d.content});
  for (auto& r : order_.release(std::move(d))) {
    auto& round = rounds_[r.tag.instance];
    if (round.started) {
      process(r);
    } else {
      round.inbox.push_back(std::move(r));
    }
  }
}

void ProcessMachine::process(const RbDelivery& d) {
  const auto inst = d.tag.instance;
  if (d.tag.round != 1) return;
  const bool uses_stable = stable_.contains(inst);
  const bool uses_quorum = quorum_.contains(inst);
  const bool is_current = current_ < phases_.size() && phases_[current_].instance == inst && !decided();

  if (d.tag.stream == Stream::kPlain) {
    if (!decode_value(d.content)) return;
    if (uses_quorum) {
      auto& q = quorum_.at(inst);
      if (q.add(d.origin, d.content) && is_current) {
        const auto kind = phases_[current_].kind;
        if (kind == PhaseKind::kKset) {
          finish_phase(kset_choice(q.quorum()), q.messages());
        } else {
          finish_phase(describe(q.messages()), q.messages());
        }
      }
    } else if (uses_stable) {
      auto step = stable_.at(inst).on_message(d.origin, d.content);
      for (auto& r : step.reports) broadcast(report_tag(inst, report_seq_[inst]++), std::move(r));
      if (step.returned && is_current) {
        const auto& s = stable_.at(inst);
        const auto& m = *s.result();
        const auto kind = phases_[current_].kind;
        finish_phase(kind == PhaseKind::kBary ? bary_choice(quorum_of(m, spec_->round.quorum_threshold()))
                                              : describe(m),
                     m);
      }
    }
    return;
  }

  if (uses_stable) {
    auto step = stable_.at(inst).on_report(d.origin, d.content);
    if (step.returned && is_current) {
      const auto& m = *stable_.at(inst).result();
      const auto kind = phases_[current_].kind;
      finish_phase(kind == PhaseKind::kBary ? bary_choice(quorum_of(m, spec_->round.quorum_threshold()))
                                            : describe(m),
                   m);
    }
  }
}

std::string ProcessMachine::kset_choice(const QuorumSet& q) const {
  auto values = quorum_values(q);
  if (values.empty()) return {};
  return *std::min_element(values.begin(), values.end(),
                           [&](const std::string& a, const std::string& b) { return spec_->ranking.less(a, b); });
}

std::string ProcessMachine::bary_choice(const QuorumSet& q) const { return face_name(quorum_values(q)); }

void ProcessMachine::begin_phase(std::size_t i) {
  const auto kind = plan_[i];
  const bool bary_first = plan_.front() == PhaseKind::kBary;
  const auto inst = static_cast<std::uint32_t>(bary_first ? i + 1 : i);
  std::string value = i == 0 ? input_ : phases_.back().output.value_or("");
  current_ = i;
  phases_.push_back({kind, inst, value, std::nullopt, std::nullopt});

  if (kind == PhaseKind::kMap) {
    auto it = spec_->approx.find(value);
    finish_phase(it != spec_->approx.end() ? it->second : "<unmapped:" + value + ">", std::nullopt);
    return;
  }

  switch (kind) {
    case PhaseKind::kQuorum:
    case PhaseKind::kKset:
      quorum_.emplace(inst, QuorumCollector(spec_->round));
      break;
    case PhaseKind::kStable:
    case PhaseKind::kBary:
      stable_.emplace(inst, StableCollector(spec_->round));
      break;
    default:
      break;
  }
  broadcast(plain_tag(inst), encode_value(value));

  auto& round = rounds_[inst];
  round.started = true;
  while (!round.inbox.empty()) {
    auto d = std::move(round.inbox.front());
    round.inbox.pop_front();
    process(d);
  }
}

void ProcessMachine::finish_phase(std::string output, std::optional<MessageSet> returned) {
  auto& rec = phases_[current_];
  rec.output = output;
  rec.returned = std::move(returned);
  notes_.push_back({MachineNote::Kind::kReturn, plain_tag(rec.instance), encode_value(output)});
  if (current_ + 1 < plan_.size()) {
    begin_phase(current_ + 1);
    return;
  }
  decision_ = std::move(output);
  notes_.push_back({MachineNote::Kind::kDecide, plain_tag(rec.instance), *decision_});
}

}  // namespace byzct
