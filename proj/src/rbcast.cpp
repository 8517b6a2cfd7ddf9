#include "byzct/rbcast.hpp"

#include <algorithm>
#include <stdexcept>

namespace byzct {

std::string tag_label(const RbTag& tag, Phase phase) {
  std::string sub;
  if (tag.stream == Stream::kPlain) {
    sub = "plain";
  } else {
    sub = "report" + std::to_string(tag.seq);
  }
  switch (phase) {
    case Phase::kInit:
      break;
    case Phase::kEcho:
      sub = tag.stream == Stream::kPlain ? "echo" : sub + "-echo";
      break;
    case Phase::kReady:
      sub = tag.stream == Stream::kPlain ? "ready" : sub + "-ready";
      break;
    case Phase::kDirect:
      sub += "-direct";
      break;
  }
  return std::to_string(tag.instance) + "." + std::to_string(tag.round) + "." + sub;
}

std::uint32_t RbParams::echo_threshold() const {
  const auto base = static_cast<std::int64_t>(n_plus_1) - t + echo_threshold_shift;
  return static_cast<std::uint32_t>(std::max<std::int64_t>(base, 1));
}

ReliableBroadcast::ReliableBroadcast(ProcessId self, RbParams params) : self_(self), params_(params) {
  if (index(self) >= params.n_plus_1) throw std::invalid_argument("process id out of range");
}

std::vector<Envelope> ReliableBroadcast::send_all(ProcessId origin, const RbTag& tag, Phase phase,
                                                  const Payload& content) const {
  std::vector<Envelope> out;
  out.reserve(params_.n_plus_1);
  for (std::uint32_t p = 0; p < params_.n_plus_1; ++p) {
    out.push_back({pid(p), Message{self_, origin, tag, phase, content}});
  }
  return out;
}

std::vector<Envelope> ReliableBroadcast::broadcast(const RbTag& tag, Payload content) {
  if (!used_tags_.insert(tag).second) {
    throw std::logic_error("process " + std::to_string(index(self_)) + " reused broadcast tag " +
                           tag_label(tag, Phase::kInit));
  }
  return send_all(self_, tag, Phase::kInit, content);
}

void ReliableBroadcast::maybe_ready(RbInstanceState& st, ProcessId origin, const RbTag& tag, Step& step) {
  if (st.sent_ready) return;
  // Both triggers share the one sent_ready flag.
  for (const auto& [content, voters] : st.echoes) {
    if (voters.size() >= params_.echo_threshold()) {
      st.sent_ready = true;
      auto out = send_all(origin, tag, Phase::kReady, content);
      step.out.insert(step.out.end(), out.begin(), out.end());
      return;
    }
  }
  for (const auto& [content, voters] : st.readies) {
    if (voters.size() >= params_.ready_amplify_threshold()) {
      st.sent_ready = true;
      auto out = send_all(origin, tag, Phase::kReady, content);
      step.out.insert(step.out.end(), out.begin(), out.end());
      return;
    }
  }
}

ReliableBroadcast::Step ReliableBroadcast::handle(const Message& in) {
  Step step;
  const auto n = params_.n_plus_1;
  if (index(in.from) >= n || index(in.origin) >= n) return step;
  if (in.phase == Phase::kDirect) return step;
  if (in.phase == Phase::kInit && in.from != in.origin) return step;
  if (in.tag.stream == Stream::kPlain && in.tag.seq != 0) return step;

  auto& st = instances_[{in.origin, in.tag}];
  switch (in.phase) {
    case Phase::kInit:
      if (st.sent_echo) return step;
      st.init = in.content;
      st.sent_echo = true;
      step.out = send_all(in.origin, in.tag, Phase::kEcho, in.content);
      return step;
    case Phase::kEcho:
      if (!st.echo_voters.insert(in.from).second) return step;
      st.echoes[in.content].insert(in.from);
      maybe_ready(st, in.origin, in.tag, step);
      break;
    case Phase::kReady:
      if (!st.ready_voters.insert(in.from).second) return step;
      st.readies[in.content].insert(in.from);
      maybe_ready(st, in.origin, in.tag, step);
      break;
    case Phase::kDirect:
      return step;
  }
  if (!st.delivered) {
    for (const auto& [content, voters] : st.readies) {
      if (voters.size() >= params_.deliver_threshold()) {
        st.delivered = true;
        step.delivered.push_back({in.origin, in.tag, content});
        break;
      }
    }
  }
  return step;
}

const RbInstanceState* ReliableBroadcast::instance(ProcessId origin, const RbTag& tag) const {
  auto it = instances_.find({origin, tag});
  return it == instances_.end() ? nullptr : &it->second;
}

std::vector<RbDelivery> DeliveryOrder::release(RbDelivery d) {
  auto& slot = slots_[{d.origin, d.tag.instance, d.tag.round}];
  std::vector<RbDelivery> out;
  if (d.tag.stream == Stream::kPlain) {
    slot.plain_done = true;
    out.push_back(std::move(d));
  } else {
    slot.pending.emplace(d.tag.seq, std::move(d));
  }
  if (!slot.plain_done) return out;
  for (auto it = slot.pending.find(slot.next_seq); it != slot.pending.end(); it = slot.pending.find(slot.next_seq)) {
    out.push_back(std::move(it->second));
    slot.pending.erase(it);
    ++slot.next_seq;
  }
  return out;
}

std::size_t DeliveryOrder::buffered() const {
  std::size_t total = 0;
  for (const auto& [key, slot] : slots_) total += slot.pending.size();
  return total;
}

}  // namespace byzct
