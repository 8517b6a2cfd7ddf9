#include "byzct/rounds.hpp"

#include <algorithm>
#include <map>

namespace byzct {

QuorumSet quorum_of(const MessageSet& m, std::uint32_t threshold) {
  std::map<Payload, std::uint32_t> counts;
  for (const auto& [sender, content] : m) ++counts[content];
  QuorumSet out;
  for (const auto& [content, count] : counts) {
    if (count >= threshold) out.insert(content);
  }
  return out;
}

std::uint32_t RoundParams::quorum_threshold() const {
  const auto base = static_cast<std::int64_t>(t) + 1 + quorum_threshold_shift;
  return static_cast<std::uint32_t>(std::max<std::int64_t>(base, 1));
}

bool QuorumCollector::add(ProcessId sender, const Payload& content) {
  if (!m_.emplace(sender, content).second || complete_) return false;
  if (m_.size() >= params_.collect_threshold() && !quorum().empty()) {
    complete_ = true;
    return true;
  }
  return false;
}

bool is_subset(const MessageSet& a, const MessageSet& b) {
  return std::all_of(a.begin(), a.end(), [&](const auto& entry) {
    auto it = b.find(entry.first);
    return it != b.end() && it->second == entry.second;
  });
}

StableCollector::StableCollector(RoundParams params)
    : params_(params), quorum_(params), r_(params.n_plus_1) {}

void StableCollector::emit_report(Step& step) {
  if (last_report_ && !is_subset(*last_report_, m_)) own_monotone_ = false;
  last_report_ = m_;
  step.reports.push_back(encode_message_set(m_));
}

void StableCollector::check_buddies(Step& step) {
  if (result_ || !quorum_.complete()) return;
  const auto buddies = std::count_if(r_.begin(), r_.end(), [&](const auto& r) { return r && *r == m_; });
  if (static_cast<std::uint32_t>(buddies) >= params_.collect_threshold()) {
    result_ = m_;
    step.returned = true;
  }
}

StableCollector::Step StableCollector::on_message(ProcessId sender, const Payload& content) {
  Step step;
  if (!quorum_.complete()) {
    if (quorum_.add(sender, content)) {
      m_ = quorum_.messages();
      emit_report(step);
      check_buddies(step);
    }
    return step;
  }
  if (!m_.emplace(sender, content).second) return step;
  emit_report(step);
  check_buddies(step);
  return step;
}

StableCollector::Step StableCollector::on_report(ProcessId sender, const Payload& encoded) {
  Step step;
  auto report = decode_message_set(encoded, params_.n_plus_1);
  if (!report || index(sender) >= r_.size()) return step;
  auto& slot = r_[index(sender)];
  if (slot && !is_subset(*slot, *report)) shrinking_.insert(sender);
  slot = std::move(*report);
  check_buddies(step);
  return step;
}

}  // namespace byzct
