#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "byzct/payload.hpp"

namespace byzct {

/// Contents backed by at least t+1 distinct senders.
using QuorumSet = std::set<Payload>;

QuorumSet quorum_of(const MessageSet& m, std::uint32_t threshold);

struct RoundParams {
  std::uint32_t n_plus_1 = 4;
  std::uint32_t t = 1;
  /// Test-only mutation: added to the t+1 quorum threshold.
  int quorum_threshold_shift = 0;

  std::uint32_t quorum_threshold() const;
  /// |M| needed before returning: n - t + 1.
  std::uint32_t collect_threshold() const { return n_plus_1 - t; }
};

/// Waits until |M| >= n-t+1 and the quorum of M is non-empty.
class QuorumCollector {
 public:
  explicit QuorumCollector(RoundParams params) : params_(params) {}

  /// Adds (sender, content) unless the sender is already present. Returns
  /// true on the event that first satisfies the exit condition.
  bool add(ProcessId sender, const Payload& content);

  bool complete() const { return complete_; }
  const MessageSet& messages() const { return m_; }
  QuorumSet quorum() const { return quorum_of(m_, params_.quorum_threshold()); }

 private:
  RoundParams params_;
  MessageSet m_;
  bool complete_ = false;
};

/// Stable vectors: collect a quorum, then keep re-broadcasting the growing
/// message set as reports until n+1-t processes last reported exactly M.
///
/// After returning, the collector keeps absorbing messages and reporting so
/// that slower processes can still find their buddies; the returned set is
/// frozen at the moment of return.
class StableCollector {
 public:
  explicit StableCollector(RoundParams params);

  struct Step {
    /// Encoded reports to reliably broadcast, in order.
    std::vector<Payload> reports;
    /// True on the event that first satisfies the exit condition.
    bool returned = false;
  };

  Step on_message(ProcessId sender, const Payload& content);
  /// Malformed reports are ignored.
  Step on_report(ProcessId sender, const Payload& encoded);

  bool complete() const { return result_.has_value(); }
  const std::optional<MessageSet>& result() const { return result_; }
  const MessageSet& current() const { return m_; }
  const std::vector<std::optional<MessageSet>>& reports() const { return r_; }

  /// Every report this collector emitted contained the previous one.
  bool own_reports_monotone() const { return own_monotone_; }
  /// Senders whose stored report was ever replaced by a non-superset.
  const std::set<ProcessId>& shrinking_reporters() const { return shrinking_; }

 private:
  void emit_report(Step& step);
  void check_buddies(Step& step);

  RoundParams params_;
  QuorumCollector quorum_;
  MessageSet m_;
  std::vector<std::optional<MessageSet>> r_;
  std::optional<MessageSet> last_report_;
  std::optional<MessageSet> result_;
  bool own_monotone_ = true;
  std::set<ProcessId> shrinking_;
};

bool is_subset(const MessageSet& a, const MessageSet& b);

}  // namespace byzct
