#pragma once

#include <optional>
#include <string>
#include <vector>

#include "byzct/agreement.hpp"

namespace byzct {

struct SimConfig;

/// Post-hoc invariant checkers. Each violation string starts with the
/// checker name followed by ": ".
struct CheckContext {
  const SimConfig& config;
  /// Non-faulty machines by process index; nullopt for faulty processes.
  const std::vector<std::optional<ProcessMachine>>& machines;
  /// Liveness checks only run on quiescent executions.
  bool quiescent = false;
};

std::vector<std::string> check_broadcast(const CheckContext& ctx);
std::vector<std::string> check_quorum(const CheckContext& ctx);
std::vector<std::string> check_stable(const CheckContext& ctx);
std::vector<std::string> check_kset(const CheckContext& ctx);
std::vector<std::string> check_bary(const CheckContext& ctx);
std::vector<std::string> check_task(const CheckContext& ctx);

/// Every checker that applies to the configured protocol.
std::vector<std::string> check_all(const CheckContext& ctx);

/// Checker name of a violation string.
std::string checker_name(const std::string& violation);

/// Members of a barycentric vertex name "{a,b}" (top level only), or
/// nullopt if the text is not a brace-delimited list.
std::optional<std::vector<std::string>> parse_face_name(const std::string& name);

}  // namespace byzct
