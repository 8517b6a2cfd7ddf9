#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace byzct {

enum class ProcessId : std::uint32_t {};

constexpr std::uint32_t index(ProcessId p) { return static_cast<std::uint32_t>(p); }
constexpr ProcessId pid(std::uint32_t i) { return static_cast<ProcessId>(i); }

/// Canonically serialized message content. Equality is byte equality.
using Payload = std::string;

/// One value: 4-byte big-endian length, then the bytes.
Payload encode_value(std::string_view value);
std::optional<std::string> decode_value(std::string_view bytes);

/// Sorted, de-duplicated values: 4-byte count, then each value encoded.
Payload encode_set(std::vector<std::string> values);
std::optional<std::vector<std::string>> decode_set(std::string_view bytes);

/// At most one content per sender.
using MessageSet = std::map<ProcessId, Payload>;

/// 4-byte count, then (4-byte sender, encoded content) in sender order.
Payload encode_message_set(const MessageSet& m);
/// Rejects senders >= n_plus_1, unsorted or repeated senders and trailing bytes.
std::optional<MessageSet> decode_message_set(std::string_view bytes, std::uint32_t n_plus_1);

std::string to_hex(std::string_view bytes);

}  // namespace byzct
