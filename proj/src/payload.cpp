#include "byzct/payload.hpp"

#include <algorithm>

namespace byzct {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>(v & 0xff));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::optional<std::uint32_t> u32() {
    if (bytes_.size() - pos_ < 4) return std::nullopt;
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | static_cast<unsigned char>(bytes_[pos_++]);
    return v;
  }

  std::optional<std::string> value() {
    auto len = u32();
    if (!len || bytes_.size() - pos_ < *len) return std::nullopt;
    std::string out(bytes_.substr(pos_, *len));
    pos_ += *len;
    return out;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Payload encode_value(std::string_view value) {
  Payload out;
  out.reserve(4 + value.size());
  put_u32(out, static_cast<std::uint32_t>(value.size()));
  out.append(value);
  return out;
}

std::optional<std::string> decode_value(std::string_view bytes) {
  Reader r(bytes);
  auto v = r.value();
  if (!v || !r.done()) return std::nullopt;
  return v;
}

Payload encode_set(std::vector<std::string> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  Payload out;
  put_u32(out, static_cast<std::uint32_t>(values.size()));
  for (const auto& v : values) out += encode_value(v);
  return out;
}

std::optional<std::vector<std::string>> decode_set(std::string_view bytes) {
  Reader r(bytes);
  auto count = r.u32();
  if (!count) return std::nullopt;
  std::vector<std::string> out;
  for (std::uint32_t i = 0; i < *count; ++i) {
    auto v = r.value();
    if (!v) return std::nullopt;
    if (!out.empty() && !(out.back() < *v)) return std::nullopt;
    out.push_back(std::move(*v));
  }
  if (!r.done()) return std::nullopt;
  return out;
}

Payload encode_message_set(const MessageSet& m) {
  Payload out;
  put_u32(out, static_cast<std::uint32_t>(m.size()));
  for (const auto& [sender, content] : m) {
    put_u32(out, index(sender));
    out += encode_value(content);
  }
  return out;
}

std::optional<MessageSet> decode_message_set(std::string_view bytes, std::uint32_t n_plus_1) {
  Reader r(bytes);
  auto count = r.u32();
  if (!count || *count > n_plus_1) return std::nullopt;
  MessageSet out;
  std::optional<std::uint32_t> last;
  for (std::uint32_t i = 0; i < *count; ++i) {
    auto sender = r.u32();
    if (!sender || *sender >= n_plus_1 || (last && *sender <= *last)) return std::nullopt;
    auto content = r.value();
    if (!content) return std::nullopt;
    out.emplace(pid(*sender), std::move(*content));
    last = sender;
  }
  if (!r.done()) return std::nullopt;
  return out;
}

std::string to_hex(std::string_view bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out.push_back(kDigits[c >> 4]);
    out.push_back(kDigits[c & 0xf]);
  }
  return out;
}

}  // namespace byzct
