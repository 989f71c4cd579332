#include "oran/common/bytes.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace oran {

Bytes to_bytes(std::string_view text) { return Bytes(text.begin(), text.end()); }

std::string to_string(ByteView bytes) { return std::string(bytes.begin(), bytes.end()); }

std::string to_hex(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 3);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (i != 0) out.push_back(' ');
    out.push_back(kDigits[bytes[i] >> 4]);
    out.push_back(kDigits[bytes[i] & 0x0f]);
  }
  return out;
}

void put_u16_be(Bytes& out, std::uint16_t value) {
  out.push_back(static_cast<std::uint8_t>(value >> 8));
  out.push_back(static_cast<std::uint8_t>(value));
}

void put_u24_be(Bytes& out, std::uint32_t value) {
  out.push_back(static_cast<std::uint8_t>(value >> 16));
  out.push_back(static_cast<std::uint8_t>(value >> 8));
  out.push_back(static_cast<std::uint8_t>(value));
}

void put_u32_be(Bytes& out, std::uint32_t value) {
  put_u16_be(out, static_cast<std::uint16_t>(value >> 16));
  put_u16_be(out, static_cast<std::uint16_t>(value));
}

void put_u64_be(Bytes& out, std::uint64_t value) {
  put_u32_be(out, static_cast<std::uint32_t>(value >> 32));
  put_u32_be(out, static_cast<std::uint32_t>(value));
}

std::uint16_t get_u16_be(ByteView in) {
  return static_cast<std::uint16_t>((in[0] << 8) | in[1]);
}

std::uint32_t get_u24_be(ByteView in) {
  return (static_cast<std::uint32_t>(in[0]) << 16) | (static_cast<std::uint32_t>(in[1]) << 8) | in[2];
}

std::uint32_t get_u32_be(ByteView in) {
  return (static_cast<std::uint32_t>(get_u16_be(in)) << 16) | get_u16_be(in.subspan(2));
}

std::uint64_t get_u64_be(ByteView in) {
  return (static_cast<std::uint64_t>(get_u32_be(in)) << 32) | get_u32_be(in.subspan(4));
}

Fnv1a& Fnv1a::add(ByteView data) noexcept {
  for (auto b : data) {
    state_ ^= b;
    state_ *= 0x00000100000001b3ULL;
  }
  return *this;
}

Fnv1a& Fnv1a::add(std::string_view text) noexcept {
  add_u64(text.size());
  return add(ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Fnv1a& Fnv1a::add_u64(std::uint64_t value) noexcept {
  std::uint8_t raw[8];
  for (int i = 0; i < 8; ++i) raw[i] = static_cast<std::uint8_t>(value >> (56 - 8 * i));
  return add(ByteView(raw, 8));
}

Fnv1a& Fnv1a::add_double(double value) noexcept {
  if (value == 0.0) value = 0.0;  // fold -0.0
  return add_u64(std::bit_cast<std::uint64_t>(value));
}

std::string Fnv1a::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
  return buf;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (value == 0.0) return "0";
  char buf[64];
  // integral values print in full so CSV consumers never see "7e+05"
  const auto fmt = std::fabs(value) < 1e15 && std::floor(value) == value ? std::chars_format::fixed
                                                                         : std::chars_format::general;
  auto res = std::to_chars(buf, buf + sizeof buf, value, fmt);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(text.substr(start));
      return out;
    }
    out.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t' || text.front() == '\r')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r' || text.back() == '\n')) text.remove_suffix(1);
  return text;
}

}  // namespace oran
