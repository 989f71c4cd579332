#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oran {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Simulated time in milliseconds. Every timestamp in the stack derives from
/// the simulator clock; nothing reads the wall clock.
using TimeMs = std::int64_t;

Bytes to_bytes(std::string_view text);
std::string to_string(ByteView bytes);

/// Space separated two-digit hex, e.g. "31 32 33 34".
std::string to_hex(ByteView bytes);

void put_u16_be(Bytes& out, std::uint16_t value);
void put_u24_be(Bytes& out, std::uint32_t value);
void put_u32_be(Bytes& out, std::uint32_t value);
void put_u64_be(Bytes& out, std::uint64_t value);

std::uint16_t get_u16_be(ByteView in);
std::uint32_t get_u24_be(ByteView in);
std::uint32_t get_u32_be(ByteView in);
std::uint64_t get_u64_be(ByteView in);

/// Incremental 64-bit FNV-1a. Used for state hashes and provenance hashes,
/// so the output must never depend on platform or container iteration order.
class Fnv1a {
 public:
  Fnv1a& add(ByteView data) noexcept;
  Fnv1a& add(std::string_view text) noexcept;
  Fnv1a& add_u64(std::uint64_t value) noexcept;
  Fnv1a& add_i64(std::int64_t value) noexcept { return add_u64(static_cast<std::uint64_t>(value)); }
  Fnv1a& add_double(double value) noexcept;

  std::uint64_t digest() const noexcept { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

/// Shortest round-trip decimal representation; stable across runs.
std::string format_double(double value);

std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

}  // namespace oran
