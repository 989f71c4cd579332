#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "oran/common/bytes.hpp"
#include "oran/common/error.hpp"

namespace oran::e2 {

/// Largest value that fits the 3-byte TLV length field.
inline constexpr std::size_t kMaxTlvValue = (1u << 24) - 1;

/// Writes tag(1) | length(3, big-endian) | value records.
class TlvWriter {
 public:
  TlvWriter& raw(std::uint8_t tag, ByteView value);
  TlvWriter& u8(std::uint8_t tag, std::uint8_t value);
  TlvWriter& u32(std::uint8_t tag, std::uint32_t value);
  TlvWriter& u64(std::uint8_t tag, std::uint64_t value);
  TlvWriter& i64(std::uint8_t tag, std::int64_t value) { return u64(tag, static_cast<std::uint64_t>(value)); }
  TlvWriter& f64(std::uint8_t tag, double value);
  TlvWriter& str(std::uint8_t tag, std::string_view value);
  TlvWriter& nested(std::uint8_t tag, const TlvWriter& inner) { return raw(tag, inner.bytes()); }

  const Bytes& bytes() const noexcept { return out_; }
  Bytes take() noexcept { return std::move(out_); }

 private:
  Bytes out_;
};

/// Sequential reader over TLV records. Every structural problem is reported
/// with the error code supplied at construction so the E2AP layer and the
/// service-model layer can surface their own error kinds.
class TlvReader {
 public:
  TlvReader(ByteView data, Errc on_error) : data_(data), errc_(on_error) {}

  bool at_end() const noexcept { return pos_ == data_.size(); }
  std::optional<std::uint8_t> peek_tag() const;

  ByteView expect(std::uint8_t tag);
  std::optional<ByteView> optional(std::uint8_t tag);

  std::uint8_t u8(std::uint8_t tag);
  std::uint32_t u32(std::uint8_t tag);
  std::uint64_t u64(std::uint8_t tag);
  std::int64_t i64(std::uint8_t tag) { return static_cast<std::int64_t>(u64(tag)); }
  double f64(std::uint8_t tag);
  std::string str(std::uint8_t tag);
  Bytes bytes(std::uint8_t tag);
  TlvReader nested(std::uint8_t tag) { return TlvReader(expect(tag), errc_); }

  /// Rejects trailing bytes.
  void finish() const;

  [[noreturn]] void error(const std::string& what) const;
  Errc errc() const noexcept { return errc_; }
  std::size_t offset() const noexcept { return pos_; }

 private:
  ByteView data_;
  std::size_t pos_ = 0;
  Errc errc_;
};

}  // namespace oran::e2
