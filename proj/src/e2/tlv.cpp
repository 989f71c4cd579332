#include "oran/e2/tlv.hpp"

#include <bit>

namespace oran::e2 {

TlvWriter& TlvWriter::raw(std::uint8_t tag, ByteView value) {
  if (value.size() > kMaxTlvValue) {
    fail(Errc::invariant_violation, "field " + std::to_string(tag) + " exceeds 2^24-1 bytes");
  }
  out_.push_back(tag);
  put_u24_be(out_, static_cast<std::uint32_t>(value.size()));
  out_.insert(out_.end(), value.begin(), value.end());
  return *this;
}

TlvWriter& TlvWriter::u8(std::uint8_t tag, std::uint8_t value) {
  const std::uint8_t v[1] = {value};
  return raw(tag, v);
}

TlvWriter& TlvWriter::u32(std::uint8_t tag, std::uint32_t value) {
  Bytes v;
  put_u32_be(v, value);
  return raw(tag, v);
}

TlvWriter& TlvWriter::u64(std::uint8_t tag, std::uint64_t value) {
  Bytes v;
  put_u64_be(v, value);
  return raw(tag, v);
}

TlvWriter& TlvWriter::f64(std::uint8_t tag, double value) {
  return u64(tag, std::bit_cast<std::uint64_t>(value));
}

TlvWriter& TlvWriter::str(std::uint8_t tag, std::string_view value) {
  return raw(tag, ByteView(reinterpret_cast<const std::uint8_t*>(value.data()), value.size()));
}

std::optional<std::uint8_t> TlvReader::peek_tag() const {
  if (at_end()) return std::nullopt;
  return data_[pos_];
}

ByteView TlvReader::expect(std::uint8_t tag) {
  if (data_.size() - pos_ < 4) error("truncated field header, wanted tag " + std::to_string(tag));
  if (data_[pos_] != tag) {
    error("unexpected tag " + std::to_string(data_[pos_]) + ", wanted " + std::to_string(tag));
  }
  const std::size_t len = get_u24_be(data_.subspan(pos_ + 1));
  if (data_.size() - pos_ - 4 < len) error("truncated value for tag " + std::to_string(tag));
  auto value = data_.subspan(pos_ + 4, len);
  pos_ += 4 + len;
  return value;
}

std::optional<ByteView> TlvReader::optional(std::uint8_t tag) {
  if (peek_tag() != tag) return std::nullopt;
  return expect(tag);
}

std::uint8_t TlvReader::u8(std::uint8_t tag) {
  auto v = expect(tag);
  if (v.size() != 1) error("tag " + std::to_string(tag) + " expects 1 byte");
  return v[0];
}

std::uint32_t TlvReader::u32(std::uint8_t tag) {
  auto v = expect(tag);
  if (v.size() != 4) error("tag " + std::to_string(tag) + " expects 4 bytes");
  return get_u32_be(v);
}

std::uint64_t TlvReader::u64(std::uint8_t tag) {
  auto v = expect(tag);
  if (v.size() != 8) error("tag " + std::to_string(tag) + " expects 8 bytes");
  return get_u64_be(v);
}

double TlvReader::f64(std::uint8_t tag) { return std::bit_cast<double>(u64(tag)); }

std::string TlvReader::str(std::uint8_t tag) { return to_string(expect(tag)); }

Bytes TlvReader::bytes(std::uint8_t tag) {
  auto v = expect(tag);
  return Bytes(v.begin(), v.end());
}

void TlvReader::finish() const {
  if (!at_end()) error(std::to_string(data_.size() - pos_) + " trailing bytes");
}

void TlvReader::error(const std::string& what) const { fail(errc_, what); }

}  // namespace oran::e2
