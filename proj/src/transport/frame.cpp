#include "oran/common/error.hpp"
#include "oran/transport/transport.hpp"

namespace oran::transport {

Bytes encode_frame(ByteView payload) {
  if (payload.size() > kMaxFrame) {
    fail(Errc::oversize, "payload of " + std::to_string(payload.size()) + " bytes exceeds the frame limit");
  }
  Bytes out;
  out.reserve(4 + payload.size());
  put_u32_be(out, static_cast<std::uint32_t>(payload.size()));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

void FrameDecoder::feed(ByteView chunk) {
  if (pos_ > 0 && pos_ == buf_.size()) {
    buf_.clear();
    pos_ = 0;
  }
  buf_.insert(buf_.end(), chunk.begin(), chunk.end());
}

std::optional<Bytes> FrameDecoder::next() {
  if (buffered() < 4) return std::nullopt;
  const std::size_t len = get_u32_be(ByteView(buf_).subspan(pos_));
  if (len > kMaxFrame) fail(Errc::malformed_frame, "frame length " + std::to_string(len) + " exceeds limit");
  if (buffered() < 4 + len) return std::nullopt;
  Bytes payload(buf_.begin() + static_cast<std::ptrdiff_t>(pos_ + 4),
                buf_.begin() + static_cast<std::ptrdiff_t>(pos_ + 4 + len));
  pos_ += 4 + len;
  // compact once the consumed prefix dominates the buffer
  if (pos_ > 65536 && pos_ * 2 > buf_.size()) {
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(pos_));
    pos_ = 0;
  }
  return payload;
}

}  // namespace oran::transport
