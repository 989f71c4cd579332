#include "oran/harness/capture.hpp"

#include "oran/common/error.hpp"
#include "oran/e2/codec.hpp"

namespace oran::harness {

namespace {

constexpr std::size_t kRecordHeader = 8 + 1 + 2 + 4;

}  // namespace

Bytes encode_capture(const std::vector<CaptureRecord>& records) {
  Bytes out;
  for (const auto& r : records) {
    put_u64_be(out, static_cast<std::uint64_t>(r.time_ms));
    out.push_back(r.to_node ? 1 : 0);
    put_u16_be(out, r.link);
    put_u32_be(out, static_cast<std::uint32_t>(r.payload.size()));
    out.insert(out.end(), r.payload.begin(), r.payload.end());
  }
  return out;
}

std::vector<CaptureRecord> decode_capture(ByteView data) {
  std::vector<CaptureRecord> out;
  std::size_t pos = 0;
  while (pos < data.size()) {
    if (data.size() - pos < kRecordHeader) {
      fail(Errc::malformed_capture, "truncated record header at byte offset " + std::to_string(pos));
    }
    CaptureRecord r;
    r.time_ms = static_cast<TimeMs>(get_u64_be(data.subspan(pos)));
    const auto dir = data[pos + 8];
    if (dir > 1) fail(Errc::malformed_capture, "bad direction at byte offset " + std::to_string(pos + 8));
    r.to_node = dir == 1;
    r.link = get_u16_be(data.subspan(pos + 9));
    const auto len = get_u32_be(data.subspan(pos + 11));
    if (data.size() - pos - kRecordHeader < len) {
      fail(Errc::malformed_capture, "truncated payload at byte offset " + std::to_string(pos));
    }
    const auto body = data.subspan(pos + kRecordHeader, len);
    r.payload.assign(body.begin(), body.end());
    out.push_back(std::move(r));
    pos += kRecordHeader + len;
  }
  return out;
}

std::string render_capture(ByteView data) {
  std::string out;
  std::size_t offset = 0;
  for (const auto& r : decode_capture(data)) {
    e2::E2apPdu pdu;
    try {
      pdu = e2::decode(r.payload);
    } catch (const Error& e) {
      fail(Errc::malformed_capture, "undecodable PDU in record at byte offset " + std::to_string(offset) + ": " + e.what());
    }
    out += "t=" + std::to_string(r.time_ms) + " ms  link " + std::to_string(r.link) +
           (r.to_node ? "  ric -> node\n" : "  node -> ric\n");
    out += e2::render_debug(pdu);
    if (!out.empty() && out.back() != '\n') out += '\n';
    out += '\n';
    offset += kRecordHeader + r.payload.size();
  }
  return out;
}

void CapturingConnection::send(ByteView payload) {
  inner_->send(payload);
  sink_.push_back({clock_, true, link_, Bytes(payload.begin(), payload.end())});
}

std::optional<Bytes> CapturingConnection::recv() {
  auto m = inner_->recv();
  if (m) sink_.push_back({clock_, false, link_, *m});
  return m;
}

transport::Poll CapturingConnection::try_recv() {
  auto p = inner_->try_recv();
  if (p.state == transport::Poll::State::message) sink_.push_back({clock_, false, link_, p.payload});
  return p;
}

}  // namespace oran::harness
