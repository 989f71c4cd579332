#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "oran/transport/transport.hpp"

namespace oran::harness {

/// One E2 frame seen at the RIC side of a link.
///
/// File layout, big-endian, records back to back with no header:
///   u64 time_ms | u8 direction (0 node->ric, 1 ric->node) | u16 link | u32 length | payload
struct CaptureRecord {
  TimeMs time_ms = 0;
  bool to_node = false;
  std::uint16_t link = 0;
  Bytes payload;
  bool operator==(const CaptureRecord&) const = default;
};

Bytes encode_capture(const std::vector<CaptureRecord>& records);
/// Throws malformed_capture naming the byte offset of the broken record.
std::vector<CaptureRecord> decode_capture(ByteView data);

/// Chronological log with the E2AP field names, one block per frame.
/// Throws malformed_capture when a payload is not a valid PDU.
std::string render_capture(ByteView data);

/// Decorator recording every frame of one link.
class CapturingConnection final : public transport::Connection {
 public:
  CapturingConnection(std::unique_ptr<transport::Connection> inner, std::uint16_t link, const TimeMs& clock,
                      std::vector<CaptureRecord>& sink)
      : inner_(std::move(inner)), link_(link), clock_(clock), sink_(sink) {}

  void send(ByteView payload) override;
  std::optional<Bytes> recv() override;
  transport::Poll try_recv() override;
  void close() override { inner_->close(); }
  bool is_open() const override { return inner_->is_open(); }

 private:
  std::unique_ptr<transport::Connection> inner_;
  std::uint16_t link_;
  const TimeMs& clock_;
  std::vector<CaptureRecord>& sink_;
};

}  // namespace oran::harness
