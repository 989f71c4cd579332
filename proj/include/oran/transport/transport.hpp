#pragma once

#include <memory>
#include <optional>
#include <string>

#include "oran/common/bytes.hpp"

namespace oran::transport {

/// Largest payload a frame may carry.
inline constexpr std::size_t kMaxFrame = std::size_t{1} << 24;

/// 4-byte big-endian length followed by the payload. Throws oversize.
Bytes encode_frame(ByteView payload);

/// Incremental frame splitter for byte streams.
class FrameDecoder {
 public:
  void feed(ByteView chunk);
  /// Next complete payload, if buffered. A length prefix above kMaxFrame
  /// throws malformed_frame.
  std::optional<Bytes> next();
  std::size_t buffered() const noexcept { return buf_.size() - pos_; }

 private:
  Bytes buf_;
  std::size_t pos_ = 0;
};

enum class Role { ric, e2_node };

struct Endpoint {
  std::string address;
  Role role = Role::e2_node;
};

/// Result of a non-blocking receive.
struct Poll {
  enum class State { message, pending, closed };
  State state = State::pending;
  Bytes payload;
};

/// Reliable, ordered, message-preserving duplex channel. One sender and one
/// receiver may use a connection concurrently.
class Connection {
 public:
  virtual ~Connection() = default;

  /// Throws closed or oversize.
  virtual void send(ByteView payload) = 0;
  /// Blocks until a message arrives; nullopt once the peer closed and the
  /// queue is drained.
  virtual std::optional<Bytes> recv() = 0;
  virtual Poll try_recv() = 0;
  virtual void close() = 0;
  virtual bool is_open() const = 0;

  void send(const Bytes& payload) { send(ByteView(payload)); }
};

class Listener {
 public:
  virtual ~Listener() = default;
  virtual std::unique_ptr<Connection> accept() = 0;
  /// Null when no connection is waiting.
  virtual std::unique_ptr<Connection> try_accept() = 0;
  virtual void close() = 0;
  virtual std::string address() const = 0;
};

/// In-process transport with the same semantics as the TCP variant. Never
/// blocks when driven through try_recv/try_accept, so it can run under the
/// single-threaded simulated-time scheduler.
class LoopbackHub {
 public:
  LoopbackHub();
  ~LoopbackHub();
  LoopbackHub(const LoopbackHub&) = delete;
  LoopbackHub& operator=(const LoopbackHub&) = delete;

  /// Throws refused if the name is already bound by an open listener.
  std::unique_ptr<Listener> listen(const std::string& name);
  /// Throws unreachable when nothing listens at the address, refused when
  /// the listener has been closed.
  std::unique_ptr<Connection> connect(const Endpoint& endpoint);

  struct State;

 private:
  std::shared_ptr<State> state_;
};

/// Listens on "host:port"; port 0 picks an ephemeral port, see address().
std::unique_ptr<Listener> listen_tcp(const std::string& address);
/// Throws unreachable when the connection cannot be established.
std::unique_ptr<Connection> connect_tcp(const Endpoint& endpoint);

}  // namespace oran::transport
