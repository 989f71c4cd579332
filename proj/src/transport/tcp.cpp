#include <arpa/inet.h>
#include <atomic>
#include <cerrno>
#include <cstring>
#include <mutex>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include "oran/common/error.hpp"
#include "oran/transport/transport.hpp"

namespace oran::transport {

namespace {

std::pair<std::string, std::string> split_address(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos) fail(Errc::unreachable, "address '" + address + "' lacks a port");
  return {address.substr(0, colon), address.substr(colon + 1)};
}

addrinfo* resolve(const std::string& address, bool passive) {
  auto [host, port] = split_address(address);
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  if (int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(), port.c_str(), &hints, &res); rc != 0) {
    fail(Errc::unreachable, "cannot resolve '" + address + "': " + ::gai_strerror(rc));
  }
  return res;
}

class TcpConnection final : public Connection {
 public:
  explicit TcpConnection(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }
  ~TcpConnection() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void send(ByteView payload) override {
    const auto frame = encode_frame(payload);
    std::lock_guard lock(send_mu_);
    if (local_closed_) fail(Errc::closed, "connection closed");
    std::size_t off = 0;
    while (off < frame.size()) {
      const auto n = ::send(fd_, frame.data() + off, frame.size() - off, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        fail(Errc::closed, std::string("send failed: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::optional<Bytes> recv() override {
    std::lock_guard lock(recv_mu_);
    for (;;) {
      if (auto msg = decoder_.next()) return msg;
      if (eof_ || !fill(true)) return std::nullopt;
    }
  }

  Poll try_recv() override {
    std::lock_guard lock(recv_mu_);
    for (;;) {
      if (auto msg = decoder_.next()) return {Poll::State::message, std::move(*msg)};
      if (eof_) return {Poll::State::closed, {}};
      if (!fill(false)) return {eof_ ? Poll::State::closed : Poll::State::pending, {}};
    }
  }

  void close() override {
    std::lock_guard lock(send_mu_);
    if (!local_closed_) {
      local_closed_ = true;
      ::shutdown(fd_, SHUT_WR);
    }
  }

  bool is_open() const override { return !local_closed_ && !eof_; }

 private:
  // Reads what is available. Returns false on EOF or, when non-blocking,
  // when nothing was ready.
  bool fill(bool block) {
    std::uint8_t chunk[65536];
    for (;;) {
      const auto n = ::recv(fd_, chunk, sizeof chunk, block ? 0 : MSG_DONTWAIT);
      if (n > 0) {
        decoder_.feed(ByteView(chunk, static_cast<std::size_t>(n)));
        return true;
      }
      if (n == 0) {
        eof_ = true;
        if (decoder_.buffered() > 0) fail(Errc::malformed_frame, "stream ended inside a frame");
        return false;
      }
      if (errno == EINTR) continue;
      if (!block && (errno == EAGAIN || errno == EWOULDBLOCK)) return false;
      eof_ = true;
      return false;
    }
  }

  int fd_;
  std::mutex send_mu_;
  std::mutex recv_mu_;
  FrameDecoder decoder_;
  std::atomic<bool> local_closed_ = false;
  std::atomic<bool> eof_ = false;
};

class TcpListener final : public Listener {
 public:
  explicit TcpListener(const std::string& address) {
    addrinfo* res = resolve(address, true);
    fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    const bool ok = fd_ >= 0 && ::bind(fd_, res->ai_addr, res->ai_addrlen) == 0 && ::listen(fd_, 64) == 0;
    ::freeaddrinfo(res);
    if (!ok) {
      const std::string why = std::strerror(errno);
      if (fd_ >= 0) ::close(fd_);
      fail(Errc::refused, "cannot listen on '" + address + "': " + why);
    }
    sockaddr_in bound{};
    socklen_t len = sizeof bound;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    char host[INET_ADDRSTRLEN] = {};
    ::inet_ntop(AF_INET, &bound.sin_addr, host, sizeof host);
    address_ = std::string(host) + ":" + std::to_string(ntohs(bound.sin_port));
  }
  ~TcpListener() override { close(); }

  std::unique_ptr<Connection> accept() override {
    for (;;) {
      if (fd_ < 0) return nullptr;
      const int c = ::accept(fd_, nullptr, nullptr);
      if (c >= 0) return std::make_unique<TcpConnection>(c);
      if (errno != EINTR) return nullptr;
    }
  }

  std::unique_ptr<Connection> try_accept() override {
    if (fd_ < 0) return nullptr;
    pollfd p{fd_, POLLIN, 0};
    if (::poll(&p, 1, 0) <= 0) return nullptr;
    return accept();
  }

  void close() override {
    if (fd_ >= 0) {
      ::close(fd_);
      fd_ = -1;
    }
  }

  std::string address() const override { return address_; }

 private:
  int fd_ = -1;
  std::string address_;
};

}  // namespace

std::unique_ptr<Listener> listen_tcp(const std::string& address) { return std::make_unique<TcpListener>(address); }

std::unique_ptr<Connection> connect_tcp(const Endpoint& endpoint) {
  addrinfo* res = resolve(endpoint.address, false);
  const int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  int rc = fd >= 0 ? ::connect(fd, res->ai_addr, res->ai_addrlen) : -1;
  while (rc != 0 && errno == EINTR) rc = ::connect(fd, res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  if (rc != 0) {
    const std::string why = std::strerror(errno);
    if (fd >= 0) ::close(fd);
    fail(Errc::unreachable, "cannot connect to '" + endpoint.address + "': " + why);
  }
  return std::make_unique<TcpConnection>(fd);
}

}  // namespace oran::transport
