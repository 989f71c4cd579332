#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>

#include "oran/common/error.hpp"
#include "oran/transport/transport.hpp"

namespace oran::transport {

namespace {

// Two queues, one per direction. Side 0 is the connecting end.
struct Pipe {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<Bytes> queue[2];
  bool closed = false;
};

class LoopbackConnection final : public Connection {
 public:
  LoopbackConnection(std::shared_ptr<Pipe> pipe, int side) : pipe_(std::move(pipe)), side_(side) {}
  ~LoopbackConnection() override { close(); }

  void send(ByteView payload) override {
    if (payload.size() > kMaxFrame) fail(Errc::oversize, "payload exceeds the frame limit");
    std::lock_guard lock(pipe_->mu);
    if (pipe_->closed) fail(Errc::closed, "connection closed");
    pipe_->queue[1 - side_].emplace_back(payload.begin(), payload.end());
    pipe_->cv.notify_all();
  }

  std::optional<Bytes> recv() override {
    std::unique_lock lock(pipe_->mu);
    auto& q = pipe_->queue[side_];
    pipe_->cv.wait(lock, [&] { return !q.empty() || pipe_->closed; });
    if (q.empty()) return std::nullopt;
    Bytes out = std::move(q.front());
    q.pop_front();
    return out;
  }

  Poll try_recv() override {
    std::lock_guard lock(pipe_->mu);
    auto& q = pipe_->queue[side_];
    if (q.empty()) return {pipe_->closed ? Poll::State::closed : Poll::State::pending, {}};
    Poll p{Poll::State::message, std::move(q.front())};
    q.pop_front();
    return p;
  }

  void close() override {
    std::lock_guard lock(pipe_->mu);
    pipe_->closed = true;
    pipe_->cv.notify_all();
  }

  bool is_open() const override {
    std::lock_guard lock(pipe_->mu);
    return !pipe_->closed;
  }

 private:
  std::shared_ptr<Pipe> pipe_;
  int side_;
};

struct Binding {
  std::deque<std::shared_ptr<Pipe>> pending;
  bool closed = false;
};

}  // namespace

struct LoopbackHub::State {
  std::mutex mu;
  std::condition_variable cv;
  std::map<std::string, std::shared_ptr<Binding>> bindings;
};

namespace {

class LoopbackListener final : public Listener {
 public:
  LoopbackListener(std::shared_ptr<LoopbackHub::State> hub, std::string name, std::shared_ptr<Binding> binding)
      : hub_(std::move(hub)), name_(std::move(name)), binding_(std::move(binding)) {}
  ~LoopbackListener() override { close(); }

  std::unique_ptr<Connection> accept() override {
    std::unique_lock lock(hub_->mu);
    hub_->cv.wait(lock, [&] { return !binding_->pending.empty() || binding_->closed; });
    return take();
  }

  std::unique_ptr<Connection> try_accept() override {
    std::lock_guard lock(hub_->mu);
    return take();
  }

  void close() override {
    std::lock_guard lock(hub_->mu);
    binding_->closed = true;
    hub_->cv.notify_all();
  }

  std::string address() const override { return name_; }

 private:
  std::unique_ptr<Connection> take() {
    if (binding_->pending.empty()) return nullptr;
    auto pipe = std::move(binding_->pending.front());
    binding_->pending.pop_front();
    return std::make_unique<LoopbackConnection>(std::move(pipe), 1);
  }

  std::shared_ptr<LoopbackHub::State> hub_;
  std::string name_;
  std::shared_ptr<Binding> binding_;
};

}  // namespace

LoopbackHub::LoopbackHub() : state_(std::make_shared<State>()) {}
LoopbackHub::~LoopbackHub() = default;

std::unique_ptr<Listener> LoopbackHub::listen(const std::string& name) {
  std::lock_guard lock(state_->mu);
  auto& slot = state_->bindings[name];
  if (slot && !slot->closed) fail(Errc::refused, "address '" + name + "' already bound");
  slot = std::make_shared<Binding>();
  return std::make_unique<LoopbackListener>(state_, name, slot);
}

std::unique_ptr<Connection> LoopbackHub::connect(const Endpoint& endpoint) {
  std::lock_guard lock(state_->mu);
  auto it = state_->bindings.find(endpoint.address);
  if (it == state_->bindings.end()) fail(Errc::unreachable, "no listener at '" + endpoint.address + "'");
  if (it->second->closed) fail(Errc::refused, "listener at '" + endpoint.address + "' closed");
  auto pipe = std::make_shared<Pipe>();
  it->second->pending.push_back(pipe);
  state_->cv.notify_all();
  return std::make_unique<LoopbackConnection>(std::move(pipe), 0);
}

}  // namespace oran::transport
