#include "oran/ric/router.hpp"

#include "oran/common/error.hpp"

namespace oran::ric {

std::string_view to_string(ControlOutcome::Kind kind) noexcept {
  switch (kind) {
    case ControlOutcome::Kind::acknowledged: return "acknowledged";
    case ControlOutcome::Kind::denied: return "denied";
    case ControlOutcome::Kind::timeout: return "timeout";
    case ControlOutcome::Kind::conflict_rejected: return "conflict_rejected";
  }
  return "?";
}

void Router::register_endpoint(const std::string& name, Handler handler) {
  if (endpoints_.count(name)) fail(Errc::duplicate_name, "endpoint " + name);
  endpoints_[name] = std::move(handler);
}

void Router::remove_endpoint(const std::string& name) { endpoints_.erase(name); }

std::vector<std::string> Router::endpoints() const {
  std::vector<std::string> out;
  for (const auto& [name, h] : endpoints_) out.push_back(name);
  return out;
}

void Router::post(const std::string& to, XappEvent event) { queue_.emplace_back(to, std::move(event)); }

std::size_t Router::dispatch() {
  if (dispatching_) return 0;
  dispatching_ = true;
  std::size_t n = 0;
  while (!queue_.empty()) {
    auto [to, event] = std::move(queue_.front());
    queue_.pop_front();
    auto it = endpoints_.find(to);
    if (it == endpoints_.end()) {
      ++dropped_;
      continue;
    }
    // copy: the handler may deregister its own endpoint
    auto handler = it->second;
    handler(event);
    ++delivered_;
    ++n;
  }
  dispatching_ = false;
  return n;
}

}  // namespace oran::ric
