#pragma once

#include <deque>
#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "oran/ric/xapp.hpp"

namespace oran::ric {

struct TickEvent {
  TimeMs at = 0;
};

using XappEvent = std::variant<SubscriptionEvent, IndicationEvent, InsertEvent, ControlOutcome, SdlChange, TickEvent>;

/// Internal messaging: named endpoints with a single FIFO, so deliveries
/// follow posting order across all endpoints and each endpoint's handler
/// never runs re-entrantly.
class Router {
 public:
  using Handler = std::function<void(const XappEvent&)>;

  /// Throws duplicate_name.
  void register_endpoint(const std::string& name, Handler handler);
  void remove_endpoint(const std::string& name);
  bool has_endpoint(const std::string& name) const { return endpoints_.count(name) > 0; }
  std::vector<std::string> endpoints() const;

  void post(const std::string& to, XappEvent event);
  /// Delivers until the queue is empty. Returns the number delivered.
  std::size_t dispatch();
  bool idle() const noexcept { return queue_.empty(); }

  std::uint64_t delivered() const noexcept { return delivered_; }
  std::uint64_t dropped() const noexcept { return dropped_; }

 private:
  std::map<std::string, Handler> endpoints_;
  std::deque<std::pair<std::string, XappEvent>> queue_;
  bool dispatching_ = false;
  std::uint64_t delivered_ = 0;
  std::uint64_t dropped_ = 0;
};

}  // namespace oran::ric
