#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "oran/e2/pdu.hpp"
#include "oran/e2sm/rc.hpp"
#include "oran/ric/descriptor.hpp"
#include "oran/ric/sdl.hpp"

namespace oran::ric {

using SubscriptionHandle = std::uint64_t;
using ControlTicket = std::uint64_t;

struct RnibCell {
  std::uint32_t cell_id = 0;
  std::uint64_t global_id = 0;
};

struct RnibEntry {
  std::string node_id;
  std::string node_kind;
  std::vector<e2::RanFunction> functions;
  std::vector<RnibCell> cells;
  bool connected = false;
  TimeMs last_seen = 0;
};

struct UeContext {
  std::string node_id;
  std::uint32_t serving_cell = 0;
  std::uint32_t slice_id = 0;
};

struct UeNibEntry {
  std::uint64_t ue_id = 0;
  std::vector<UeContext> contexts;  // one per node that reported the UE
};

struct IndicationEvent {
  SubscriptionHandle handle = 0;
  std::string node_id;
  e2::Indication indication;
};

struct InsertEvent {
  SubscriptionHandle handle = 0;
  std::string node_id;
  Bytes call_process_id;
  e2sm::HandoverInsert insert;
  TimeMs deadline = 0;
};

struct ControlOutcome {
  enum class Kind { acknowledged, denied, timeout, conflict_rejected };
  ControlTicket ticket = 0;
  Kind kind = Kind::acknowledged;
  std::string node_id;
  e2::Cause cause;         // denied
  std::string holder;      // conflict_rejected
  Bytes outcome;           // acknowledged: RcControlOutcome bytes
};
std::string_view to_string(ControlOutcome::Kind kind) noexcept;

struct SubscriptionEvent {
  enum class Kind { active, failed, ended };
  SubscriptionHandle handle = 0;
  Kind kind = Kind::active;
  e2::Cause cause;
};

/// Platform services an xApp may use. All calls are made from inside the
/// xApp's own callbacks; the framework never runs two callbacks of one xApp
/// at the same time.
class XappContext {
 public:
  virtual ~XappContext() = default;

  virtual TimeMs now() const = 0;
  virtual const XappDescriptor& descriptor() const = 0;

  /// Throws unknown_node or unknown_function. The result arrives as a
  /// SubscriptionEvent.
  virtual SubscriptionHandle subscribe(const std::string& node_id, std::uint32_t function_id, Bytes trigger,
                                       std::vector<e2::RicAction> actions) = 0;
  virtual void unsubscribe(SubscriptionHandle handle) = 0;

  /// Throws unsupported_domain (capability not declared) or unknown_node.
  /// The outcome arrives as a ControlOutcome.
  virtual ControlTicket submit_control(const std::string& node_id, std::vector<e2sm::RcControl> controls,
                                       std::optional<Bytes> in_reply_to = std::nullopt) = 0;

  virtual std::optional<std::string> sdl_get(const std::string& ns, const std::string& key) const = 0;
  virtual std::vector<std::string> sdl_keys(const std::string& ns) const = 0;
  /// Writes into the xApp's own namespace.
  virtual void sdl_put(const std::string& key, std::string value) = 0;
  virtual void sdl_erase(const std::string& key) = 0;
  /// Changes are delivered through Xapp::on_data.
  virtual void watch(const std::string& ns, const std::string& prefix = "") = 0;

  /// Throws undeclared_topic unless the topic is in produced_data.
  virtual void publish(const std::string& topic, std::string value) = 0;
  /// Reports whether an A1 policy is being applied.
  virtual void ack_policy(const std::string& policy_id, bool enforced) = 0;

  virtual std::vector<RnibEntry> nodes() const = 0;
  virtual void log(const std::string& line) = 0;
};

class Xapp {
 public:
  virtual ~Xapp() = default;

  virtual void on_start(XappContext&) {}
  virtual void on_stop(XappContext&) {}
  /// Every loop_period_ms of the descriptor.
  virtual void on_tick(XappContext&) {}
  virtual void on_subscription(XappContext&, const SubscriptionEvent&) {}
  virtual void on_indication(XappContext&, const IndicationEvent&) {}
  virtual void on_insert(XappContext&, const InsertEvent&) {}
  virtual void on_control_outcome(XappContext&, const ControlOutcome&) {}
  virtual void on_data(XappContext&, const SdlChange&) {}
};

using XappFactory = std::function<std::unique_ptr<Xapp>(const XappDescriptor&)>;

}  // namespace oran::ric
