#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "oran/a1/a1.hpp"
#include "oran/e2/pdu.hpp"
#include "oran/ric/router.hpp"
#include "oran/ric/sdl.hpp"
#include "oran/ric/verifier.hpp"
#include "oran/ric/xapp.hpp"
#include "oran/transport/transport.hpp"

namespace oran::ric {

struct RicConfig {
  TimeMs conflict_window_ms = 1000;
  TimeMs control_timeout_ms = 1000;
  VerifyParams verify;
  TimeMs kpm_retention_ms = 10000;
};

/// Key of a ControlLock: the parameter one control writes on one node.
struct LockKey {
  std::string node_id;
  e2sm::ControlTarget target;
  auto operator<=>(const LockKey&) const = default;
};

struct ControlLock {
  std::string holder;
  TimeMs expiry = 0;
};

struct InsertStats {
  std::uint64_t received = 0;
  std::uint64_t accepted = 0;
  std::uint64_t denied = 0;
  std::uint64_t timed_out = 0;
  std::uint64_t undeliverable = 0;
};

/// The near-RT RIC platform. Single threaded and driven by the caller:
/// poll() handles inbound traffic, advance_to() moves simulated time and
/// fires timers. Both dispatch queued xApp events before returning.
class NearRtRic {
 public:
  explicit NearRtRic(RicConfig config = {});
  ~NearRtRic();
  NearRtRic(const NearRtRic&) = delete;
  NearRtRic& operator=(const NearRtRic&) = delete;

  TimeMs now() const noexcept { return now_; }
  /// Moves the clock (never backwards) and fires due timers.
  void advance_to(TimeMs t);

  // --- terminations ---------------------------------------------------
  void attach_e2(std::unique_ptr<transport::Connection> conn);
  void attach_a1(std::unique_ptr<transport::Connection> conn);
  /// Handles every queued inbound message. Returns the number handled.
  std::size_t poll();

  // --- xApp management ------------------------------------------------
  void register_factory(const std::string& name, XappFactory factory);
  /// Throws duplicate_name for a repeated name+version.
  void onboard(XappDescriptor descriptor);
  /// Deploys the newest onboarded version. `overrides` replace descriptor
  /// fields (model_path, loop_period_ms, priority) or params.
  /// Throws not_onboarded or duplicate_name (already deployed).
  void deploy(const std::string& name, const std::map<std::string, std::string>& overrides = {});
  void terminate(const std::string& name);
  bool is_deployed(const std::string& name) const;
  std::vector<std::string> deployed() const;
  Xapp* xapp(const std::string& name);

  // --- platform API (also reached through XappContext) ----------------
  SubscriptionHandle subscribe(const std::string& xapp, const std::string& node_id, std::uint32_t function_id,
                               Bytes trigger, std::vector<e2::RicAction> actions);
  void unsubscribe(const std::string& xapp, SubscriptionHandle handle);
  ControlTicket submit_control(const std::string& xapp, const std::string& node_id,
                               std::vector<e2sm::RcControl> controls, std::optional<Bytes> in_reply_to);
  /// Throws undeclared_topic.
  void publish(const std::string& producer, const std::string& topic, std::string value);
  /// Declares a topic produced by a platform component (such as A1 EI).
  void declare_topic(const std::string& producer, const std::string& topic);
  void ack_policy(const std::string& xapp, const std::string& policy_id, bool enforced);

  // --- inspection -----------------------------------------------------
  Sdl& sdl() noexcept { return sdl_; }
  const Sdl& sdl() const noexcept { return sdl_; }
  Router& router() noexcept { return router_; }
  std::vector<RnibEntry> rnib() const;
  std::optional<RnibEntry> rnib(const std::string& node_id) const;
  std::optional<UeNibEntry> uenib(std::uint64_t ue_id) const;
  std::size_t wire_subscription_count() const;
  std::size_t subscriber_count(SubscriptionHandle handle) const;
  std::size_t pending_inserts() const noexcept { return inserts_.size(); }
  const InsertStats& insert_stats() const noexcept { return insert_stats_; }
  const std::map<LockKey, ControlLock>& locks() const noexcept { return locks_; }
  const std::vector<VerificationRecord>& verifications() const noexcept { return verifications_; }
  const KpmHistory& kpm_history() const noexcept { return kpm_; }
  const std::map<std::string, std::uint64_t>& metrics() const noexcept { return metrics_; }
  /// metric,value lines, sorted by name.
  std::string metrics_csv() const;
  const std::vector<std::string>& log() const noexcept { return log_; }
  /// Digest of subscriptions, locks, inserts, NIBs and counters.
  std::uint64_t state_hash() const;

 private:
  class Host;
  struct E2Conn {
    std::unique_ptr<transport::Connection> conn;
    std::string node_id;  // empty until setup
  };
  struct SubRecord {
    enum class State { pending, active, deleting };
    std::uint64_t id = 0;
    std::string key;
    std::string node_id;
    std::uint32_t function_id = 0;
    std::vector<e2::RicAction> actions;
    std::vector<std::pair<std::string, SubscriptionHandle>> subscribers;  // registration order
    e2::RicRequestId wire;
    State state = State::pending;
  };
  struct PendingControl {
    ControlTicket ticket = 0;
    std::string xapp;
    std::string node_id;
    std::vector<e2sm::RcControl> controls;
    std::optional<Bytes> in_reply_to;
  };
  struct InflightControl {
    ControlTicket ticket = 0;
    std::string xapp;
    std::string node_id;
    std::vector<e2sm::RcControl> controls;
    TimeMs sent_at = 0;
  };
  struct InsertPending {
    std::string node_id;
    std::string xapp;
    std::uint64_t ue_id = 0;
    TimeMs deadline = 0;
  };
  struct VerifyJob {
    ControlTicket ticket = 0;
    std::string xapp;
    std::string node_id;
    e2sm::KpmScope scope;
    TimeMs at = 0;
  };

  void bump(const std::string& metric, std::uint64_t n = 1) { metrics_[metric] += n; }
  void note(const std::string& line);
  void settle();
  void send(E2Conn& conn, e2::PduBody body);
  E2Conn* conn_of(const std::string& node_id);

  void handle_e2(E2Conn& conn, const e2::E2apPdu& pdu);
  void on_setup(E2Conn& conn, const e2::SetupRequest& req);
  void on_service_update(E2Conn& conn, const e2::ServiceUpdate& upd);
  void on_subscription_response(const e2::SubscriptionResponse& resp);
  void on_subscription_failure(const e2::SubscriptionFailure& fail);
  void on_subscription_delete_response(const e2::SubscriptionDeleteResponse& resp);
  void on_indication(E2Conn& conn, const e2::Indication& ind);
  void on_control_response(const e2::RicRequestId& id, ControlOutcome outcome);
  void end_subscriptions(const std::string& node_id, const std::set<std::uint32_t>* functions, const std::string& why);
  void drop_subscriber(std::uint64_t record_id, SubscriptionHandle handle, bool notify_wire);
  void sync_rnib(const std::string& node_id);
  void sync_uenib(std::uint64_t ue_id);

  void handle_a1(const a1::Message& msg);
  void send_a1(const a1::Message& msg);

  void resolve_controls();
  void fire_timers();

  RicConfig config_;
  TimeMs now_ = 0;
  Sdl sdl_;
  Router router_;
  KpmHistory kpm_;

  std::vector<std::unique_ptr<E2Conn>> e2_;
  std::unique_ptr<transport::Connection> a1_;
  std::map<std::string, RnibEntry> rnib_;
  std::map<std::uint64_t, UeNibEntry> uenib_;

  std::map<std::string, XappFactory> factories_;
  std::map<std::string, std::vector<XappDescriptor>> onboarded_;
  std::vector<std::unique_ptr<Host>> hosts_;  // deployment order

  std::map<std::uint64_t, std::unique_ptr<SubRecord>> records_;
  std::map<std::string, std::uint64_t> record_by_key_;
  std::set<std::string> keys_seen_;
  std::map<e2::RicRequestId, std::uint64_t> record_by_wire_;
  std::map<SubscriptionHandle, std::uint64_t> record_by_handle_;
  std::uint64_t next_record_ = 1;
  SubscriptionHandle next_handle_ = 1;
  std::uint32_t next_instance_ = 1;

  std::vector<PendingControl> batch_;
  std::map<std::uint32_t, InflightControl> inflight_;  // by wire instance
  std::map<LockKey, ControlLock> locks_;
  ControlTicket next_ticket_ = 1;

  std::map<Bytes, InsertPending> inserts_;
  InsertStats insert_stats_;

  std::vector<VerifyJob> verify_jobs_;
  std::vector<VerificationRecord> verifications_;

  std::map<std::string, std::set<std::string>> topic_producers_;
  std::map<std::string, std::optional<bool>> policy_state_;  // last enforced feedback per policy

  std::map<std::string, std::uint64_t> metrics_;
  std::vector<std::string> log_;
};

}  // namespace oran::ric
