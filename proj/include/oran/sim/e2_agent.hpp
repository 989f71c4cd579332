#pragma once

#include <map>
#include <memory>

#include "oran/e2/pdu.hpp"
#include "oran/e2sm/kpm.hpp"
#include "oran/sim/ran_sim.hpp"
#include "oran/transport/transport.hpp"

namespace oran::sim {

/// RAN function ids every simulated node exposes.
inline constexpr std::uint32_t kKpmFunctionId = 0;
inline constexpr std::uint32_t kRcFunctionId = 1;

struct AgentStats {
  std::uint64_t indications_sent = 0;
  std::uint64_t inserts_sent = 0;
  std::uint64_t inserts_accepted = 0;
  std::uint64_t inserts_denied = 0;
  std::uint64_t inserts_timed_out = 0;
  std::uint64_t controls_acked = 0;
  std::uint64_t controls_failed = 0;
  std::uint64_t autonomous_handovers = 0;
};

/// E2 termination of one simulated node: setup, subscriptions, periodic
/// KPM reports, A3 inserts with wait timers, and RC control application.
class E2NodeAgent {
 public:
  E2NodeAgent(RanSim& sim, std::string node_id, std::unique_ptr<transport::Connection> conn);

  const std::string& node_id() const noexcept { return node_id_; }
  std::vector<e2::RanFunction> functions() const;

  /// Sends the E2 setup request.
  void start();
  bool setup_complete() const noexcept { return setup_complete_; }

  /// Handles every queued inbound message. Returns the number handled.
  std::size_t poll();

  /// A3 hit for a UE of this node. Raises an insert when an insert
  /// subscription exists, otherwise hands over autonomously.
  void on_a3(const A3Event& event);
  /// Fires due timers after a sim tick: insert deadlines, then reports.
  void on_tick();

  void send_service_update(e2::ServiceUpdate update);

  bool has_insert_subscription() const noexcept;
  std::size_t subscription_count() const noexcept { return reports_.size() + inserts_.size() + policies_.size(); }
  std::size_t pending_inserts() const noexcept { return pending_.size(); }
  const AgentStats& stats() const noexcept { return stats_; }
  /// Deterministic digest of the agent's protocol state.
  void hash_into(Fnv1a& h) const;

 private:
  struct ReportSub {
    e2::RicRequestId id;
    std::uint8_t action_id = 0;
    e2sm::KpmActionDefinition def;
    TimeMs period_ms = 0;
    TimeMs next_due = 0;
    TimeMs last_report = 0;
    std::uint32_t sequence = 0;
    std::map<e2sm::KpmScope, Counters> snapshot;
    std::uint64_t handovers = 0;
  };
  struct InsertSub {
    e2::RicRequestId id;
    std::uint8_t action_id = 0;
    TimeMs wait_ms = 0;
  };
  struct PendingInsert {
    e2::RicRequestId id;
    std::uint64_t ue_id = 0;
    std::uint32_t target_cell = 0;
    TimeMs deadline = 0;
  };

  void send(e2::PduBody body);
  void handle(const e2::E2apPdu& pdu);
  void on_subscription(const e2::SubscriptionRequest& req);
  void on_subscription_delete(const e2::SubscriptionDeleteRequest& req);
  void on_control(const e2::ControlRequest& req);
  void report(ReportSub& sub);
  void reinstall_policies();

  RanSim& sim_;
  std::string node_id_;
  std::unique_ptr<transport::Connection> conn_;
  bool setup_complete_ = false;
  std::map<std::uint32_t, bool> enabled_functions_;
  std::map<e2::RicRequestId, ReportSub> reports_;
  std::map<e2::RicRequestId, InsertSub> inserts_;
  std::map<e2::RicRequestId, std::vector<e2sm::RcControl>> policies_;
  std::map<Bytes, PendingInsert> pending_;
  std::uint64_t next_call_process_ = 1;
  AgentStats stats_;
};

}  // namespace oran::sim
