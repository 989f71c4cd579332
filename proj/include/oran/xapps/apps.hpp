#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "oran/a1/a1.hpp"
#include "oran/ric/ric.hpp"
#include "oran/xapps/slicing.hpp"

namespace oran::xapps {

namespace topic {
inline constexpr const char* forecast = "A";
inline constexpr const char* kpm = "B";
inline constexpr const char* slicing = "C";
inline constexpr const char* scheduling = "D";
inline constexpr const char* policies = "policies";
}  // namespace topic

/// Subscribes `metrics` on every connected node with a KPM function that
/// has no subscription yet. Returns the nodes newly subscribed.
std::vector<std::string> subscribe_kpm_everywhere(ric::XappContext& ctx, std::set<std::string>& done,
                                                  std::uint32_t period_ms, const std::vector<std::string>& metrics);

/// Decodes a KPM report indication; nullopt for inserts or foreign payloads.
std::optional<e2sm::KpmIndication> decode_kpm(const e2::Indication& ind);

// --- kpm-monitor -------------------------------------------------------

/// Collects every DU metric, keeps a rolling window per (node, scope,
/// metric) in its SDL namespace, republishes the latest values as topic B
/// and appends CSV rows on every tick.
class KpmMonitor : public ric::Xapp {
 public:
  explicit KpmMonitor(const ric::XappDescriptor& d);

  void on_start(ric::XappContext& ctx) override;
  void on_tick(ric::XappContext& ctx) override;
  void on_indication(ric::XappContext& ctx, const ric::IndicationEvent& e) override;

  /// Moves buffered rows into the CSV text.
  void flush();
  /// Header plus every flushed row.
  const std::string& csv() const noexcept { return csv_; }
  std::size_t stored_records() const;

  static std::string key(const std::string& node, const e2sm::KpmScope& scope, const std::string& metric);

 private:
  std::uint32_t period_ms_;
  TimeMs window_ms_;
  std::set<std::string> subscribed_;
  std::map<std::string, std::deque<std::pair<TimeMs, double>>> window_;
  std::vector<std::string> pending_rows_;
  std::string csv_;
};

// --- slicing-control ---------------------------------------------------

struct SlicingStatus {
  std::string model_id = "baseline";
  SlicingObjectives objectives;
  std::map<std::uint32_t, std::uint32_t> floor_prb;  // slice id -> reserved PRBs from resource statements
  std::map<std::uint32_t, std::uint32_t> cap_prb;
  std::set<std::string> policies;
  std::map<std::pair<std::string, std::uint32_t>, SlicingDecision> applied;  // (node, cell)
  std::uint64_t ticks = 0;
  std::uint64_t submitted = 0;
  std::uint64_t rejected = 0;
};

/// Applies statements of a slice-scoped policy to the objectives. Returns
/// false when the policy carries nothing this xApp enforces.
bool apply_policy(const a1::Policy& policy, std::uint32_t capacity, SlicingStatus& status);

class SlicingControl : public ric::Xapp {
 public:
  explicit SlicingControl(const ric::XappDescriptor& d);

  void on_start(ric::XappContext& ctx) override;
  void on_tick(ric::XappContext& ctx) override;
  void on_indication(ric::XappContext& ctx, const ric::IndicationEvent& e) override;
  void on_control_outcome(ric::XappContext& ctx, const ric::ControlOutcome& o) override;
  void on_data(ric::XappContext& ctx, const ric::SdlChange& c) override;

  const SlicingStatus& status() const noexcept { return status_; }
  const std::optional<PolicyModel>& model() const noexcept { return model_; }
  /// Validation runs drive the loop with a candidate that is not published
  /// yet. The deploy path never calls this.
  void use_candidate_model(PolicyModel m) {
    status_.model_id = m.model_id;
    model_ = std::move(m);
  }
  /// Demand of one cell after forecast blending and policy floors.
  PrbVector demand(ric::XappContext& ctx, const std::string& node, std::uint32_t cell) const;

 private:
  void recompute_objectives(ric::XappContext& ctx);

  std::uint32_t capacity_;
  std::set<std::string> subscribed_;
  std::map<std::pair<std::string, std::uint32_t>, std::uint32_t> slices_;  // (node, cell) -> slice count
  std::optional<PolicyModel> model_;
  std::map<std::string, a1::Policy> policies_;
  std::map<ric::ControlTicket, std::pair<std::pair<std::string, std::uint32_t>, SlicingDecision>> inflight_;
  SlicingStatus status_;
};

// --- scheduling-control ------------------------------------------------

/// Highest-buffer-first where the expected load exceeds `threshold` of the
/// slice quota, round-robin elsewhere.
std::vector<e2sm::SchedulerKind> decide_policy(const std::vector<double>& load, const PrbVector& quota,
                                               double threshold = 0.8);

/// Chains forecast A, KPM B and slicing profile C into scheduling profile D
/// and installs it as node-local control policies.
class SchedulingControl : public ric::Xapp {
 public:
  explicit SchedulingControl(const ric::XappDescriptor& d);

  void on_tick(ric::XappContext& ctx) override;
  void on_control_outcome(ric::XappContext& ctx, const ric::ControlOutcome& o) override;

  struct Record {
    TimeMs epoch = 0;
    TimeMs c_epoch = 0;
  };
  const std::vector<Record>& history() const noexcept { return history_; }
  std::uint64_t deferred() const noexcept { return deferred_; }

 private:
  double threshold_;
  std::map<std::pair<std::string, std::uint32_t>, std::vector<e2sm::SchedulerKind>> installed_;
  std::map<ric::ControlTicket, std::pair<std::pair<std::string, std::uint32_t>, std::vector<e2sm::SchedulerKind>>>
      inflight_;
  std::vector<Record> history_;
  std::uint64_t deferred_ = 0;
};

// --- handover-control --------------------------------------------------

/// Answers handover inserts: accept towards the candidate when its RSRP
/// gain reaches min_gain_db, deny otherwise.
class HandoverControl : public ric::Xapp {
 public:
  explicit HandoverControl(const ric::XappDescriptor& d);

  void on_start(ric::XappContext& ctx) override;
  void on_tick(ric::XappContext& ctx) override;
  void on_insert(ric::XappContext& ctx, const ric::InsertEvent& e) override;

  std::uint64_t accepted() const noexcept { return accepted_; }
  std::uint64_t denied() const noexcept { return denied_; }

 private:
  void subscribe(ric::XappContext& ctx);

  double min_gain_db_;
  e2::TimeToWait ttw_;
  std::set<std::string> subscribed_;
  std::uint64_t accepted_ = 0;
  std::uint64_t denied_ = 0;
};

/// Descriptors of the reference xApps.
ric::XappDescriptor kpm_monitor_descriptor();
ric::XappDescriptor slicing_control_descriptor();
ric::XappDescriptor scheduling_control_descriptor();
ric::XappDescriptor handover_control_descriptor();

/// Registers factories for kpm-monitor, slicing-control,
/// scheduling-control and handover-control.
void register_reference_xapps(ric::NearRtRic& ric);

}  // namespace oran::xapps
