#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oran/e2sm/kpm.hpp"
#include "oran/e2sm/rc.hpp"
#include "oran/sim/channel.hpp"
#include "oran/sim/config.hpp"

namespace oran::sim {

/// Cumulative counters. Reports and PM files difference two snapshots.
struct Counters {
  std::uint64_t arrived_bytes = 0;
  std::uint64_t served_bytes = 0;
  std::uint64_t prb_granted = 0;    // summed over ticks
  std::uint64_t prb_requested = 0;  // summed over ticks
  std::uint64_t ticks = 0;

  Counters& operator+=(const Counters& o);
  Counters operator-(const Counters& o) const;
};

struct SliceState {
  SliceConfig config;
  Counters counters;
  std::uint32_t last_requested = 0;  // this tick, before scheduling
  std::uint32_t last_granted = 0;
  std::uint64_t tick_arrived = 0;
  std::size_t rr_offset = 0;

  // trailing objective window, one entry per tick
  struct TickSample {
    std::uint64_t arrived = 0;
    std::uint64_t served = 0;
    std::uint64_t packets = 0;
  };
  std::deque<TickSample> window;
  std::uint64_t violation_ticks = 0;
  std::uint64_t scored_ticks = 0;
};

struct CellState {
  CellConfig config;
  std::vector<SliceState> slices;
  double a3_offset_db = 3.0;

  SliceState* slice(std::uint32_t slice_id);
  const SliceState* slice(std::uint32_t slice_id) const;
};

struct UeState {
  UeConfig config;
  std::uint32_t serving_cell = 0;
  std::uint64_t buffer = 0;
  Vec2 position;
  Counters counters;
  bool frozen = false;  // autonomous handover suspended by an insert
  TimeMs a3_blocked_until = 0;
  std::optional<std::uint32_t> pending_target;
};

/// A3 predicate hit for one UE at the current tick.
struct A3Event {
  std::uint64_t ue_id = 0;
  std::string node_id;
  std::uint32_t serving_cell = 0;
  std::uint32_t target_cell = 0;
  double serving_rsrp_dbm = 0.0;
  double target_rsrp_dbm = 0.0;
};

/// Per-cell allocation trace of one tick, kept when tracing is enabled.
struct TickTrace {
  TimeMs time = 0;
  std::uint32_t cell_id = 0;
  std::vector<std::uint32_t> requested;
  std::vector<std::uint32_t> dedicated;
};

struct ObjectiveStats {
  std::uint64_t scored_ticks = 0;
  std::uint64_t violation_ticks = 0;  // ticks where any slice of the cell missed its objective
  double cost_sum = 0.0;              // weighted PRB shortfall, summed over scored ticks
};

/// Deterministic discrete-time RAN. Single threaded; every timestamp comes
/// from now().
class RanSim {
 public:
  explicit RanSim(SimConfig config);

  const SimConfig& config() const noexcept { return config_; }
  TimeMs now() const noexcept { return now_; }

  /// Advances one TTI: pending handovers, mobility, arrivals, node-local
  /// policies, per-slice scheduling, objective scoring, A3 evaluation.
  /// Returns the UEs whose A3 predicate holds and whose autonomous handover
  /// is not suspended; the caller either raises an insert or calls
  /// schedule_handover.
  std::vector<A3Event> tick();

  // --- controls -------------------------------------------------------
  /// Applies all controls of one message atomically on behalf of node_id;
  /// returns how many were applied. Throws infeasible_quota, unknown_target
  /// or unsupported_domain and leaves the state untouched.
  std::uint32_t apply_controls(const std::string& node_id, const std::vector<e2sm::RcControl>& controls);
  /// Installs node-local policies (from a policy action or a ControlPolicy).
  void install_policy(const std::string& node_id, const e2sm::ControlPolicy& policy);
  void remove_policies(const std::string& node_id);

  void schedule_handover(std::uint64_t ue_id, std::uint32_t target_cell);
  void freeze(std::uint64_t ue_id);
  /// Ends a suspension. With a backoff the A3 check stays quiet for that long.
  void release(std::uint64_t ue_id, TimeMs backoff_ms);

  // --- queries --------------------------------------------------------
  const std::vector<NodeConfig>& nodes() const noexcept { return config_.nodes; }
  const std::vector<CellState>& cells() const noexcept { return cells_; }
  const CellState& cell(std::uint32_t cell_id) const;
  const CellState* find_cell_by_global_id(std::uint64_t global_id) const;
  const std::string& node_of_cell(std::uint32_t cell_id) const;
  const std::vector<UeState>& ues() const noexcept { return ues_; }
  const UeState& ue(std::uint64_t ue_id) const;
  std::uint64_t handover_count(const std::string& node_id) const;
  std::uint32_t connected_ues(std::uint32_t cell_id, std::optional<std::uint32_t> slice_id) const;
  std::uint64_t slice_buffer(std::uint32_t cell_id, std::uint32_t slice_id) const;
  std::uint64_t total_arrived() const;
  std::uint64_t total_served() const;
  std::uint64_t total_buffered() const;

  /// Cumulative counters and current buffer for a KPM scope, expanded to
  /// the per-slice (or per-UE) rows a report carries.
  struct Row {
    e2sm::KpmScope scope;
    Counters counters;
    std::uint64_t buffer = 0;
    std::uint32_t connected_ues = 0;
  };
  std::vector<Row> rows(const std::string& node_id, const e2sm::KpmScope& scope) const;

  const ObjectiveStats& objective_stats(std::uint32_t cell_id) const;
  /// Objective hit rate per slice id over all cells, after warmup.
  std::map<std::uint32_t, double> satisfaction() const;

  void enable_trace(bool on) { trace_on_ = on; }
  const std::vector<TickTrace>& trace() const noexcept { return trace_; }

  /// FNV-1a over the complete simulation state.
  std::uint64_t state_hash() const;

 private:
  CellState& cell_mut(std::uint32_t cell_id);
  UeState& ue_mut(std::uint64_t ue_id);
  void schedule_slice(CellState& cell, SliceState& slice);
  void run_policies();
  void score(CellState& cell, std::size_t cell_index);
  std::vector<A3Event> check_a3();

  SimConfig config_;
  TimeMs now_ = 0;
  std::vector<CellState> cells_;
  std::vector<UeState> ues_;
  std::vector<TrafficSource> traffic_;
  std::map<std::uint32_t, std::size_t> cell_index_;
  std::map<std::uint64_t, std::size_t> ue_index_;
  std::map<std::uint32_t, std::string> cell_node_;
  std::map<std::string, std::uint64_t> handovers_;
  std::map<std::string, std::map<e2sm::ControlTarget, e2sm::ControlPolicy>> policies_;
  std::vector<ObjectiveStats> stats_;
  std::vector<double> weights_;
  bool trace_on_ = false;
  std::vector<TickTrace> trace_;
};

}  // namespace oran::sim
