#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oran/harness/scenario.hpp"
#include "oran/sim/ran_sim.hpp"
#include "oran/xapps/slicing.hpp"

namespace oran::harness {

struct CellReport {
  std::uint32_t cell_id = 0;
  std::uint64_t scored_ticks = 0;
  std::uint64_t violation_ticks = 0;
  double cost_sum = 0.0;         // weighted shortfall of the applied quotas
  double oracle_cost_sum = 0.0;  // same ticks, best possible split
  bool operator==(const CellReport&) const = default;
};

/// Everything the RAN side reports back; identical between modes.
struct RanSummary {
  std::uint64_t state_hash = 0;
  TimeMs now = 0;
  std::map<std::uint32_t, double> satisfaction;
  std::vector<CellReport> cells;
  std::uint64_t indications = 0;
  std::uint64_t inserts = 0;
  std::uint64_t inserts_accepted = 0;
  std::uint64_t inserts_denied = 0;
  std::uint64_t inserts_timed_out = 0;
  std::uint64_t inserts_pending = 0;
  std::uint64_t controls_acked = 0;
  std::uint64_t controls_failed = 0;
  std::uint64_t bytes_arrived = 0;
  std::uint64_t bytes_served = 0;
  std::uint64_t bytes_buffered = 0;

  nlohmann::json to_json() const;
  static RanSummary from_json(const nlohmann::json& j);
  bool operator==(const RanSummary&) const = default;
};

struct RunReport {
  std::string scenario;
  std::uint64_t seed = 0;
  TimeMs duration_ms = 0;
  std::string mode;  // in-process or tcp
  RanSummary ran;
  std::map<std::string, std::uint64_t> ric_metrics;
  std::uint64_t ric_state_hash = 0;
  std::string state_hash;  // hex over RAN and RIC hashes
  std::string model_id;    // what slicing-control ran with, if deployed
  std::uint64_t pm_files = 0;
  std::uint64_t a1_feedback = 0;
  std::vector<std::string> a1_errors;
  std::vector<std::string> csv_paths;

  std::uint64_t metric(const std::string& name) const;
  /// Sum rules between independently counted totals. Returns the broken
  /// rules, empty when consistent.
  std::vector<std::string> consistency_errors() const;
  /// Key order and number formatting are fixed.
  nlohmann::json to_json() const;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  bool tcp = false;
  std::string capture_path;  // empty: no capture
  std::string out_dir;       // empty: nothing written
  std::string catalog_dir = "catalog";
  /// Validation only: slicing-control runs this model instead of its
  /// configured one.
  std::optional<xapps::PolicyModel> candidate_model;
  /// Called after every tick with the simulator; in-process mode only.
  std::function<void(const sim::RanSim&)> observer;
};

/// Runs the scenario to its duration under the deterministic pump.
RunReport run(const Scenario& scenario, const RunOptions& options = {});

}  // namespace oran::harness
