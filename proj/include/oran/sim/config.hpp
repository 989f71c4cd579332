#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oran/common/bytes.hpp"
#include "oran/common/slicing.hpp"
#include "oran/e2sm/rc.hpp"

namespace oran::sim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

struct SliceConfig {
  std::uint32_t slice_id = 0;
  SliceKind kind = SliceKind::embb;
  std::uint32_t dedicated_prb = 0;
  e2sm::SchedulerKind scheduler = e2sm::SchedulerKind::round_robin;
};

struct CellConfig {
  std::uint32_t cell_id = 0;
  std::uint64_t global_id = 0;
  std::uint32_t total_prb = 50;
  Vec2 position;
  double a3_offset_db = 3.0;
  std::vector<SliceConfig> slices;
};

struct NodeConfig {
  std::string node_id;
  std::vector<CellConfig> cells;
};

struct Waypoint {
  TimeMs at = 0;
  Vec2 position;
};

enum class TrafficKind { constant, periodic, poisson };

/// Traffic active from `from_ms` until the next segment starts.
struct TrafficSegment {
  TimeMs from_ms = 0;
  TrafficKind kind = TrafficKind::constant;
  double rate_bytes_per_ms = 0.0;  // constant and poisson
  std::uint64_t burst_bytes = 0;   // periodic
  TimeMs period_ms = 1;            // periodic
};

struct UeConfig {
  std::uint64_t ue_id = 0;
  std::uint32_t serving_cell = 0;
  std::uint32_t slice_id = 0;
  std::vector<Waypoint> path;  // piecewise linear; holds the last point afterwards
  std::vector<TrafficSegment> traffic;
};

enum class InsertTimeoutAction { execute, abort };

struct SimConfig {
  std::uint64_t seed = 1;
  TimeMs tick_ms = 1;
  std::uint32_t bytes_per_prb = 1000;
  std::uint32_t packet_bytes = 100;
  double p0_dbm = -40.0;
  double path_loss_exponent = 3.0;
  InsertTimeoutAction on_insert_timeout = InsertTimeoutAction::execute;
  TimeMs insert_backoff_ms = 1000;
  TimeMs pm_interval_ms = 1000;
  TimeMs heartbeat_period_ms = 1000;
  TimeMs warmup_ms = 1000;
  SlicingObjectives objectives;
  std::vector<NodeConfig> nodes;
  std::vector<UeConfig> ues;
};

}  // namespace oran::sim
