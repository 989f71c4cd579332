#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "oran/common/bytes.hpp"

namespace oran::e2sm {

/// KPM measurement container the metrics are drawn from.
enum class NodeKind : std::uint8_t { du = 0, cu_up = 1, cu_cp = 2 };
std::string_view to_string(NodeKind kind) noexcept;

/// Fixed metric catalog per container, in stable order. The three catalogs
/// are pairwise disjoint.
const std::vector<std::string>& metric_catalog(NodeKind kind);
bool in_catalog(NodeKind kind, std::string_view metric);

namespace metric {
inline constexpr std::string_view tx_bytes = "tx_bytes";
inline constexpr std::string_view tx_packets = "tx_packets";
inline constexpr std::string_view buffer_bytes = "buffer_bytes";
inline constexpr std::string_view latency_proxy_ms = "latency_proxy_ms";
inline constexpr std::string_view prb_granted = "prb_granted";
inline constexpr std::string_view prb_requested = "prb_requested";
inline constexpr std::string_view pdcp_tx_bytes = "pdcp_tx_bytes";
inline constexpr std::string_view pdcp_queue_bytes = "pdcp_queue_bytes";
inline constexpr std::string_view connected_ues = "connected_ues";
inline constexpr std::string_view handover_count = "handover_count";
}  // namespace metric

/// latency_proxy_ms value reported when a backlog exists but nothing was served.
inline constexpr double kLatencyClamp = 1e6;

struct KpmScope {
  enum class Kind : std::uint8_t { node = 0, cell = 1, slice = 2, ue = 3 };

  Kind kind = Kind::node;
  std::uint32_t cell_id = 0;
  std::uint32_t slice_id = 0;
  std::uint64_t ue_id = 0;

  static KpmScope node() { return {}; }
  static KpmScope cell(std::uint32_t cell) { return {Kind::cell, cell, 0, 0}; }
  static KpmScope slice(std::uint32_t cell, std::uint32_t slice) { return {Kind::slice, cell, slice, 0}; }
  static KpmScope ue(std::uint64_t ue) { return {Kind::ue, 0, 0, ue}; }

  auto operator<=>(const KpmScope&) const = default;
};

std::string to_string(const KpmScope& scope);

/// Period band enforced on report triggers; the near-RT band by default.
struct PeriodBand {
  std::uint32_t min_ms = 10;
  std::uint32_t max_ms = 1000;
};

struct KpmFunctionDefinition {
  std::vector<NodeKind> containers;
  bool operator==(const KpmFunctionDefinition&) const = default;
};

struct KpmEventTrigger {
  std::uint32_t report_period_ms = 100;
  bool operator==(const KpmEventTrigger&) const = default;
};

struct KpmActionDefinition {
  NodeKind node_kind = NodeKind::du;
  KpmScope scope;
  std::vector<std::string> metrics;
  bool operator==(const KpmActionDefinition&) const = default;
};

struct KpmRecord {
  std::string metric;
  KpmScope scope;
  TimeMs timestamp = 0;
  double value = 0.0;
  bool operator==(const KpmRecord&) const = default;
};

struct KpmIndicationHeader {
  std::string node_id;
  TimeMs collection_start = 0;
  bool operator==(const KpmIndicationHeader&) const = default;
};

struct KpmIndicationMessage {
  std::vector<KpmRecord> records;
  bool operator==(const KpmIndicationMessage&) const = default;
};

/// Header and records of one report, reassembled from the indication's
/// header and message payloads.
struct KpmIndication {
  KpmIndicationHeader header;
  std::vector<KpmRecord> records;
  bool operator==(const KpmIndication&) const = default;
};

/// Throws invariant_violation when the period is outside the band.
void validate(const KpmEventTrigger& trigger, PeriodBand band = {});

/// Throws invariant_violation for an empty metric list or a metric outside
/// the container's catalog.
void validate(const KpmActionDefinition& def);

/// Checks an indication against the action definition of its subscription:
/// timestamps non-decreasing and every metric requested.
void validate_against(const KpmIndication& ind, const KpmActionDefinition& def);

}  // namespace oran::e2sm
