#include "oran/e2sm/kpm.hpp"

#include <algorithm>

#include "oran/common/error.hpp"

namespace oran::e2sm {

std::string_view to_string(NodeKind kind) noexcept {
  switch (kind) {
    case NodeKind::du: return "du";
    case NodeKind::cu_up: return "cu_up";
    case NodeKind::cu_cp: return "cu_cp";
  }
  return "?";
}

const std::vector<std::string>& metric_catalog(NodeKind kind) {
  static const std::vector<std::string> kDu = {
      std::string(metric::tx_bytes),         std::string(metric::tx_packets),  std::string(metric::buffer_bytes),
      std::string(metric::latency_proxy_ms), std::string(metric::prb_granted), std::string(metric::prb_requested)};
  static const std::vector<std::string> kCuUp = {std::string(metric::pdcp_tx_bytes),
                                                 std::string(metric::pdcp_queue_bytes)};
  static const std::vector<std::string> kCuCp = {std::string(metric::connected_ues),
                                                 std::string(metric::handover_count)};
  switch (kind) {
    case NodeKind::du: return kDu;
    case NodeKind::cu_up: return kCuUp;
    case NodeKind::cu_cp: return kCuCp;
  }
  return kDu;
}

bool in_catalog(NodeKind kind, std::string_view metric) {
  const auto& cat = metric_catalog(kind);
  return std::find(cat.begin(), cat.end(), metric) != cat.end();
}

std::string to_string(const KpmScope& scope) {
  switch (scope.kind) {
    case KpmScope::Kind::node: return "node";
    case KpmScope::Kind::cell: return "cell/" + std::to_string(scope.cell_id);
    case KpmScope::Kind::slice:
      return "slice/" + std::to_string(scope.cell_id) + "/" + std::to_string(scope.slice_id);
    case KpmScope::Kind::ue: return "ue/" + std::to_string(scope.ue_id);
  }
  return "?";
}

void validate(const KpmEventTrigger& trigger, PeriodBand band) {
  if (trigger.report_period_ms < band.min_ms || trigger.report_period_ms > band.max_ms) {
    fail(Errc::invariant_violation, "report period " + std::to_string(trigger.report_period_ms) +
                                        " ms outside [" + std::to_string(band.min_ms) + ", " +
                                        std::to_string(band.max_ms) + "]");
  }
}

void validate(const KpmActionDefinition& def) {
  if (def.metrics.empty()) fail(Errc::invariant_violation, "KPM action definition without metrics");
  for (const auto& m : def.metrics) {
    if (!in_catalog(def.node_kind, m)) {
      fail(Errc::invariant_violation,
           "metric '" + m + "' not in the " + std::string(to_string(def.node_kind)) + " catalog");
    }
  }
}

void validate_against(const KpmIndication& ind, const KpmActionDefinition& def) {
  TimeMs last = ind.header.collection_start;
  for (const auto& r : ind.records) {
    if (r.timestamp < last) fail(Errc::invariant_violation, "KPM record timestamps decrease");
    last = r.timestamp;
    if (std::find(def.metrics.begin(), def.metrics.end(), r.metric) == def.metrics.end()) {
      fail(Errc::invariant_violation, "KPM record for unrequested metric '" + r.metric + "'");
    }
  }
}

}  // namespace oran::e2sm
