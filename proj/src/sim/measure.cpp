#include "oran/sim/measure.hpp"

#include <algorithm>

namespace oran::sim {

double metric_value(std::string_view metric, const RanSim::Row& row, const Counters& delta,
                    std::uint64_t handovers, std::uint32_t packet_bytes, TimeMs window_ms) {
  using namespace e2sm::metric;
  const auto ticks = static_cast<double>(std::max<std::uint64_t>(delta.ticks, 1));
  const auto span = static_cast<double>(std::max<TimeMs>(window_ms, 1));
  if (metric == tx_bytes || metric == pdcp_tx_bytes) return static_cast<double>(delta.served_bytes);
  if (metric == tx_packets) {
    // whole packets completed in the window, so packet fragments carry over
    const auto before = row.counters.served_bytes - delta.served_bytes;
    return static_cast<double>(row.counters.served_bytes / packet_bytes - before / packet_bytes);
  }
  if (metric == buffer_bytes || metric == pdcp_queue_bytes) return static_cast<double>(row.buffer);
  if (metric == latency_proxy_ms) {
    if (row.buffer == 0) return 0.0;
    if (delta.served_bytes == 0) return e2sm::kLatencyClamp;
    return static_cast<double>(row.buffer) / (static_cast<double>(delta.served_bytes) / span);
  }
  if (metric == prb_granted) return static_cast<double>(delta.prb_granted) / ticks;
  if (metric == prb_requested) return static_cast<double>(delta.prb_requested) / ticks;
  if (metric == connected_ues) return row.connected_ues;
  if (metric == handover_count) return static_cast<double>(handovers);
  return 0.0;
}

}  // namespace oran::sim
