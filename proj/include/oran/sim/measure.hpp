#pragma once

#include <string_view>

#include "oran/sim/ran_sim.hpp"

namespace oran::sim {

/// Value of one catalog metric for a report row. `delta` covers the
/// reporting window of `window_ms`; `handovers` is the node's handover delta.
/// Unknown metrics yield 0.
double metric_value(std::string_view metric, const RanSim::Row& row, const Counters& delta,
                    std::uint64_t handovers, std::uint32_t packet_bytes, TimeMs window_ms);

}  // namespace oran::sim
