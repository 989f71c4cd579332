#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "oran/common/bytes.hpp"

namespace oran {

enum class SliceKind : std::uint8_t { urllc = 0, embb = 1, mmtc = 2 };
inline constexpr int kSliceKinds = 3;
std::string_view to_string(SliceKind kind) noexcept;
bool parse_slice_kind(std::string_view text, SliceKind& out) noexcept;

/// Per-slice service objectives. Slice ids index the vectors below; the
/// bundled topologies use id 0 = urllc, 1 = embb, 2 = mmtc.
struct SlicingObjectives {
  double urllc_max_latency_ms = 10.0;
  double embb_min_bytes_per_s = 10e6;
  double mmtc_min_packets = 50.0;  // per window
  TimeMs window_ms = 100;
  std::vector<std::uint32_t> priority = {0, 1, 2};  // highest first

  bool operator==(const SlicingObjectives&) const = default;
};

/// Shortfall weight of each slice id: n for the highest priority down to 1.
std::vector<double> priority_weights(const SlicingObjectives& obj, std::size_t slices);

/// Objective-violation cost of an allocation: sum of weighted PRB shortfalls.
double shortfall_cost(const std::vector<double>& weights, const std::vector<std::uint32_t>& demand,
                      const std::vector<std::uint32_t>& grant);

struct SplitSearch {
  std::vector<std::uint32_t> split;
  double cost = 0.0;
  std::uint64_t evaluated = 0;  // splits whose cost was computed
};

/// Number of ways to split exactly `capacity` PRBs among `slices` slices.
std::uint64_t partition_count(std::uint32_t capacity, std::size_t slices);

/// Minimum-cost split of exactly `capacity` PRBs, by exhaustive search.
/// Demand that fits is returned unchanged at zero cost without searching.
/// Ties go to the lexicographically first split.
SplitSearch optimal_split(const std::vector<std::uint32_t>& demand, std::uint32_t capacity,
                          const std::vector<double>& weights);

}  // namespace oran
