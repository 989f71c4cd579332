#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "oran/common/bytes.hpp"

namespace oran {

/// Header line shared by O1 PM files and the kpm-monitor CSV flush.
inline constexpr std::string_view kMeasurementCsvHeader = "time_ms,node,cell,slice,metric,value";

/// One CSV row of slice-level measurements.
struct MeasurementRow {
  TimeMs time_ms = 0;
  std::string node;
  std::uint32_t cell = 0;
  std::uint32_t slice = 0;
  std::string metric;
  double value = 0.0;
  bool operator==(const MeasurementRow&) const = default;
};

std::string format_row(const MeasurementRow& row);

/// Parses a measurement CSV. The header must match exactly; throws
/// parse_error naming the offending line.
std::vector<MeasurementRow> parse_measurement_csv(std::string_view text);

}  // namespace oran
