#include "oran/common/measurement.hpp"

#include <charconv>

#include "oran/common/error.hpp"

namespace oran {

namespace {

template <typename T>
T parse_int(std::string_view s, std::size_t line, const char* field) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    fail(Errc::parse_error, "line " + std::to_string(line) + ": bad " + field + " '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string format_row(const MeasurementRow& r) {
  return std::to_string(r.time_ms) + ',' + r.node + ',' + std::to_string(r.cell) + ',' + std::to_string(r.slice) +
         ',' + r.metric + ',' + format_double(r.value);
}

std::vector<MeasurementRow> parse_measurement_csv(std::string_view text) {
  std::vector<MeasurementRow> rows;
  const auto lines = split(text, '\n');
  if (lines.empty() || trim(lines[0]) != kMeasurementCsvHeader) {
    fail(Errc::parse_error, "line 1: expected header '" + std::string(kMeasurementCsvHeader) + "'");
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 6) fail(Errc::parse_error, "line " + std::to_string(i + 1) + ": expected 6 fields");
    MeasurementRow r;
    r.time_ms = parse_int<TimeMs>(f[0], i + 1, "time_ms");
    r.node = f[1];
    r.cell = parse_int<std::uint32_t>(f[2], i + 1, "cell");
    r.slice = parse_int<std::uint32_t>(f[3], i + 1, "slice");
    r.metric = f[4];
    try {
      std::size_t used = 0;
      r.value = std::stod(f[5], &used);
      if (used != f[5].size()) throw std::invalid_argument("trailing");
    } catch (const std::logic_error&) {
      fail(Errc::parse_error, "line " + std::to_string(i + 1) + ": bad value '" + f[5] + "'");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace oran
