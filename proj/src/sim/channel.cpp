#include "oran/sim/channel.hpp"

#include <algorithm>
#include <cmath>

namespace oran::sim {

double distance(Vec2 a, Vec2 b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

double rsrp_dbm(double distance_m, double p0_dbm, double exponent) noexcept {
  return p0_dbm - 10.0 * exponent * std::log10(std::max(distance_m, 1.0));
}

Vec2 position_at(const std::vector<Waypoint>& path, TimeMs t) noexcept {
  if (path.empty()) return {};
  if (t <= path.front().at) return path.front().position;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const auto& a = path[i - 1];
    const auto& b = path[i];
    if (t <= b.at) {
      const double f = static_cast<double>(t - a.at) / static_cast<double>(b.at - a.at);
      return {a.position.x + f * (b.position.x - a.position.x), a.position.y + f * (b.position.y - a.position.y)};
    }
  }
  return path.back().position;
}

double Rng::uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::poisson(double mean) noexcept {
  // Knuth's product method on chunks of at most 30 (sums of independent
  // Poisson variables are Poisson), which keeps exp() from underflowing.
  std::uint64_t total = 0;
  while (mean > 0.0) {
    const double chunk = std::min(mean, 30.0);
    mean -= chunk;
    const double limit = std::exp(-chunk);
    double p = 1.0;
    std::uint64_t k = 0;
    for (;;) {
      p *= uniform();
      if (p <= limit) break;
      ++k;
    }
    total += k;
  }
  return total;
}

TrafficSource::TrafficSource(std::vector<TrafficSegment> segments, std::uint32_t packet_bytes, std::uint64_t seed)
    : segments_(std::move(segments)), packet_bytes_(std::max<std::uint32_t>(packet_bytes, 1)), rng_(seed) {
  std::stable_sort(segments_.begin(), segments_.end(),
                   [](const auto& a, const auto& b) { return a.from_ms < b.from_ms; });
}

const TrafficSegment* TrafficSource::active(TimeMs t) const {
  const TrafficSegment* seg = nullptr;
  for (const auto& s : segments_) {
    if (s.from_ms <= t) seg = &s;
  }
  return seg;
}

std::uint64_t TrafficSource::arrivals(TimeMs now, TimeMs tick_ms) {
  // the tick covering (now - tick_ms, now] uses the segment active at its start
  const auto* seg = active(now - tick_ms);
  if (seg != current_) {
    current_ = seg;
    carry_ = 0.0;
  }
  if (!seg) return 0;
  switch (seg->kind) {
    case TrafficKind::constant: {
      carry_ += seg->rate_bytes_per_ms * static_cast<double>(tick_ms);
      const auto bytes = static_cast<std::uint64_t>(std::floor(carry_));
      carry_ -= static_cast<double>(bytes);
      return bytes;
    }
    case TrafficKind::periodic: {
      std::uint64_t bytes = 0;
      const TimeMs period = std::max<TimeMs>(seg->period_ms, 1);
      for (TimeMs t = now - tick_ms; t < now; ++t) {
        if ((t - seg->from_ms) % period == 0) bytes += seg->burst_bytes;
      }
      return bytes;
    }
    case TrafficKind::poisson: {
      const double mean_packets = seg->rate_bytes_per_ms * static_cast<double>(tick_ms) / packet_bytes_;
      return rng_.poisson(mean_packets) * packet_bytes_;
    }
  }
  return 0;
}

double TrafficSource::offered_rate(TimeMs now) const {
  const auto* seg = active(now);
  if (!seg) return 0.0;
  if (seg->kind == TrafficKind::periodic) {
    return static_cast<double>(seg->burst_bytes) / static_cast<double>(std::max<TimeMs>(seg->period_ms, 1));
  }
  return seg->rate_bytes_per_ms;
}

}  // namespace oran::sim
