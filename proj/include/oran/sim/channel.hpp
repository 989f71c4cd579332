#pragma once

#include <random>
#include <vector>

#include "oran/sim/config.hpp"

namespace oran::sim {

double distance(Vec2 a, Vec2 b) noexcept;

/// Log-distance path loss without fading: p0 - 10 n log10(max(d, 1)).
double rsrp_dbm(double distance_m, double p0_dbm = -40.0, double exponent = 3.0) noexcept;

/// Position on a piecewise-linear path at time t. Before the first waypoint
/// and after the last one the endpoint is held.
Vec2 position_at(const std::vector<Waypoint>& path, TimeMs t) noexcept;

/// Platform-independent random source: mt19937_64 plus hand-written
/// transforms (the standard distributions are implementation defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() noexcept;  // [0, 1)
  std::uint64_t poisson(double mean) noexcept;
  std::uint64_t next() noexcept { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Byte arrivals of one UE, integer-exact: constant rates use a running
/// floor so fractional rates never drift.
class TrafficSource {
 public:
  TrafficSource(std::vector<TrafficSegment> segments, std::uint32_t packet_bytes, std::uint64_t seed);
  /// Bytes arriving during the tick that ends at `now`.
  std::uint64_t arrivals(TimeMs now, TimeMs tick_ms);
  double offered_rate(TimeMs now) const;  // bytes per ms, long-run mean

 private:
  const TrafficSegment* active(TimeMs t) const;

  std::vector<TrafficSegment> segments_;
  std::uint32_t packet_bytes_;
  Rng rng_;
  double carry_ = 0.0;
  const TrafficSegment* current_ = nullptr;
};

}  // namespace oran::sim
