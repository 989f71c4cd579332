#pragma once

#include <map>
#include <memory>
#include <string>

#include "oran/common/measurement.hpp"
#include "oran/sim/ran_sim.hpp"
#include "oran/transport/transport.hpp"

namespace oran::sim {

/// Minimal O1 endpoint of one node: periodic heartbeats and bulk PM files.
///
/// Messages are JSON objects, one per frame:
///   node -> SMO  {"type":"heartbeat","node","period_ms","at_ms"}
///                {"type":"file_ready","node","file","interval_start_ms","at_ms"}
///                {"type":"file","node","file","content"}
///                {"type":"file_missing","node","file"}
///   SMO -> node  {"type":"fetch","file"}
class O1Agent {
 public:
  O1Agent(RanSim& sim, std::string node_id, std::unique_ptr<transport::Connection> conn);

  const std::string& node_id() const noexcept { return node_id_; }

  /// Sends the first heartbeat.
  void start();
  /// Heartbeats and PM files that fall due at the current sim time.
  void on_tick();
  std::size_t poll();

  /// Fault injection: a node with heartbeats disabled stays silent.
  void set_heartbeat_enabled(bool on) noexcept { heartbeat_on_ = on; }
  /// Drops a produced file so a later fetch reports it missing.
  void discard_file(const std::string& name) { files_.erase(name); }

  const std::map<std::string, std::string>& files() const noexcept { return files_; }
  static std::string file_name(const std::string& node_id, TimeMs interval_start);

 private:
  void send_json(const std::string& text);
  void produce_file();

  RanSim& sim_;
  std::string node_id_;
  std::unique_ptr<transport::Connection> conn_;
  bool heartbeat_on_ = true;
  TimeMs last_beat_ = 0;
  TimeMs interval_start_ = 0;
  std::map<e2sm::KpmScope, Counters> snapshot_;
  std::uint64_t handovers_ = 0;
  std::map<std::string, std::string> files_;
};

}  // namespace oran::sim
