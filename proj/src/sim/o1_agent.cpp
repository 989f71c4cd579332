#include "oran/sim/o1_agent.hpp"

#include <json.hpp>

#include "oran/sim/measure.hpp"

namespace oran::sim {

using nlohmann::json;

O1Agent::O1Agent(RanSim& sim, std::string node_id, std::unique_ptr<transport::Connection> conn)
    : sim_(sim), node_id_(std::move(node_id)), conn_(std::move(conn)) {
  for (const auto& row : sim_.rows(node_id_, e2sm::KpmScope::node())) snapshot_[row.scope] = row.counters;
  handovers_ = sim_.handover_count(node_id_);
}

std::string O1Agent::file_name(const std::string& node_id, TimeMs interval_start) {
  return "pm/" + node_id + "/" + std::to_string(interval_start) + ".csv";
}

void O1Agent::send_json(const std::string& text) { conn_->send(to_bytes(text)); }

void O1Agent::start() {
  last_beat_ = sim_.now();
  interval_start_ = sim_.now();
  if (!heartbeat_on_) return;
  send_json(json{{"type", "heartbeat"}, {"node", node_id_}, {"period_ms", sim_.config().heartbeat_period_ms},
                 {"at_ms", sim_.now()}}
                .dump());
}

void O1Agent::on_tick() {
  const auto now = sim_.now();
  const auto period = sim_.config().heartbeat_period_ms;
  if (now - last_beat_ >= period) {
    last_beat_ = now;
    if (heartbeat_on_) {
      send_json(json{{"type", "heartbeat"}, {"node", node_id_}, {"period_ms", period}, {"at_ms", now}}.dump());
    }
  }
  if (now - interval_start_ >= sim_.config().pm_interval_ms) produce_file();
}

void O1Agent::produce_file() {
  const auto now = sim_.now();
  const auto window = now - interval_start_;
  const auto handovers = sim_.handover_count(node_id_);
  std::string csv(kMeasurementCsvHeader);
  csv += '\n';
  for (const auto& row : sim_.rows(node_id_, e2sm::KpmScope::node())) {
    auto& snap = snapshot_[row.scope];
    const auto delta = row.counters - snap;
    for (const auto& m : e2sm::metric_catalog(e2sm::NodeKind::du)) {
      const double v = metric_value(m, row, delta, handovers - handovers_, sim_.config().packet_bytes, window);
      csv += std::to_string(now) + ',' + node_id_ + ',' + std::to_string(row.scope.cell_id) + ',' +
             std::to_string(row.scope.slice_id) + ',' + m + ',' + format_double(v) + '\n';
    }
    snap = row.counters;
  }
  handovers_ = handovers;
  const auto name = file_name(node_id_, interval_start_);
  files_[name] = std::move(csv);
  send_json(json{{"type", "file_ready"},
                 {"node", node_id_},
                 {"file", name},
                 {"interval_start_ms", interval_start_},
                 {"at_ms", now}}
                .dump());
  interval_start_ = now;
}

std::size_t O1Agent::poll() {
  std::size_t handled = 0;
  for (;;) {
    auto p = conn_->try_recv();
    if (p.state != transport::Poll::State::message) break;
    ++handled;
    const auto msg = json::parse(to_string(p.payload), nullptr, false);
    if (msg.is_discarded() || !msg.is_object() || msg.value("type", "") != "fetch" || !msg.contains("file")) {
      continue;
    }
    const auto name = msg["file"].get<std::string>();
    auto it = files_.find(name);
    if (it == files_.end()) {
      send_json(json{{"type", "file_missing"}, {"node", node_id_}, {"file", name}}.dump());
    } else {
      send_json(json{{"type", "file"}, {"node", node_id_}, {"file", name}, {"content", it->second}}.dump());
    }
  }
  return handled;
}

}  // namespace oran::sim
