#include "oran/nonrt/nonrt.hpp"

#include <algorithm>

#include <json.hpp>

#include "oran/common/error.hpp"
#include "oran/e2sm/kpm.hpp"

namespace oran::nonrt {

using nlohmann::json;

// --- A1Client -----------------------------------------------------------

void A1Client::send(const a1::Message& m) {
  if (!connected()) return;
  conn_->send(a1::encode(m));
  ++sent_;
}

std::vector<a1::Message> A1Client::drain() {
  std::vector<a1::Message> out;
  if (!conn_) return out;
  for (;;) {
    auto p = conn_->try_recv();
    if (p.state != transport::Poll::State::message) return out;
    out.push_back(a1::decode(p.payload));
  }
}

// --- PolicyService ------------------------------------------------------

namespace {

void check_schema(const a1::Policy& p) {
  if (p.policy_id.empty()) fail(Errc::schema_violation, "policy_id must not be empty");
  try {
    a1::validate(p);
  } catch (const Error& e) {
    // an unknown type has no schema to satisfy
    if (e.code() == Errc::unknown_policy_type) fail(Errc::schema_violation, e.what());
    throw;
  }
}

a1::Message policy_op(std::string op, const a1::Policy& p) {
  a1::Message m;
  m.op = std::move(op);
  m.policy = p;
  m.policy_id = p.policy_id;
  return m;
}

}  // namespace

void PolicyService::create(const a1::Policy& p) {
  if (store_.contains(p.policy_id)) fail(Errc::duplicate_id, "policy " + p.policy_id + " already exists");
  check_schema(p);
  store_[p.policy_id] = p;
  if (a1_) a1_->send(policy_op("create", p));
}

void PolicyService::update(const a1::Policy& p) {
  if (!store_.contains(p.policy_id)) fail(Errc::unknown_id, "no policy " + p.policy_id);
  check_schema(p);
  store_[p.policy_id] = p;
  if (a1_) a1_->send(policy_op("update", p));
}

void PolicyService::remove(const std::string& policy_id) {
  if (!store_.erase(policy_id)) fail(Errc::unknown_id, "no policy " + policy_id);
  if (a1_) {
    a1::Message m;
    m.op = "delete";
    m.policy_id = policy_id;
    a1_->send(m);
  }
}

std::vector<a1::Policy> PolicyService::query(const std::string& policy_id) const {
  std::vector<a1::Policy> out;
  if (policy_id.empty()) {
    for (const auto& [id, p] : store_) out.push_back(p);
    return out;
  }
  auto it = store_.find(policy_id);
  if (it == store_.end()) fail(Errc::unknown_id, "no policy " + policy_id);
  out.push_back(it->second);
  return out;
}

void PolicyService::query_remote(const std::string& policy_id) {
  if (!a1_) return;
  a1::Message m;
  m.op = "query";
  m.policy_id = policy_id;
  a1_->send(m);
}

void PolicyService::handle(const a1::Message& m) {
  if (m.op == "feedback" && m.feedback) {
    feedback_.push_back(*m.feedback);
    enforced_[m.feedback->policy_id] = m.feedback->enforced;
    if (on_feedback) on_feedback(*m.feedback);
  } else if (m.op == "error") {
    errors_.push_back(m);
  } else if (m.op == "query_result") {
    remote_view_ = m.policies;
  }
}

std::optional<bool> PolicyService::enforced(const std::string& policy_id) const {
  auto it = enforced_.find(policy_id);
  if (it == enforced_.end()) return std::nullopt;
  return it->second;
}

// --- EiService ----------------------------------------------------------

void EiService::publish(const a1::EiMessage& m) {
  if (!topics_.contains(m.topic)) fail(Errc::unknown_topic, "topic " + m.topic + " is not registered");
  const auto key = std::make_pair(m.topic, m.producer);
  if (auto it = epochs_.find(key); it != epochs_.end() && m.epoch <= it->second) {
    fail(Errc::stale_epoch, "epoch " + std::to_string(m.epoch) + " of " + m.producer + " on " + m.topic +
                                " is not above " + std::to_string(it->second));
  }
  epochs_[key] = m.epoch;
  ++published_;
  if (a1_) {
    a1::Message out;
    out.op = "ei";
    out.ei = m;
    a1_->send(out);
  }
}

std::optional<std::uint64_t> EiService::last_epoch(const std::string& topic, const std::string& producer) const {
  auto it = epochs_.find({topic, producer});
  if (it == epochs_.end()) return std::nullopt;
  return it->second;
}

// --- HeartbeatMonitor ---------------------------------------------------

namespace {

void expire(HeartbeatRecord& r, TimeMs now, std::vector<HeartbeatTransition>& log) {
  if (r.state == HeartbeatRecord::State::unavailable) return;
  const TimeMs boundary = r.last_beat + 3 * r.period_ms + 1;
  if (now < boundary) return;
  r.state = HeartbeatRecord::State::unavailable;
  log.push_back({boundary, r.node_id, r.state});
}

}  // namespace

void HeartbeatMonitor::register_node(const std::string& node_id, TimeMs period_ms, TimeMs now) {
  auto& r = records_[node_id];
  r.node_id = node_id;
  r.period_ms = period_ms;
  r.last_beat = now;
  r.state = HeartbeatRecord::State::available;
}

void HeartbeatMonitor::beat(const std::string& node_id, TimeMs period_ms, TimeMs at) {
  auto it = records_.find(node_id);
  if (it == records_.end()) {
    register_node(node_id, period_ms, at);
    return;
  }
  auto& r = it->second;
  expire(r, at, transitions_);
  r.period_ms = period_ms;
  r.last_beat = std::max(r.last_beat, at);
  if (r.state == HeartbeatRecord::State::unavailable) {
    r.state = HeartbeatRecord::State::available;
    transitions_.push_back({at, node_id, r.state});
  }
}

void HeartbeatMonitor::advance_to(TimeMs now) {
  for (auto& [id, r] : records_) expire(r, now, transitions_);
}

bool HeartbeatMonitor::available(const std::string& node_id) const {
  auto it = records_.find(node_id);
  return it != records_.end() && it->second.state == HeartbeatRecord::State::available;
}

// --- PmCollector --------------------------------------------------------

bool PmCollector::on_file_ready(const std::string& node_id, const std::string& file, TimeMs interval_start) {
  const auto key = std::make_pair(node_id, interval_start);
  if (files_.contains(key)) return false;
  if (pending_.contains(file)) return false;
  pending_[file] = key;
  return true;
}

void PmCollector::on_file(const std::string& node_id, const std::string& file, std::string content) {
  auto it = pending_.find(file);
  if (it == pending_.end()) return;  // unsolicited or already stored
  const auto key = it->second;
  pending_.erase(it);
  files_[key] = PmFile{node_id, key.second, file, std::move(content)};
}

void PmCollector::on_file_missing(const std::string& node_id, const std::string& file) {
  pending_.erase(file);
  fail(Errc::missing_file, "node " + node_id + " has no file " + file);
}

std::vector<MeasurementRow> PmCollector::rows() const {
  std::vector<MeasurementRow> out;
  for (const auto& [key, f] : files_) {
    auto rows = parse_measurement_csv(f.content);
    out.insert(out.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
  }
  return out;
}

// --- forecasting --------------------------------------------------------

std::vector<DemandSample> demand_samples(const std::vector<MeasurementRow>& rows) {
  // time -> slice -> (sum, count)
  std::map<TimeMs, std::map<std::uint32_t, std::pair<double, std::size_t>>> acc;
  for (const auto& r : rows) {
    if (r.metric != e2sm::metric::prb_requested) continue;
    auto& a = acc[r.time_ms][r.slice];
    a.first += r.value;
    ++a.second;
  }
  std::vector<DemandSample> out;
  for (const auto& [t, slices] : acc) {
    DemandSample s;
    s.time_ms = t;
    s.demand_prb.assign(slices.rbegin()->first + 1, 0.0);
    for (const auto& [slice, a] : slices) s.demand_prb[slice] = a.first / static_cast<double>(a.second);
    out.push_back(std::move(s));
  }
  return out;
}

a1::Forecast mean_forecast(const std::vector<DemandSample>& samples, std::size_t window) {
  a1::Forecast f;
  if (samples.empty() || window == 0) {
    f.low_confidence = true;
    return f;
  }
  const auto first = samples.size() > window ? samples.size() - window : 0;
  std::size_t slices = 0;
  for (auto i = first; i < samples.size(); ++i) slices = std::max(slices, samples[i].demand_prb.size());
  f.demand_prb.assign(slices, 0.0);
  for (auto i = first; i < samples.size(); ++i) {
    for (std::size_t s = 0; s < samples[i].demand_prb.size(); ++s) f.demand_prb[s] += samples[i].demand_prb[s];
  }
  const auto n = static_cast<double>(samples.size() - first);
  for (auto& v : f.demand_prb) v /= n;
  return f;
}

ForecastRapp::ForecastRapp(std::size_t window, TimeMs horizon_ms, std::string topic, std::string producer)
    : window_(window), horizon_ms_(horizon_ms), topic_(std::move(topic)), producer_(std::move(producer)) {}

std::optional<a1::EiMessage> ForecastRapp::on_time(TimeMs now, const PmCollector& pm) {
  if (!next_) next_ = (now / horizon_ms_ + 1) * horizon_ms_;
  if (now < *next_) return std::nullopt;
  while (*next_ <= now) *next_ += horizon_ms_;
  last_ = mean_forecast(demand_samples(pm.rows()), window_);
  a1::EiMessage m;
  m.topic = topic_;
  m.producer = producer_;
  m.epoch = ++epoch_;
  m.payload = a1::to_json(*last_);
  return m;
}

// --- Smo ----------------------------------------------------------------

Smo::Smo(SmoConfig config)
    : config_(config), rapp_(config.forecast_window, config.forecast_horizon_ms) {
  ei_.register_topic(rapp_.topic());
}

std::size_t Smo::poll() {
  std::size_t handled = 0;
  if (o1_listener_) {
    while (auto c = o1_listener_->try_accept()) o1_.push_back(std::move(c));
  }
  for (auto& conn : o1_) {
    for (;;) {
      auto p = conn->try_recv();
      if (p.state != transport::Poll::State::message) break;
      ++handled;
      handle_o1(*conn, to_string(p.payload));
    }
  }
  for (const auto& m : a1_.drain()) {
    ++handled;
    policies_.handle(m);
  }
  return handled;
}

void Smo::handle_o1(transport::Connection& conn, const std::string& text) {
  const auto msg = json::parse(text, nullptr, false);
  if (msg.is_discarded() || !msg.is_object()) {
    errors_.push_back("ParseError: O1 message is not a JSON object");
    return;
  }
  try {
    const auto type = msg.value("type", "");
    const auto node = msg.value("node", "");
    if (type == "heartbeat") {
      heartbeats_.beat(node, msg.at("period_ms").get<TimeMs>(), msg.at("at_ms").get<TimeMs>());
    } else if (type == "file_ready") {
      const auto file = msg.at("file").get<std::string>();
      if (pm_.on_file_ready(node, file, msg.at("interval_start_ms").get<TimeMs>())) {
        conn.send(to_bytes(json{{"type", "fetch"}, {"file", file}}.dump()));
      }
    } else if (type == "file") {
      pm_.on_file(node, msg.at("file").get<std::string>(), msg.at("content").get<std::string>());
    } else if (type == "file_missing") {
      pm_.on_file_missing(node, msg.at("file").get<std::string>());
    }
  } catch (const Error& e) {
    errors_.emplace_back(e.what());
  } catch (const json::exception& e) {
    errors_.push_back(std::string("ParseError: ") + e.what());
  }
}

void Smo::advance_to(TimeMs now) {
  now_ = std::max(now_, now);
  heartbeats_.advance_to(now_);
  if (!config_.forecast_enabled) return;
  if (auto m = rapp_.on_time(now_, pm_)) ei_.publish(*m);
}

}  // namespace oran::nonrt
