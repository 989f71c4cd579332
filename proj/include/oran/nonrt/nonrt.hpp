#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "oran/a1/a1.hpp"
#include "oran/common/measurement.hpp"
#include "oran/transport/transport.hpp"

namespace oran::nonrt {

/// Framed JSON channel towards the near-RT RIC. Without a connection,
/// sends are dropped so the services can run offline.
class A1Client {
 public:
  explicit A1Client(std::unique_ptr<transport::Connection> conn = nullptr) : conn_(std::move(conn)) {}
  void attach(std::unique_ptr<transport::Connection> conn) { conn_ = std::move(conn); }
  bool connected() const { return conn_ && conn_->is_open(); }
  void send(const a1::Message& m);
  /// Every message waiting on the connection, decoded.
  std::vector<a1::Message> drain();
  std::uint64_t sent() const noexcept { return sent_; }

 private:
  std::unique_ptr<transport::Connection> conn_;
  std::uint64_t sent_ = 0;
};

// --- A1 policy management ---------------------------------------------

/// Policy store of the non-RT RIC. Every accepted change is pushed over A1;
/// feedback from the near-RT RIC is kept per policy.
class PolicyService {
 public:
  explicit PolicyService(A1Client* a1 = nullptr) : a1_(a1) {}

  /// Throws duplicate_id or schema_violation.
  void create(const a1::Policy& p);
  /// Throws unknown_id or schema_violation.
  void update(const a1::Policy& p);
  /// Throws unknown_id.
  void remove(const std::string& policy_id);
  /// All policies, or the one named. Throws unknown_id for an unknown name.
  std::vector<a1::Policy> query(const std::string& policy_id = "") const;
  /// Asks the near-RT RIC for its view; the answer lands in remote_view().
  void query_remote(const std::string& policy_id = "");

  /// Feedback, errors and query results coming back over A1.
  void handle(const a1::Message& m);

  /// Latest enforcement state reported for a policy.
  std::optional<bool> enforced(const std::string& policy_id) const;
  const std::vector<a1::Feedback>& feedback() const noexcept { return feedback_; }
  const std::vector<a1::Message>& remote_errors() const noexcept { return errors_; }
  const std::optional<std::vector<a1::Policy>>& remote_view() const noexcept { return remote_view_; }

  std::function<void(const a1::Feedback&)> on_feedback;

 private:
  A1Client* a1_;
  std::map<std::string, a1::Policy> store_;
  std::map<std::string, bool> enforced_;
  std::vector<a1::Feedback> feedback_;
  std::vector<a1::Message> errors_;
  std::optional<std::vector<a1::Policy>> remote_view_;
};

// --- enrichment information -------------------------------------------

class EiService {
 public:
  explicit EiService(A1Client* a1 = nullptr) : a1_(a1) {}

  void register_topic(const std::string& topic) { topics_.insert(topic); }
  bool has_topic(const std::string& topic) const { return topics_.contains(topic); }
  /// Forwards the item over A1. Throws unknown_topic, or stale_epoch unless
  /// the epoch is above the last one of the same (topic, producer).
  void publish(const a1::EiMessage& m);
  std::optional<std::uint64_t> last_epoch(const std::string& topic, const std::string& producer) const;
  std::uint64_t published() const noexcept { return published_; }

 private:
  A1Client* a1_;
  std::set<std::string> topics_;
  std::map<std::pair<std::string, std::string>, std::uint64_t> epochs_;
  std::uint64_t published_ = 0;
};

// --- O1 ----------------------------------------------------------------

struct HeartbeatRecord {
  enum class State { available, unavailable };
  std::string node_id;
  TimeMs period_ms = 1000;
  TimeMs last_beat = 0;
  State state = State::available;
};

struct HeartbeatTransition {
  TimeMs at_ms = 0;
  std::string node_id;
  HeartbeatRecord::State state = HeartbeatRecord::State::available;
  bool operator==(const HeartbeatTransition&) const = default;
};

/// A node is unavailable once now - last_beat > 3 * period. Transition
/// times are the exact boundary instants, however coarsely the monitor is
/// advanced.
class HeartbeatMonitor {
 public:
  void register_node(const std::string& node_id, TimeMs period_ms, TimeMs now);
  /// Registers unknown nodes on their first beat.
  void beat(const std::string& node_id, TimeMs period_ms, TimeMs at);
  void advance_to(TimeMs now);

  const std::map<std::string, HeartbeatRecord>& records() const noexcept { return records_; }
  const std::vector<HeartbeatTransition>& transitions() const noexcept { return transitions_; }
  bool available(const std::string& node_id) const;

 private:
  std::map<std::string, HeartbeatRecord> records_;
  std::vector<HeartbeatTransition> transitions_;
};

struct PmFile {
  std::string node_id;
  TimeMs interval_start_ms = 0;
  std::string name;
  std::string content;
};

/// Bulk PM collection. Files are keyed by (node, interval start); repeated
/// notifications for a stored or pending key are ignored.
class PmCollector {
 public:
  /// True when the file must be fetched.
  bool on_file_ready(const std::string& node_id, const std::string& file, TimeMs interval_start);
  void on_file(const std::string& node_id, const std::string& file, std::string content);
  /// Throws missing_file.
  void on_file_missing(const std::string& node_id, const std::string& file);

  const std::map<std::pair<std::string, TimeMs>, PmFile>& files() const noexcept { return files_; }
  /// Rows of every stored file, in key order.
  std::vector<MeasurementRow> rows() const;

 private:
  std::map<std::string, std::pair<std::string, TimeMs>> pending_;  // file name -> key
  std::map<std::pair<std::string, TimeMs>, PmFile> files_;
};

// --- forecasting rApp ---------------------------------------------------

/// Per-slice demand at one PM interval end: prb_requested averaged over
/// every cell that reported it.
struct DemandSample {
  TimeMs time_ms = 0;
  std::vector<double> demand_prb;
};

std::vector<DemandSample> demand_samples(const std::vector<MeasurementRow>& rows);

/// Arithmetic mean of the last `window` samples per slice. No samples
/// gives an empty, low-confidence forecast.
a1::Forecast mean_forecast(const std::vector<DemandSample>& samples, std::size_t window);

/// Emits a forecast as enrichment information at every multiple of
/// `horizon_ms`.
class ForecastRapp {
 public:
  ForecastRapp(std::size_t window, TimeMs horizon_ms, std::string topic = "A", std::string producer = "rapp-forecast");

  /// The forecast due at `now`, if any.
  std::optional<a1::EiMessage> on_time(TimeMs now, const PmCollector& pm);

  const std::string& topic() const noexcept { return topic_; }
  std::size_t window() const noexcept { return window_; }
  TimeMs horizon_ms() const noexcept { return horizon_ms_; }
  const std::optional<a1::Forecast>& last() const noexcept { return last_; }

 private:
  std::size_t window_;
  TimeMs horizon_ms_;
  std::string topic_;
  std::string producer_;
  std::optional<TimeMs> next_;
  std::uint64_t epoch_ = 0;
  std::optional<a1::Forecast> last_;
};

// --- SMO ---------------------------------------------------------------

struct SmoConfig {
  bool forecast_enabled = true;
  std::size_t forecast_window = 5;
  TimeMs forecast_horizon_ms = 1000;
};

/// Non-RT RIC plus the O1 termination: accepts node O1 connections, keeps
/// the PM store and heartbeat state, and drives A1 towards one near-RT RIC.
class Smo {
 public:
  explicit Smo(SmoConfig config = {});

  void attach_a1(std::unique_ptr<transport::Connection> conn) { a1_.attach(std::move(conn)); }
  void attach_o1_listener(std::unique_ptr<transport::Listener> listener) { o1_listener_ = std::move(listener); }
  void add_o1(std::unique_ptr<transport::Connection> conn) { o1_.push_back(std::move(conn)); }

  /// Drains O1 and A1. Returns the number of messages handled.
  std::size_t poll();
  /// Heartbeat boundaries and rApp emissions up to `now`.
  void advance_to(TimeMs now);
  TimeMs now() const noexcept { return now_; }

  PolicyService& policies() noexcept { return policies_; }
  EiService& ei() noexcept { return ei_; }
  HeartbeatMonitor& heartbeats() noexcept { return heartbeats_; }
  PmCollector& pm() noexcept { return pm_; }
  const PmCollector& pm() const noexcept { return pm_; }
  ForecastRapp& rapp() noexcept { return rapp_; }
  /// Errors raised while handling inbound O1 traffic, as "Errc: detail".
  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  void handle_o1(transport::Connection& conn, const std::string& text);

  SmoConfig config_;
  TimeMs now_ = 0;
  A1Client a1_;
  PolicyService policies_{&a1_};
  EiService ei_{&a1_};
  HeartbeatMonitor heartbeats_;
  PmCollector pm_;
  ForecastRapp rapp_;
  std::unique_ptr<transport::Listener> o1_listener_;
  std::vector<std::unique_ptr<transport::Connection>> o1_;
  std::vector<std::string> errors_;
};

}  // namespace oran::nonrt
