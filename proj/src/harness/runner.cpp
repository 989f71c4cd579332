#include "oran/harness/runner.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <deque>
#include <filesystem>
#include <fstream>

#include "oran/common/error.hpp"
#include "oran/harness/capture.hpp"
#include "oran/nonrt/nonrt.hpp"
#include "oran/ric/ric.hpp"
#include "oran/sim/runtime.hpp"
#include "oran/xapps/apps.hpp"

namespace oran::harness {

using nlohmann::json;

// --- RanSummary / RunReport ----------------------------------------------

json RanSummary::to_json() const {
  json sat = json::object();
  for (const auto& [id, v] : satisfaction) sat[std::to_string(id)] = v;
  json cs = json::array();
  for (const auto& c : cells) {
    cs.push_back({{"cell_id", c.cell_id},
                  {"scored_ticks", c.scored_ticks},
                  {"violation_ticks", c.violation_ticks},
                  {"cost_sum", c.cost_sum},
                  {"oracle_cost_sum", c.oracle_cost_sum}});
  }
  return {{"state_hash", state_hash},
          {"now", now},
          {"satisfaction", sat},
          {"cells", cs},
          {"indications", indications},
          {"inserts", inserts},
          {"inserts_accepted", inserts_accepted},
          {"inserts_denied", inserts_denied},
          {"inserts_timed_out", inserts_timed_out},
          {"inserts_pending", inserts_pending},
          {"controls_acked", controls_acked},
          {"controls_failed", controls_failed},
          {"bytes_arrived", bytes_arrived},
          {"bytes_served", bytes_served},
          {"bytes_buffered", bytes_buffered}};
}

RanSummary RanSummary::from_json(const json& j) {
  RanSummary s;
  s.state_hash = j.at("state_hash");
  s.now = j.at("now");
  for (const auto& [k, v] : j.at("satisfaction").items()) s.satisfaction[std::stoul(k)] = v.get<double>();
  for (const auto& c : j.at("cells")) {
    s.cells.push_back({c.at("cell_id"), c.at("scored_ticks"), c.at("violation_ticks"), c.at("cost_sum"),
                       c.at("oracle_cost_sum")});
  }
  s.indications = j.at("indications");
  s.inserts = j.at("inserts");
  s.inserts_accepted = j.at("inserts_accepted");
  s.inserts_denied = j.at("inserts_denied");
  s.inserts_timed_out = j.at("inserts_timed_out");
  s.inserts_pending = j.at("inserts_pending");
  s.controls_acked = j.at("controls_acked");
  s.controls_failed = j.at("controls_failed");
  s.bytes_arrived = j.at("bytes_arrived");
  s.bytes_served = j.at("bytes_served");
  s.bytes_buffered = j.at("bytes_buffered");
  return s;
}

std::uint64_t RunReport::metric(const std::string& name) const {
  auto it = ric_metrics.find(name);
  return it == ric_metrics.end() ? 0 : it->second;
}

std::vector<std::string> RunReport::consistency_errors() const {
  std::vector<std::string> out;
  const auto settled = ran.inserts_accepted + ran.inserts_denied + ran.inserts_timed_out + ran.inserts_pending;
  if (ran.inserts != settled) {
    out.push_back("inserts " + std::to_string(ran.inserts) + " != accepted + denied + timed out + pending " +
                  std::to_string(settled));
  }
  if (metric("subscriptions.wire_requests") != metric("subscriptions.distinct_keys")) {
    out.push_back("wire subscriptions " + std::to_string(metric("subscriptions.wire_requests")) +
                  " != distinct subscription keys " + std::to_string(metric("subscriptions.distinct_keys")));
  }
  if (ran.bytes_arrived != ran.bytes_served + ran.bytes_buffered) {
    out.push_back("bytes arrived != served + buffered");
  }
  if (ran.controls_acked + ran.controls_failed > metric("controls.sent")) {
    out.push_back("more control outcomes at the nodes than controls sent");
  }
  for (const auto& [id, v] : ran.satisfaction) {
    if (v < 0.0 || v > 1.0) out.push_back("satisfaction of slice " + std::to_string(id) + " outside [0, 1]");
  }
  for (const auto& c : ran.cells) {
    if (c.violation_ticks > c.scored_ticks) out.push_back("cell " + std::to_string(c.cell_id) + " violations > ticks");
    if (c.oracle_cost_sum > c.cost_sum + 1e-6) {
      out.push_back("cell " + std::to_string(c.cell_id) + " beats the oracle");
    }
  }
  return out;
}

json RunReport::to_json() const {
  json metrics = json::object();
  for (const auto& [k, v] : ric_metrics) metrics[k] = v;
  return {{"scenario", scenario},
          {"seed", seed},
          {"duration_ms", duration_ms},
          {"state_hash", state_hash},
          {"ric_state_hash", ric_state_hash},
          {"model_id", model_id},
          {"ran", ran.to_json()},
          {"ric_metrics", metrics},
          {"pm_files", pm_files},
          {"a1_feedback", a1_feedback},
          {"a1_errors", a1_errors},
          {"csv_paths", csv_paths}};
}

namespace {

// --- RAN side ------------------------------------------------------------

/// The simulated RAN plus the oracle bookkeeping of the report.
class RanSide {
 public:
  RanSide(sim::SimConfig config, const sim::Connector& connect) : rt_(std::move(config), connect) {
    std::size_t max_slice = 0;
    for (const auto& c : rt_.sim().cells()) {
      for (const auto& s : c.slices) max_slice = std::max<std::size_t>(max_slice, s.config.slice_id + 1);
    }
    weights_ = priority_weights(rt_.sim().config().objectives, max_slice);
    oracle_.resize(rt_.sim().cells().size(), 0.0);
  }

  void start() { rt_.start(); }

  TimeMs advance() {
    rt_.advance();
    const auto& sim = rt_.sim();
    if (sim.now() > sim.config().warmup_ms) {
      for (std::size_t i = 0; i < sim.cells().size(); ++i) oracle_[i] += oracle_cost(sim.cells()[i]);
    }
    return sim.now();
  }

  std::size_t poll() { return rt_.poll(); }
  const sim::RanSim& sim() const { return rt_.sim(); }

  RanSummary summary() {
    const auto& sim = rt_.sim();
    RanSummary s;
    s.state_hash = rt_.state_hash();
    s.now = sim.now();
    s.satisfaction = sim.satisfaction();
    for (std::size_t i = 0; i < sim.cells().size(); ++i) {
      const auto& st = sim.objective_stats(sim.cells()[i].config.cell_id);
      s.cells.push_back({sim.cells()[i].config.cell_id, st.scored_ticks, st.violation_ticks, st.cost_sum, oracle_[i]});
    }
    for (const auto& node : sim.nodes()) {
      auto& a = rt_.agent(node.node_id);
      const auto& st = a.stats();
      s.indications += st.indications_sent;
      s.inserts += st.inserts_sent;
      s.inserts_accepted += st.inserts_accepted;
      s.inserts_denied += st.inserts_denied;
      s.inserts_timed_out += st.inserts_timed_out;
      s.inserts_pending += a.pending_inserts();
      s.controls_acked += st.controls_acked;
      s.controls_failed += st.controls_failed;
    }
    s.bytes_arrived = sim.total_arrived();
    s.bytes_served = sim.total_served();
    s.bytes_buffered = sim.total_buffered();
    return s;
  }

 private:
  double oracle_cost(const sim::CellState& cell) {
    std::vector<std::uint32_t> req;
    std::vector<double> w;
    for (const auto& s : cell.slices) {
      req.push_back(s.last_requested);
      w.push_back(s.config.slice_id < weights_.size() ? weights_[s.config.slice_id] : 1.0);
    }
    auto key = std::make_pair(cell.config.total_prb, req);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, optimal_split(req, cell.config.total_prb, w).cost).first;
    return it->second;
  }

  sim::RanRuntime rt_;
  std::vector<double> weights_;
  std::vector<double> oracle_;
  std::map<std::pair<std::uint32_t, std::vector<std::uint32_t>>, double> cache_;
};

// --- RIC side ------------------------------------------------------------

/// Near-RT RIC, xApps and SMO with A1 between them.
class RicSide {
 public:
  RicSide(const Scenario& sc, const RunOptions& opt) : sc_(sc), opt_(opt), smo_(smo_config(sc)) {
    a1_listener_ = a1_hub_.listen("ric:a1");
    smo_.attach_a1(a1_hub_.connect({"ric:a1", transport::Role::ric}));
    ric_.attach_a1(a1_listener_->try_accept());
    xapps::register_reference_xapps(ric_);
  }

  void attach_e2(std::unique_ptr<transport::Connection> conn) {
    if (!opt_.capture_path.empty()) {
      conn = std::make_unique<CapturingConnection>(std::move(conn), links_++, clock_, capture_);
    }
    ric_.attach_e2(std::move(conn));
  }
  void attach_o1(std::unique_ptr<transport::Connection> conn) { smo_.add_o1(std::move(conn)); }

  void deploy() {
    for (const auto& x : sc_.xapps) {
      auto overrides = x.overrides;
      if (x.name == "slicing-control" && sc_.model_id) {
        overrides["model_path"] = (std::filesystem::path(opt_.catalog_dir) / *sc_.model_id).string();
      }
      ric_.onboard(descriptor(x.name));
      ric_.deploy(x.name, overrides);
      if (x.name == "slicing-control" && opt_.candidate_model) {
        dynamic_cast<xapps::SlicingControl&>(*ric_.xapp(x.name)).use_candidate_model(*opt_.candidate_model);
      }
    }
    inject(0);
  }

  void advance(TimeMs now) {
    clock_ = now;
    ric_.advance_to(now);
    smo_.advance_to(now);
    inject(now);
  }

  std::size_t poll() { return ric_.poll() + smo_.poll(); }

  RunReport report(const RanSummary& ran, std::uint64_t seed) {
    RunReport r;
    r.scenario = sc_.name;
    r.seed = seed;
    r.duration_ms = sc_.duration_ms;
    r.mode = opt_.tcp ? "tcp" : "in-process";
    r.ran = ran;
    r.ric_metrics = ric_.metrics();
    r.ric_state_hash = ric_.state_hash();
    Fnv1a h;
    h.add_u64(ran.state_hash).add_u64(r.ric_state_hash);
    r.state_hash = h.hex();
    if (auto* sc = dynamic_cast<xapps::SlicingControl*>(ric_.xapp("slicing-control"))) {
      r.model_id = sc->status().model_id;
    }
    r.pm_files = smo_.pm().files().size();
    r.a1_feedback = smo_.policies().feedback().size();
    r.a1_errors = a1_errors_;
    for (const auto& m : smo_.policies().remote_errors()) r.a1_errors.push_back(m.error + ": " + m.detail);
    return r;
  }

  void write_outputs(RunReport& r) {
    if (!opt_.capture_path.empty()) {
      if (auto dir = std::filesystem::path(opt_.capture_path).parent_path(); !dir.empty()) {
        std::filesystem::create_directories(dir);
      }
      write_file(opt_.capture_path, encode_capture(capture_));
    }
    if (opt_.out_dir.empty()) return;
    const std::filesystem::path out(opt_.out_dir);
    std::filesystem::create_directories(out);
    if (auto* mon = dynamic_cast<xapps::KpmMonitor*>(ric_.xapp("kpm-monitor"))) {
      mon->flush();
      write_text(out / "kpm.csv", mon->csv());
      r.csv_paths.push_back("kpm.csv");
    }
    for (const auto& [key, f] : smo_.pm().files()) {
      write_text(out / f.name, f.content);
      r.csv_paths.push_back(f.name);
    }
    write_text(out / "ric_metrics.csv", ric_.metrics_csv());
    r.csv_paths.push_back("ric_metrics.csv");
    write_text(out / "report.json", r.to_json().dump(2) + "\n");
  }

  const std::vector<CaptureRecord>& capture() const { return capture_; }

 private:
  static nonrt::SmoConfig smo_config(const Scenario& sc) {
    nonrt::SmoConfig c;
    c.forecast_enabled = sc.forecast.enabled;
    c.forecast_window = sc.forecast.window;
    c.forecast_horizon_ms = sc.forecast.horizon_ms;
    return c;
  }

  static ric::XappDescriptor descriptor(const std::string& name) {
    if (name == "kpm-monitor") return xapps::kpm_monitor_descriptor();
    if (name == "slicing-control") return xapps::slicing_control_descriptor();
    if (name == "scheduling-control") return xapps::scheduling_control_descriptor();
    if (name == "handover-control") return xapps::handover_control_descriptor();
    fail(Errc::scenario_invalid, "unknown xApp " + name);
  }

  static void write_file(const std::filesystem::path& p, const Bytes& data) {
    std::ofstream f(p, std::ios::binary);
    f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  }

  static void write_text(const std::filesystem::path& p, const std::string& text) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    f << text;
  }

  void inject(TimeMs now) {
    while (next_policy_ < sc_.policies.size() && sc_.policies[next_policy_].at_ms <= now) {
      const auto& p = sc_.policies[next_policy_++];
      try {
        if (p.op == "create") {
          smo_.policies().create(*p.policy);
        } else if (p.op == "update") {
          smo_.policies().update(*p.policy);
        } else {
          smo_.policies().remove(p.policy_id);
        }
      } catch (const Error& e) {
        a1_errors_.push_back(e.what());
      }
    }
  }

  const Scenario& sc_;
  const RunOptions& opt_;
  transport::LoopbackHub a1_hub_;
  std::unique_ptr<transport::Listener> a1_listener_;
  ric::NearRtRic ric_;
  nonrt::Smo smo_;
  TimeMs clock_ = 0;
  std::uint16_t links_ = 0;
  std::vector<CaptureRecord> capture_;
  std::size_t next_policy_ = 0;
  std::vector<std::string> a1_errors_;
};

// --- ports -----------------------------------------------------------------

/// How the RIC side drives the RAN: directly, or over a control channel.
class RanPort {
 public:
  virtual ~RanPort() = default;
  virtual void start() = 0;
  virtual TimeMs advance() = 0;
  virtual std::size_t poll() = 0;
  virtual RanSummary finish() = 0;
};

class LocalPort final : public RanPort {
 public:
  LocalPort(RanSide& ran, const RunOptions& opt) : ran_(ran), opt_(opt) {}
  void start() override { ran_.start(); }
  TimeMs advance() override {
    const auto now = ran_.advance();
    if (opt_.observer) opt_.observer(ran_.sim());
    return now;
  }
  std::size_t poll() override { return ran_.poll(); }
  RanSummary finish() override { return ran_.summary(); }

 private:
  RanSide& ran_;
  const RunOptions& opt_;
};

/// Counts frames so both processes can agree on what has been delivered.
/// Receives only surface once wait_for() pulled them off the socket.
class SyncedConnection final : public transport::Connection {
 public:
  explicit SyncedConnection(std::unique_ptr<transport::Connection> inner) : inner_(std::move(inner)) {}

  void send(ByteView payload) override {
    inner_->send(payload);
    ++sent_;
  }
  std::optional<Bytes> recv() override {
    if (stash_.empty()) return std::nullopt;
    auto m = std::move(stash_.front());
    stash_.pop_front();
    return m;
  }
  transport::Poll try_recv() override {
    if (stash_.empty()) return {};
    transport::Poll p;
    p.state = transport::Poll::State::message;
    p.payload = std::move(stash_.front());
    stash_.pop_front();
    return p;
  }
  void close() override { inner_->close(); }
  bool is_open() const override { return inner_->is_open(); }

  void wait_for(std::uint64_t count) {
    while (received_ < count) {
      auto m = inner_->recv();
      if (!m) fail(Errc::closed, "peer closed while " + std::to_string(count - received_) + " frames were due");
      stash_.push_back(std::move(*m));
      ++received_;
    }
  }
  std::uint64_t sent() const noexcept { return sent_; }

 private:
  std::unique_ptr<transport::Connection> inner_;
  std::deque<Bytes> stash_;
  std::uint64_t sent_ = 0;
  std::uint64_t received_ = 0;
};

json sent_counts(const std::vector<SyncedConnection*>& links) {
  json out = json::array();
  for (const auto* l : links) out.push_back(l->sent());
  return out;
}

void await_counts(const std::vector<SyncedConnection*>& links, const json& counts) {
  if (!counts.is_array() || counts.size() != links.size()) fail(Errc::invariant_violation, "link count mismatch");
  for (std::size_t i = 0; i < links.size(); ++i) links[i]->wait_for(counts[i].get<std::uint64_t>());
}

json recv_json(transport::Connection& c) {
  auto m = c.recv();
  if (!m) fail(Errc::closed, "control channel closed");
  return json::parse(to_string(*m));
}

void send_json(transport::Connection& c, const json& j) { c.send(to_bytes(j.dump())); }

class RemotePort final : public RanPort {
 public:
  RemotePort(std::unique_ptr<transport::Connection> ctrl, std::vector<SyncedConnection*> links)
      : ctrl_(std::move(ctrl)), links_(std::move(links)) {}

  void start() override { exchange("start"); }
  TimeMs advance() override { return exchange("tick").at("now").get<TimeMs>(); }
  std::size_t poll() override { return exchange("poll").at("handled").get<std::size_t>(); }
  RanSummary finish() override {
    send_json(*ctrl_, {{"cmd", "finish"}, {"counts", sent_counts(links_)}});
    return RanSummary::from_json(recv_json(*ctrl_).at("summary"));
  }

 private:
  json exchange(const char* cmd) {
    send_json(*ctrl_, {{"cmd", cmd}, {"counts", sent_counts(links_)}});
    auto reply = recv_json(*ctrl_);
    await_counts(links_, reply.at("counts"));
    return reply;
  }

  std::unique_ptr<transport::Connection> ctrl_;
  std::vector<SyncedConnection*> links_;
};

/// Child process body of --tcp mode. Never returns.
[[noreturn]] void ran_process(const sim::SimConfig& config, const std::string& ctrl_addr, const std::string& e2_addr,
                              const std::string& o1_addr) {
  int code = 0;
  try {
    auto ctrl = transport::connect_tcp({ctrl_addr, transport::Role::e2_node});
    std::vector<SyncedConnection*> links;
    RanSide ran(config, [&](const std::string&, sim::Interface iface) {
      auto c = std::make_unique<SyncedConnection>(
          transport::connect_tcp({iface == sim::Interface::e2 ? e2_addr : o1_addr, transport::Role::e2_node}));
      links.push_back(c.get());
      return c;
    });
    for (;;) {
      const auto msg = recv_json(*ctrl);
      await_counts(links, msg.at("counts"));
      const auto cmd = msg.at("cmd").get<std::string>();
      json reply;
      if (cmd == "start") {
        ran.start();
      } else if (cmd == "tick") {
        reply["now"] = ran.advance();
      } else if (cmd == "poll") {
        reply["handled"] = ran.poll();
      } else if (cmd == "finish") {
        send_json(*ctrl, {{"summary", ran.summary().to_json()}});
        break;
      }
      reply["counts"] = sent_counts(links);
      send_json(*ctrl, reply);
    }
  } catch (...) {
    code = 1;
  }
  ::_exit(code);
}

void pump(const Scenario& sc, RicSide& ric, RanPort& ran) {
  auto settle = [&] {
    for (int round = 0; round < 256; ++round) {
      const auto h = ric.poll() + ran.poll();
      if (h == 0) return;
    }
    fail(Errc::invariant_violation, "message exchange did not settle");
  };
  ran.start();
  settle();
  ric.deploy();
  settle();
  for (TimeMs now = 0; now < sc.duration_ms;) {
    now = ran.advance();
    ric.advance(now);
    settle();
  }
}

}  // namespace

RunReport run(const Scenario& scenario, const RunOptions& options) {
  auto config = scenario.sim;
  if (options.seed) config.seed = *options.seed;
  RicSide ric(scenario, options);
  RanSummary summary;

  if (!options.tcp) {
    transport::LoopbackHub hub;
    auto e2_listener = hub.listen("ran:e2");
    auto o1_listener = hub.listen("ran:o1");
    RanSide ran(config, [&](const std::string&, sim::Interface iface) {
      if (iface == sim::Interface::e2) {
        auto c = hub.connect({"ran:e2", transport::Role::e2_node});
        ric.attach_e2(e2_listener->try_accept());
        return c;
      }
      auto c = hub.connect({"ran:o1", transport::Role::e2_node});
      ric.attach_o1(o1_listener->try_accept());
      return c;
    });
    LocalPort port(ran, options);
    pump(scenario, ric, port);
    summary = port.finish();
  } else {
    if (options.observer) fail(Errc::invariant_violation, "tick observers need the in-process mode");
    auto ctrl_listener = transport::listen_tcp("127.0.0.1:0");
    auto e2_listener = transport::listen_tcp("127.0.0.1:0");
    auto o1_listener = transport::listen_tcp("127.0.0.1:0");
    const pid_t pid = ::fork();
    if (pid < 0) fail(Errc::invariant_violation, "fork failed");
    if (pid == 0) {
      ran_process(config, ctrl_listener->address(), e2_listener->address(), o1_listener->address());
    }
    int status = 0;
    try {
      auto ctrl = ctrl_listener->accept();
      std::vector<SyncedConnection*> links;
      for (const auto& node : config.nodes) {
        (void)node;
        auto e2c = std::make_unique<SyncedConnection>(e2_listener->accept());
        links.push_back(e2c.get());
        ric.attach_e2(std::move(e2c));
        auto o1c = std::make_unique<SyncedConnection>(o1_listener->accept());
        links.push_back(o1c.get());
        ric.attach_o1(std::move(o1c));
      }
      RemotePort port(std::move(ctrl), links);
      pump(scenario, ric, port);
      summary = port.finish();
    } catch (...) {
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      throw;
    }
    ::waitpid(pid, &status, 0);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      fail(Errc::invariant_violation, "RAN process exited abnormally");
    }
  }

  auto report = ric.report(summary, config.seed);
  ric.write_outputs(report);
  return report;
}

}  // namespace oran::harness
