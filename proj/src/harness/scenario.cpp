#include "oran/harness/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "oran/common/error.hpp"
#include "oran/xapps/slicing.hpp"

namespace oran::harness {

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void invalid(const YAML::Node& at, const std::string& field, const std::string& why) const {
    const auto line = at.IsDefined() && at.Mark().line >= 0 ? at.Mark().line + 1 : 0;
    fail(Errc::scenario_invalid, source_ + ":" + std::to_string(line) + ": " + field + ": " + why);
  }

  void only_keys(const YAML::Node& map, const std::string& field, std::initializer_list<const char*> allowed) const {
    if (!map.IsMap()) invalid(map, field, "expected a mapping");
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
        invalid(kv.first, field.empty() ? key : field + "." + key, "unknown key");
      }
    }
  }

  template <typename T>
  T get(const YAML::Node& map, const char* key, const std::string& field, T fallback) const {
    const auto n = map[key];
    if (!n.IsDefined() || n.IsNull()) return fallback;
    return as<T>(n, join(field, key));
  }

  template <typename T>
  T require(const YAML::Node& map, const char* key, const std::string& field) const {
    const auto n = map[key];
    if (!n.IsDefined() || n.IsNull()) invalid(map, join(field, key), "missing");
    return as<T>(n, join(field, key));
  }

  template <typename T>
  T as(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) invalid(n, field, "expected a scalar");
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      invalid(n, field, "cannot read '" + n.Scalar() + "'");
    }
  }

  static std::string join(const std::string& field, const std::string& key) {
    return field.empty() ? key : field + "." + key;
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

nlohmann::json to_json(const YAML::Node& n) {
  if (n.IsMap()) {
    auto out = nlohmann::json::object();
    for (const auto& kv : n) out[kv.first.as<std::string>()] = to_json(kv.second);
    return out;
  }
  if (n.IsSequence()) {
    auto out = nlohmann::json::array();
    for (const auto& e : n) out.push_back(to_json(e));
    return out;
  }
  if (!n.IsScalar()) return nullptr;
  const auto& s = n.Scalar();
  if (n.Tag() == "!") return s;  // quoted
  std::int64_t i = 0;
  if (auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), i); ec == std::errc() && p == s.data() + s.size()) {
    return i;
  }
  double d = 0;
  if (auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d); ec == std::errc() && p == s.data() + s.size()) {
    return d;
  }
  if (s == "true") return true;
  if (s == "false") return false;
  return s;
}

sim::Vec2 read_vec(const Reader& r, const YAML::Node& n, const std::string& field) {
  if (!n.IsSequence() || n.size() != 2) r.invalid(n, field, "expected [x, y]");
  return {r.as<double>(n[0], field + "[0]"), r.as<double>(n[1], field + "[1]")};
}

e2sm::SchedulerKind read_scheduler(const Reader& r, const YAML::Node& n, const std::string& field) {
  const auto s = r.as<std::string>(n, field);
  for (auto k : {e2sm::SchedulerKind::round_robin, e2sm::SchedulerKind::highest_buffer_first}) {
    if (e2sm::to_string(k) == s) return k;
  }
  r.invalid(n, field, "unknown scheduler '" + s + "'");
}

void read_objectives(const Reader& r, const YAML::Node& n, SlicingObjectives& o) {
  r.only_keys(n, "objectives",
              {"urllc_max_latency_ms", "embb_min_bytes_per_s", "mmtc_min_packets", "window_ms", "priority"});
  o.urllc_max_latency_ms = r.get(n, "urllc_max_latency_ms", "objectives", o.urllc_max_latency_ms);
  o.embb_min_bytes_per_s = r.get(n, "embb_min_bytes_per_s", "objectives", o.embb_min_bytes_per_s);
  o.mmtc_min_packets = r.get(n, "mmtc_min_packets", "objectives", o.mmtc_min_packets);
  o.window_ms = r.get(n, "window_ms", "objectives", o.window_ms);
  if (o.window_ms <= 0) r.invalid(n["window_ms"], "objectives.window_ms", "must be positive");
  if (const auto p = n["priority"]; p.IsDefined()) {
    if (!p.IsSequence()) r.invalid(p, "objectives.priority", "expected a list of slice ids");
    o.priority.clear();
    for (std::size_t i = 0; i < p.size(); ++i) {
      o.priority.push_back(r.as<std::uint32_t>(p[i], "objectives.priority[" + std::to_string(i) + "]"));
    }
  }
}

sim::CellConfig read_cell(const Reader& r, const YAML::Node& n, const std::string& field) {
  r.only_keys(n, field, {"id", "global_id", "total_prb", "position", "a3_offset_db", "slices"});
  sim::CellConfig c;
  c.cell_id = r.require<std::uint32_t>(n, "id", field);
  c.global_id = r.get<std::uint64_t>(n, "global_id", field, 0x1000 + c.cell_id);
  c.total_prb = r.get<std::uint32_t>(n, "total_prb", field, 50);
  if (n["position"].IsDefined()) c.position = read_vec(r, n["position"], field + ".position");
  c.a3_offset_db = r.get<double>(n, "a3_offset_db", field, 3.0);
  const auto slices = n["slices"];
  if (!slices.IsDefined()) {
    c.slices = {{0, SliceKind::urllc, 20, e2sm::SchedulerKind::round_robin},
                {1, SliceKind::embb, 20, e2sm::SchedulerKind::round_robin},
                {2, SliceKind::mmtc, 10, e2sm::SchedulerKind::round_robin}};
  } else {
    if (!slices.IsSequence() || slices.size() == 0) r.invalid(slices, field + ".slices", "expected a non-empty list");
    for (std::size_t i = 0; i < slices.size(); ++i) {
      const auto sf = field + ".slices[" + std::to_string(i) + "]";
      const auto s = slices[i];
      r.only_keys(s, sf, {"id", "kind", "dedicated_prb", "scheduler"});
      sim::SliceConfig sc;
      sc.slice_id = r.require<std::uint32_t>(s, "id", sf);
      const auto kind = r.require<std::string>(s, "kind", sf);
      if (!parse_slice_kind(kind, sc.kind)) r.invalid(s["kind"], sf + ".kind", "unknown slice kind '" + kind + "'");
      sc.dedicated_prb = r.get<std::uint32_t>(s, "dedicated_prb", sf, 0);
      if (s["scheduler"].IsDefined()) sc.scheduler = read_scheduler(r, s["scheduler"], sf + ".scheduler");
      if (std::any_of(c.slices.begin(), c.slices.end(), [&](const auto& x) { return x.slice_id == sc.slice_id; })) {
        r.invalid(s["id"], sf + ".id", "duplicate slice id");
      }
      c.slices.push_back(sc);
    }
  }
  std::uint64_t sum = 0;
  for (const auto& s : c.slices) sum += s.dedicated_prb;
  if (sum > c.total_prb) r.invalid(n, field + ".slices", "dedicated PRBs exceed total_prb");
  return c;
}

sim::TrafficSegment read_traffic(const Reader& r, const YAML::Node& n, const std::string& field) {
  r.only_keys(n, field, {"from_ms", "kind", "rate_bytes_per_ms", "burst_bytes", "period_ms"});
  sim::TrafficSegment t;
  t.from_ms = r.get<TimeMs>(n, "from_ms", field, 0);
  const auto kind = r.require<std::string>(n, "kind", field);
  if (kind == "constant") {
    t.kind = sim::TrafficKind::constant;
  } else if (kind == "poisson") {
    t.kind = sim::TrafficKind::poisson;
  } else if (kind == "periodic") {
    t.kind = sim::TrafficKind::periodic;
  } else {
    r.invalid(n["kind"], field + ".kind", "unknown traffic kind '" + kind + "'");
  }
  t.rate_bytes_per_ms = r.get<double>(n, "rate_bytes_per_ms", field, 0.0);
  t.burst_bytes = r.get<std::uint64_t>(n, "burst_bytes", field, 0);
  t.period_ms = r.get<TimeMs>(n, "period_ms", field, 1);
  if (t.rate_bytes_per_ms < 0) r.invalid(n["rate_bytes_per_ms"], field + ".rate_bytes_per_ms", "must not be negative");
  if (t.period_ms <= 0) r.invalid(n["period_ms"], field + ".period_ms", "must be positive");
  return t;
}

sim::UeConfig read_ue(const Reader& r, const YAML::Node& n, const std::string& field) {
  r.only_keys(n, field, {"id", "cell", "slice", "position", "path", "traffic"});
  sim::UeConfig u;
  u.ue_id = r.require<std::uint64_t>(n, "id", field);
  u.serving_cell = r.require<std::uint32_t>(n, "cell", field);
  u.slice_id = r.require<std::uint32_t>(n, "slice", field);
  if (n["position"].IsDefined()) u.path.push_back({0, read_vec(r, n["position"], field + ".position")});
  if (const auto path = n["path"]; path.IsDefined()) {
    if (!u.path.empty()) r.invalid(path, field + ".path", "give either position or path");
    if (!path.IsSequence()) r.invalid(path, field + ".path", "expected a list of waypoints");
    for (std::size_t i = 0; i < path.size(); ++i) {
      const auto wf = field + ".path[" + std::to_string(i) + "]";
      r.only_keys(path[i], wf, {"at_ms", "position"});
      sim::Waypoint w;
      w.at = r.require<TimeMs>(path[i], "at_ms", wf);
      w.position = read_vec(r, path[i]["position"], wf + ".position");
      if (!u.path.empty() && w.at <= u.path.back().at) r.invalid(path[i], wf + ".at_ms", "waypoints must be increasing");
      u.path.push_back(w);
    }
  }
  if (const auto traffic = n["traffic"]; traffic.IsDefined()) {
    if (!traffic.IsSequence()) r.invalid(traffic, field + ".traffic", "expected a list of segments");
    for (std::size_t i = 0; i < traffic.size(); ++i) {
      auto seg = read_traffic(r, traffic[i], field + ".traffic[" + std::to_string(i) + "]");
      if (!u.traffic.empty() && seg.from_ms <= u.traffic.back().from_ms) {
        r.invalid(traffic[i], field + ".traffic[" + std::to_string(i) + "].from_ms", "segments must be increasing");
      }
      u.traffic.push_back(seg);
    }
  }
  return u;
}

PolicyInjection read_injection(const Reader& r, const YAML::Node& n, const std::string& field) {
  r.only_keys(n, field, {"at_ms", "op", "policy", "policy_id"});
  PolicyInjection p;
  p.at_ms = r.require<TimeMs>(n, "at_ms", field);
  p.op = r.require<std::string>(n, "op", field);
  if (p.op == "create" || p.op == "update") {
    if (!n["policy"].IsDefined()) r.invalid(n, field + ".policy", "missing");
    try {
      p.policy = a1::policy_from_json(to_json(n["policy"]));
      a1::validate(*p.policy);
    } catch (const Error& e) {
      r.invalid(n["policy"], field + ".policy", e.what());
    }
    p.policy_id = p.policy->policy_id;
  } else if (p.op == "delete") {
    p.policy_id = r.require<std::string>(n, "policy_id", field);
  } else {
    r.invalid(n["op"], field + ".op", "expected create, update or delete");
  }
  return p;
}

}  // namespace

const std::vector<std::string>& known_xapps() {
  static const std::vector<std::string> names = {"kpm-monitor", "slicing-control", "scheduling-control",
                                                 "handover-control"};
  return names;
}

Scenario parse_scenario(const std::string& yaml, const std::string& source, const std::string& catalog_dir) {
  const Reader r(source);
  YAML::Node root;
  try {
    root = YAML::Load(yaml);
  } catch (const YAML::ParserException& e) {
    fail(Errc::scenario_invalid, source + ":" + std::to_string(e.mark.line + 1) + ": yaml: " + e.msg);
  }
  r.only_keys(root, "",
              {"name", "seed", "duration_ms", "warmup_ms", "tick_ms", "bytes_per_prb", "packet_bytes", "p0_dbm",
               "path_loss_exponent", "insert_timeout_action", "insert_backoff_ms", "pm_interval_ms",
               "heartbeat_period_ms", "objectives", "nodes", "ues", "xapps", "policies", "forecast", "model_id"});
  Scenario s;
  s.source = source;
  s.name = r.get<std::string>(root, "name", "", std::filesystem::path(source).stem().string());
  s.duration_ms = r.require<TimeMs>(root, "duration_ms", "");
  auto& c = s.sim;
  c.seed = r.get<std::uint64_t>(root, "seed", "", 1);
  c.warmup_ms = r.get<TimeMs>(root, "warmup_ms", "", c.warmup_ms);
  c.tick_ms = r.get<TimeMs>(root, "tick_ms", "", c.tick_ms);
  if (c.tick_ms != 1) r.invalid(root["tick_ms"], "tick_ms", "only 1 ms ticks are supported");
  c.bytes_per_prb = r.get<std::uint32_t>(root, "bytes_per_prb", "", c.bytes_per_prb);
  c.packet_bytes = r.get<std::uint32_t>(root, "packet_bytes", "", c.packet_bytes);
  if (c.bytes_per_prb == 0) r.invalid(root["bytes_per_prb"], "bytes_per_prb", "must be positive");
  if (c.packet_bytes == 0) r.invalid(root["packet_bytes"], "packet_bytes", "must be positive");
  c.p0_dbm = r.get<double>(root, "p0_dbm", "", c.p0_dbm);
  c.path_loss_exponent = r.get<double>(root, "path_loss_exponent", "", c.path_loss_exponent);
  const auto on_timeout = r.get<std::string>(root, "insert_timeout_action", "", "execute");
  if (on_timeout == "execute") {
    c.on_insert_timeout = sim::InsertTimeoutAction::execute;
  } else if (on_timeout == "abort") {
    c.on_insert_timeout = sim::InsertTimeoutAction::abort;
  } else {
    r.invalid(root["insert_timeout_action"], "insert_timeout_action", "expected execute or abort");
  }
  c.insert_backoff_ms = r.get<TimeMs>(root, "insert_backoff_ms", "", c.insert_backoff_ms);
  c.pm_interval_ms = r.get<TimeMs>(root, "pm_interval_ms", "", c.pm_interval_ms);
  c.heartbeat_period_ms = r.get<TimeMs>(root, "heartbeat_period_ms", "", c.heartbeat_period_ms);
  if (c.pm_interval_ms <= 0) r.invalid(root["pm_interval_ms"], "pm_interval_ms", "must be positive");
  if (c.heartbeat_period_ms <= 0) r.invalid(root["heartbeat_period_ms"], "heartbeat_period_ms", "must be positive");
  if (s.duration_ms <= c.warmup_ms) r.invalid(root["duration_ms"], "duration_ms", "must exceed warmup_ms");
  if (const auto o = root["objectives"]; o.IsDefined()) read_objectives(r, o, c.objectives);

  const auto nodes = root["nodes"];
  if (!nodes.IsDefined() || !nodes.IsSequence() || nodes.size() == 0) {
    r.invalid(nodes.IsDefined() ? nodes : root, "nodes", "expected a non-empty list");
  }
  std::set<std::uint32_t> cell_ids;
  std::set<std::string> node_ids;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto nf = "nodes[" + std::to_string(i) + "]";
    r.only_keys(nodes[i], nf, {"id", "cells"});
    sim::NodeConfig node;
    node.node_id = r.require<std::string>(nodes[i], "id", nf);
    if (!node_ids.insert(node.node_id).second) r.invalid(nodes[i]["id"], nf + ".id", "duplicate node id");
    const auto cells = nodes[i]["cells"];
    if (!cells.IsDefined() || !cells.IsSequence() || cells.size() == 0) {
      r.invalid(cells.IsDefined() ? cells : nodes[i], nf + ".cells", "expected a non-empty list");
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const auto cf = nf + ".cells[" + std::to_string(j) + "]";
      auto cell = read_cell(r, cells[j], cf);
      if (!cell_ids.insert(cell.cell_id).second) r.invalid(cells[j]["id"], cf + ".id", "duplicate cell id");
      node.cells.push_back(std::move(cell));
    }
    c.nodes.push_back(std::move(node));
  }

  if (const auto ues = root["ues"]; ues.IsDefined()) {
    if (!ues.IsSequence()) r.invalid(ues, "ues", "expected a list");
    std::set<std::uint64_t> ue_ids;
    for (std::size_t i = 0; i < ues.size(); ++i) {
      const auto uf = "ues[" + std::to_string(i) + "]";
      auto u = read_ue(r, ues[i], uf);
      if (!ue_ids.insert(u.ue_id).second) r.invalid(ues[i]["id"], uf + ".id", "duplicate ue id");
      const sim::CellConfig* cell = nullptr;
      for (const auto& n : c.nodes) {
        for (const auto& cc : n.cells) {
          if (cc.cell_id == u.serving_cell) cell = &cc;
        }
      }
      if (!cell) r.invalid(ues[i]["cell"], uf + ".cell", "no cell " + std::to_string(u.serving_cell));
      if (std::none_of(cell->slices.begin(), cell->slices.end(),
                       [&](const auto& sl) { return sl.slice_id == u.slice_id; })) {
        r.invalid(ues[i]["slice"], uf + ".slice",
                  "cell " + std::to_string(u.serving_cell) + " has no slice " + std::to_string(u.slice_id));
      }
      if (u.path.empty()) u.path.push_back({0, cell->position});
      c.ues.push_back(std::move(u));
    }
  }

  if (const auto xs = root["xapps"]; xs.IsDefined()) {
    if (!xs.IsSequence()) r.invalid(xs, "xapps", "expected a list");
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const auto xf = "xapps[" + std::to_string(i) + "]";
      XappSpec x;
      if (xs[i].IsScalar()) {
        x.name = r.as<std::string>(xs[i], xf);
      } else {
        r.only_keys(xs[i], xf, {"name", "overrides"});
        x.name = r.require<std::string>(xs[i], "name", xf);
        if (const auto o = xs[i]["overrides"]; o.IsDefined()) {
          if (!o.IsMap()) r.invalid(o, xf + ".overrides", "expected a mapping");
          for (const auto& kv : o) x.overrides[kv.first.as<std::string>()] = r.as<std::string>(kv.second, xf + ".overrides");
        }
      }
      const auto& names = known_xapps();
      if (std::find(names.begin(), names.end(), x.name) == names.end()) {
        r.invalid(xs[i], xf + ".name", "unknown xApp '" + x.name + "'");
      }
      if (std::any_of(s.xapps.begin(), s.xapps.end(), [&](const auto& y) { return y.name == x.name; })) {
        r.invalid(xs[i], xf + ".name", "deployed twice");
      }
      s.xapps.push_back(std::move(x));
    }
  }

  if (const auto ps = root["policies"]; ps.IsDefined()) {
    if (!ps.IsSequence()) r.invalid(ps, "policies", "expected a list");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      auto p = read_injection(r, ps[i], "policies[" + std::to_string(i) + "]");
      if (p.at_ms < 0 || p.at_ms > s.duration_ms) {
        r.invalid(ps[i]["at_ms"], "policies[" + std::to_string(i) + "].at_ms", "outside the run");
      }
      s.policies.push_back(std::move(p));
    }
    std::stable_sort(s.policies.begin(), s.policies.end(),
                     [](const auto& a, const auto& b) { return a.at_ms < b.at_ms; });
  }

  if (const auto f = root["forecast"]; f.IsDefined()) {
    r.only_keys(f, "forecast", {"enabled", "window", "horizon_ms"});
    s.forecast.enabled = r.get<bool>(f, "enabled", "forecast", true);
    s.forecast.window = r.get<std::size_t>(f, "window", "forecast", s.forecast.window);
    s.forecast.horizon_ms = r.get<TimeMs>(f, "horizon_ms", "forecast", s.forecast.horizon_ms);
    if (s.forecast.window == 0) r.invalid(f["window"], "forecast.window", "must be positive");
    if (s.forecast.horizon_ms <= 0) r.invalid(f["horizon_ms"], "forecast.horizon_ms", "must be positive");
  }

  if (const auto m = root["model_id"]; m.IsDefined()) {
    s.model_id = r.as<std::string>(m, "model_id");
    if (std::none_of(s.xapps.begin(), s.xapps.end(), [](const auto& x) { return x.name == "slicing-control"; })) {
      r.invalid(m, "model_id", "needs slicing-control among the xapps");
    }
    const auto dir = std::filesystem::path(catalog_dir) / *s.model_id;
    try {
      xapps::load_deployable_model(dir.string());
    } catch (const Error& e) {
      r.invalid(m, "model_id", "model " + *s.model_id + " is not published in " + catalog_dir + " (" + e.what() + ")");
    }
  }
  return s;
}

Scenario load_scenario(const std::string& path, const std::string& catalog_dir) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::scenario_invalid, path + ":0: file: cannot read");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path, catalog_dir);
}

}  // namespace oran::harness
