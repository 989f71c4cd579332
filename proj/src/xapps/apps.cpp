#include "oran/xapps/apps.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "oran/common/error.hpp"
#include "oran/e2sm/service_model.hpp"
#include "oran/common/measurement.hpp"

namespace oran::xapps {

using nlohmann::json;

namespace {

std::string param(const ric::XappDescriptor& d, const std::string& key, const std::string& fallback) {
  auto it = d.params.find(key);
  return it == d.params.end() ? fallback : it->second;
}

bool has_function(const ric::RnibEntry& node, std::string_view prefix, std::uint32_t& id) {
  for (const auto& f : node.functions) {
    if (f.name.starts_with(prefix)) {
      id = f.function_id;
      return true;
    }
  }
  return false;
}

std::optional<json> topic_value(ric::XappContext& ctx, const char* name) {
  auto v = ctx.sdl_get(ric::ns::topic(name), "latest");
  if (!v) return std::nullopt;
  auto j = json::parse(*v, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  return j;
}

/// Forecast payload of topic A, if present and well formed.
std::optional<a1::Forecast> read_forecast(ric::XappContext& ctx) {
  auto j = topic_value(ctx, topic::forecast);
  if (!j || !j->contains("payload")) return std::nullopt;
  try {
    return a1::forecast_from_json((*j)["payload"]);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::string scheduler_name(e2sm::SchedulerKind k) { return std::string(e2sm::to_string(k)); }

}  // namespace

std::vector<std::string> subscribe_kpm_everywhere(ric::XappContext& ctx, std::set<std::string>& done,
                                                  std::uint32_t period_ms, const std::vector<std::string>& metrics) {
  std::vector<std::string> out;
  for (const auto& node : ctx.nodes()) {
    std::uint32_t fn = 0;
    if (!node.connected || done.count(node.node_id) || !has_function(node, "ORAN-E2SM-KPM", fn)) continue;
    std::vector<e2::RicAction> actions{
        {1, e2::ActionType::report,
         e2sm::sm_encode(e2sm::KpmActionDefinition{e2sm::NodeKind::du, e2sm::KpmScope::node(), metrics}),
         std::nullopt}};
    ctx.subscribe(node.node_id, fn, e2sm::sm_encode(e2sm::KpmEventTrigger{period_ms}), std::move(actions));
    done.insert(node.node_id);
    out.push_back(node.node_id);
  }
  return out;
}

std::optional<e2sm::KpmIndication> decode_kpm(const e2::Indication& ind) {
  if (ind.indication_type != e2::IndicationType::report) return std::nullopt;
  try {
    return e2sm::KpmIndication{e2sm::sm_decode_as<e2sm::KpmIndicationHeader>(ind.header),
                               e2sm::sm_decode_as<e2sm::KpmIndicationMessage>(ind.message).records};
  } catch (const Error&) {
    return std::nullopt;
  }
}

// --- kpm-monitor -------------------------------------------------------

KpmMonitor::KpmMonitor(const ric::XappDescriptor& d)
    : period_ms_(static_cast<std::uint32_t>(std::stoul(param(d, "report_period_ms", "100")))),
      window_ms_(std::stoll(param(d, "window_ms", "60000"))),
      csv_(std::string(kMeasurementCsvHeader) + "\n") {}

std::string KpmMonitor::key(const std::string& node, const e2sm::KpmScope& scope, const std::string& metric) {
  return node + "|" + e2sm::to_string(scope) + "|" + metric;
}

void KpmMonitor::on_start(ric::XappContext& ctx) {
  subscribe_kpm_everywhere(ctx, subscribed_, period_ms_, e2sm::metric_catalog(e2sm::NodeKind::du));
}

void KpmMonitor::on_tick(ric::XappContext& ctx) {
  subscribe_kpm_everywhere(ctx, subscribed_, period_ms_, e2sm::metric_catalog(e2sm::NodeKind::du));
  flush();
}

void KpmMonitor::on_indication(ric::XappContext& ctx, const ric::IndicationEvent& e) {
  const auto ind = decode_kpm(e.indication);
  if (!ind) return;
  const auto now = ctx.now();
  std::set<std::string> touched;
  json latest = json::array();
  for (const auto& r : ind->records) {
    const auto k = key(e.node_id, r.scope, r.metric);
    auto& w = window_[k];
    w.emplace_back(r.timestamp, r.value);
    while (!w.empty() && w.front().first < now - window_ms_) w.pop_front();
    touched.insert(k);
    if (r.scope.kind == e2sm::KpmScope::Kind::slice) {
      pending_rows_.push_back(std::to_string(r.timestamp) + "," + e.node_id + "," + std::to_string(r.scope.cell_id) +
                              "," + std::to_string(r.scope.slice_id) + "," + r.metric + "," + format_double(r.value));
      latest.push_back({{"node", e.node_id},
                        {"cell", r.scope.cell_id},
                        {"slice", r.scope.slice_id},
                        {"metric", r.metric},
                        {"value", r.value}});
    }
  }
  for (const auto& k : touched) {
    std::string v;
    for (const auto& [t, x] : window_[k]) v += std::to_string(t) + ":" + format_double(x) + ";";
    ctx.sdl_put(k, std::move(v));
  }
  if (!latest.empty()) {
    ctx.publish(topic::kpm, json{{"epoch", now}, {"node", e.node_id}, {"rows", latest}}.dump());
  }
}

void KpmMonitor::flush() {
  for (const auto& row : pending_rows_) csv_ += row + "\n";
  pending_rows_.clear();
}

std::size_t KpmMonitor::stored_records() const {
  std::size_t n = 0;
  for (const auto& [k, w] : window_) n += w.size();
  return n;
}

// --- slicing-control ---------------------------------------------------

bool apply_policy(const a1::Policy& policy, std::uint32_t capacity, SlicingStatus& status) {
  if (policy.scope.kind != a1::PolicyScope::Kind::slice) return false;
  const auto slice = policy.scope.slice_id;
  bool used = false;
  for (const auto& st : policy.statements) {
    if (st.kind == a1::PolicyStatement::Kind::objective) {
      auto& obj = status.objectives;
      if (st.name == e2sm::metric::latency_proxy_ms) {
        obj.urllc_max_latency_ms = st.value;
      } else if (st.name == "throughput_bytes_per_s") {
        obj.embb_min_bytes_per_s = st.value;
      } else if (st.name == e2sm::metric::tx_packets) {
        obj.mmtc_min_packets = st.value;
      } else {
        continue;
      }
      used = true;
      // a slice named by an objective policy moves to the front
      auto& prio = obj.priority;
      prio.erase(std::remove(prio.begin(), prio.end(), slice), prio.end());
      prio.insert(prio.begin(), slice);
    } else {
      const auto ratio_prb = [&](double r) { return static_cast<std::uint32_t>(std::lround(r * capacity)); };
      if (st.name == "dedicated_prb" || st.name == "min_prb_ratio") {
        const auto prb = st.name == "dedicated_prb" ? static_cast<std::uint32_t>(st.value) : ratio_prb(st.value);
        status.floor_prb[slice] = std::min(prb, capacity);
        used = true;
      } else if (st.name == "max_prb_ratio") {
        status.cap_prb[slice] = std::min(ratio_prb(st.value), capacity);
        used = true;
      }
    }
  }
  return used;
}

SlicingControl::SlicingControl(const ric::XappDescriptor& d)
    : capacity_(static_cast<std::uint32_t>(std::stoul(param(d, "capacity", "50")))) {
  if (!d.model_path.empty()) {
    model_ = load_deployable_model(d.model_path, std::stod(param(d, "model_threshold", "0.95")));
    status_.model_id = model_->model_id;
  }
}

void SlicingControl::on_start(ric::XappContext& ctx) {
  subscribe_kpm_everywhere(ctx, subscribed_, static_cast<std::uint32_t>(ctx.descriptor().loop_period_ms),
                           {std::string(e2sm::metric::prb_requested)});
  for (const auto& id : ctx.sdl_keys(ric::ns::topic(topic::policies))) {
    on_data(ctx, {ric::ns::topic(topic::policies), id, ctx.sdl_get(ric::ns::topic(topic::policies), id), 0});
  }
  ctx.log("started with " + status_.model_id);
}

void SlicingControl::on_indication(ric::XappContext& ctx, const ric::IndicationEvent& e) {
  const auto ind = decode_kpm(e.indication);
  if (!ind) return;
  for (const auto& r : ind->records) {
    if (r.metric != e2sm::metric::prb_requested || r.scope.kind != e2sm::KpmScope::Kind::slice) continue;
    auto& n = slices_[{e.node_id, r.scope.cell_id}];
    n = std::max(n, r.scope.slice_id + 1);
    ctx.sdl_put("demand/" + e.node_id + "/" + std::to_string(r.scope.cell_id) + "/" + std::to_string(r.scope.slice_id),
                format_double(r.value));
  }
}

PrbVector SlicingControl::demand(ric::XappContext& ctx, const std::string& node, std::uint32_t cell) const {
  const auto it = slices_.find({node, cell});
  const std::size_t n = it == slices_.end() ? 0 : it->second;
  PrbVector d(n, 0);
  const auto forecast = read_forecast(ctx);
  for (std::size_t s = 0; s < n; ++s) {
    const auto v = ctx.sdl_get(ric::ns::xapp(ctx.descriptor().name),
                               "demand/" + node + "/" + std::to_string(cell) + "/" + std::to_string(s));
    double x = v ? std::stod(*v) : 0.0;
    if (forecast && s < forecast->demand_prb.size()) x = std::max(x, forecast->demand_prb[s]);
    auto prb = static_cast<std::uint32_t>(std::min<double>(std::ceil(x - 1e-9), capacity_));
    if (auto f = status_.floor_prb.find(static_cast<std::uint32_t>(s)); f != status_.floor_prb.end()) {
      prb = std::max(prb, f->second);
    }
    if (auto c = status_.cap_prb.find(static_cast<std::uint32_t>(s)); c != status_.cap_prb.end()) {
      prb = std::min(prb, c->second);
    }
    d[s] = prb;
  }
  return d;
}

void SlicingControl::on_tick(ric::XappContext& ctx) {
  ++status_.ticks;
  subscribe_kpm_everywhere(ctx, subscribed_, static_cast<std::uint32_t>(ctx.descriptor().loop_period_ms),
                           {std::string(e2sm::metric::prb_requested)});
  json cells = json::array();
  for (const auto& [where, n] : slices_) {
    auto decision = decide_allocation(demand(ctx, where.first, where.second), capacity_, status_.objectives,
                                      model_ ? &*model_ : nullptr);
    decision.cell_id = where.second;
    decision.epoch = ctx.now();
    cells.push_back({{"node", where.first}, {"cell", where.second}, {"dedicated_prb", decision.dedicated_prb}});

    const auto applied = status_.applied.find(where);
    if (applied != status_.applied.end() && applied->second.dedicated_prb == decision.dedicated_prb) continue;
    const bool in_flight = std::any_of(inflight_.begin(), inflight_.end(), [&](const auto& kv) {
      return kv.second.first == where && kv.second.second.dedicated_prb == decision.dedicated_prb;
    });
    if (in_flight) continue;
    std::vector<e2sm::RcControl> controls;
    for (std::uint32_t s = 0; s < decision.dedicated_prb.size(); ++s) {
      controls.push_back({e2sm::SlicePrbQuota{where.second, s, decision.dedicated_prb[s], 0.0, 1.0}});
    }
    const auto ticket = ctx.submit_control(where.first, std::move(controls));
    inflight_[ticket] = {where, decision};
    ++status_.submitted;
  }
  ctx.publish(topic::slicing, json{{"epoch", ctx.now()}, {"model", status_.model_id}, {"cells", cells}}.dump());
}

void SlicingControl::on_control_outcome(ric::XappContext& ctx, const ric::ControlOutcome& o) {
  auto it = inflight_.find(o.ticket);
  if (it == inflight_.end()) return;
  if (o.kind == ric::ControlOutcome::Kind::acknowledged) {
    status_.applied[it->second.first] = it->second.second;
  } else {
    ++status_.rejected;
    ctx.log("quota for cell " + std::to_string(it->second.first.second) + " not applied (" +
            std::string(ric::to_string(o.kind)) + (o.holder.empty() ? "" : ", held by " + o.holder) +
            "), retrying next tick");
  }
  inflight_.erase(it);
}

void SlicingControl::on_data(ric::XappContext& ctx, const ric::SdlChange& c) {
  if (c.ns != ric::ns::topic(topic::policies)) return;
  if (!c.value) {
    if (policies_.erase(c.key) == 0) return;
    // without the policy the loop falls back to default objectives and the
    // baseline allocator
    if (model_) {
      ctx.log("policy " + c.key + " deleted, dropping model " + model_->model_id);
      model_.reset();
      status_.model_id = "baseline";
    }
    recompute_objectives(ctx);
    return;
  }
  try {
    policies_[c.key] = a1::policy_from_json(json::parse(*c.value));
  } catch (const std::exception& e) {
    ctx.log("ignoring policy " + c.key + ": " + e.what());
    return;
  }
  recompute_objectives(ctx);
}

void SlicingControl::recompute_objectives(ric::XappContext& ctx) {
  status_.objectives = SlicingObjectives{};
  status_.floor_prb.clear();
  status_.cap_prb.clear();
  status_.policies.clear();
  for (const auto& [id, p] : policies_) {
    const bool enforced = apply_policy(p, capacity_, status_);
    if (enforced) status_.policies.insert(id);
    ctx.ack_policy(id, enforced);
  }
}

// --- scheduling-control ------------------------------------------------

std::vector<e2sm::SchedulerKind> decide_policy(const std::vector<double>& load, const PrbVector& quota,
                                               double threshold) {
  std::vector<e2sm::SchedulerKind> out(quota.size(), e2sm::SchedulerKind::round_robin);
  for (std::size_t s = 0; s < quota.size(); ++s) {
    const double l = s < load.size() ? load[s] : 0.0;
    if (l > threshold * quota[s]) out[s] = e2sm::SchedulerKind::highest_buffer_first;
  }
  return out;
}

SchedulingControl::SchedulingControl(const ric::XappDescriptor& d)
    : threshold_(std::stod(param(d, "hbf_threshold", "0.8"))) {}

void SchedulingControl::on_tick(ric::XappContext& ctx) {
  const auto c = topic_value(ctx, topic::slicing);
  if (!c || !c->contains("cells")) {
    ++deferred_;
    return;
  }
  const auto forecast = read_forecast(ctx);
  const auto b = topic_value(ctx, topic::kpm);
  json cells = json::array();
  for (const auto& cell : (*c)["cells"]) {
    const auto node = cell["node"].get<std::string>();
    const auto cell_id = cell["cell"].get<std::uint32_t>();
    const auto quota = cell["dedicated_prb"].get<PrbVector>();
    std::vector<double> load(quota.size(), 0.0);
    if (forecast) {
      for (std::size_t s = 0; s < load.size() && s < forecast->demand_prb.size(); ++s) load[s] = forecast->demand_prb[s];
    } else if (b && b->value("node", "") == node) {
      for (const auto& r : (*b)["rows"]) {
        const auto s = r["slice"].get<std::size_t>();
        if (r["cell"] == cell_id && r["metric"] == e2sm::metric::prb_requested && s < load.size()) {
          load[s] = r["value"].get<double>();
        }
      }
    }
    const auto kinds = decide_policy(load, quota, threshold_);
    json names = json::array();
    for (auto k : kinds) names.push_back(scheduler_name(k));
    cells.push_back({{"node", node}, {"cell", cell_id}, {"schedulers", names}});

    const std::pair key{node, cell_id};
    if (installed_.count(key) && installed_[key] == kinds) continue;
    if (std::any_of(inflight_.begin(), inflight_.end(),
                    [&](const auto& kv) { return kv.second.first == key && kv.second.second == kinds; })) {
      continue;
    }
    std::vector<e2sm::RcControl> controls;
    for (std::uint32_t s = 0; s < kinds.size(); ++s) {
      controls.push_back({e2sm::ControlPolicy{{std::string(e2sm::metric::buffer_bytes), e2sm::Comparator::ge, 0.0},
                                              e2sm::RcControl{e2sm::SliceScheduler{cell_id, s, kinds[s]}}}});
    }
    inflight_[ctx.submit_control(node, std::move(controls))] = {key, kinds};
  }
  const auto c_epoch = (*c)["epoch"].get<TimeMs>();
  history_.push_back({ctx.now(), c_epoch});
  ctx.publish(topic::scheduling, json{{"epoch", ctx.now()}, {"c_epoch", c_epoch}, {"cells", cells}}.dump());
}

void SchedulingControl::on_control_outcome(ric::XappContext& ctx, const ric::ControlOutcome& o) {
  auto it = inflight_.find(o.ticket);
  if (it == inflight_.end()) return;
  if (o.kind == ric::ControlOutcome::Kind::acknowledged) {
    installed_[it->second.first] = it->second.second;
  } else {
    ctx.log("scheduling profile not installed: " + std::string(ric::to_string(o.kind)));
  }
  inflight_.erase(it);
}

// --- handover-control --------------------------------------------------

HandoverControl::HandoverControl(const ric::XappDescriptor& d)
    : min_gain_db_(std::stod(param(d, "min_gain_db", "0"))), ttw_(e2::TimeToWait::w10ms) {
  const auto name = param(d, "time_to_wait", "w10ms");
  bool found = false;
  for (int i = 0; i < e2::kTimeToWaitCount; ++i) {
    const auto t = static_cast<e2::TimeToWait>(i);
    if (e2::to_string(t) == name) {
      ttw_ = t;
      found = true;
    }
  }
  if (!found) fail(Errc::parse_error, "unknown time_to_wait '" + name + "'");
}

void HandoverControl::subscribe(ric::XappContext& ctx) {
  for (const auto& node : ctx.nodes()) {
    std::uint32_t fn = 0;
    if (!node.connected || subscribed_.count(node.node_id) || !has_function(node, "ORAN-E2SM-RC", fn)) continue;
    std::vector<e2::RicAction> actions{
        {1, e2::ActionType::insert,
         e2sm::sm_encode(e2sm::RcActionDefinition{e2sm::RcDomain::connected_mobility, {}}),
         e2::SubsequentAction{e2::SubsequentActionType::wait, ttw_}}};
    ctx.subscribe(node.node_id, fn, e2sm::sm_encode(e2sm::RcEventTrigger{}), std::move(actions));
    subscribed_.insert(node.node_id);
  }
}

void HandoverControl::on_start(ric::XappContext& ctx) { subscribe(ctx); }
void HandoverControl::on_tick(ric::XappContext& ctx) { subscribe(ctx); }

void HandoverControl::on_insert(ric::XappContext& ctx, const ric::InsertEvent& e) {
  const auto& ins = e.insert;
  std::optional<std::uint64_t> target;
  for (const auto& node : ctx.nodes()) {
    for (const auto& c : node.cells) {
      if (c.cell_id == ins.candidate_target_cell_id) target = c.global_id;
    }
  }
  if (target && ins.target_rsrp_dbm - ins.serving_rsrp_dbm >= min_gain_db_) {
    ctx.submit_control(e.node_id, {{e2sm::HandoverCommand{ins.ue_id, *target}}}, e.call_process_id);
    ++accepted_;
  } else {
    ctx.submit_control(e.node_id, {{e2sm::HandoverDeny{ins.ue_id}}}, e.call_process_id);
    ++denied_;
  }
}

// --- registration ------------------------------------------------------

ric::XappDescriptor kpm_monitor_descriptor() {
  ric::XappDescriptor d;
  d.name = "kpm-monitor";
  d.version = "1.0";
  d.priority = 0;
  d.produced_data = {topic::kpm};
  d.loop_period_ms = 1000;
  return d;
}

ric::XappDescriptor slicing_control_descriptor() {
  ric::XappDescriptor d;
  d.name = "slicing-control";
  d.version = "1.0";
  d.priority = 10;
  d.consumed_data = {topic::forecast, topic::policies};
  d.produced_data = {topic::slicing};
  d.control_capabilities = {e2sm::RcDomain::radio_resource_allocation};
  d.loop_period_ms = 100;
  return d;
}

ric::XappDescriptor scheduling_control_descriptor() {
  ric::XappDescriptor d;
  d.name = "scheduling-control";
  d.version = "1.0";
  d.priority = 5;
  d.consumed_data = {topic::forecast, topic::kpm, topic::slicing};
  d.produced_data = {topic::scheduling};
  d.control_capabilities = {e2sm::RcDomain::radio_resource_allocation};
  d.loop_period_ms = 100;
  return d;
}

ric::XappDescriptor handover_control_descriptor() {
  ric::XappDescriptor d;
  d.name = "handover-control";
  d.version = "1.0";
  d.priority = 10;
  d.control_capabilities = {e2sm::RcDomain::connected_mobility};
  d.loop_period_ms = 1000;
  return d;
}

void register_reference_xapps(ric::NearRtRic& ric) {
  ric.register_factory("kpm-monitor", [](const auto& d) { return std::make_unique<KpmMonitor>(d); });
  ric.register_factory("slicing-control", [](const auto& d) { return std::make_unique<SlicingControl>(d); });
  ric.register_factory("scheduling-control", [](const auto& d) { return std::make_unique<SchedulingControl>(d); });
  ric.register_factory("handover-control", [](const auto& d) { return std::make_unique<HandoverControl>(d); });
}

}  // namespace oran::xapps
