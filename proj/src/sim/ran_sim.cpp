#include "oran/sim/ran_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "oran/common/error.hpp"

namespace oran::sim {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint32_t ceil_div(std::uint64_t a, std::uint64_t b) { return static_cast<std::uint32_t>((a + b - 1) / b); }

void hash_counters(Fnv1a& h, const Counters& c) {
  h.add_u64(c.arrived_bytes).add_u64(c.served_bytes).add_u64(c.prb_granted).add_u64(c.prb_requested).add_u64(c.ticks);
}

bool is_policy_metric(std::string_view m) {
  return m == e2sm::metric::buffer_bytes || m == e2sm::metric::prb_requested || m == e2sm::metric::prb_granted;
}

}  // namespace

Counters& Counters::operator+=(const Counters& o) {
  arrived_bytes += o.arrived_bytes;
  served_bytes += o.served_bytes;
  prb_granted += o.prb_granted;
  prb_requested += o.prb_requested;
  ticks = std::max(ticks, o.ticks);
  return *this;
}

Counters Counters::operator-(const Counters& o) const {
  return {arrived_bytes - o.arrived_bytes, served_bytes - o.served_bytes, prb_granted - o.prb_granted,
          prb_requested - o.prb_requested, ticks - o.ticks};
}

SliceState* CellState::slice(std::uint32_t slice_id) {
  for (auto& s : slices) {
    if (s.config.slice_id == slice_id) return &s;
  }
  return nullptr;
}

const SliceState* CellState::slice(std::uint32_t slice_id) const {
  return const_cast<CellState*>(this)->slice(slice_id);
}

RanSim::RanSim(SimConfig config) : config_(std::move(config)) {
  if (config_.tick_ms <= 0) fail(Errc::scenario_invalid, "tick_ms must be positive");
  if (config_.bytes_per_prb == 0) fail(Errc::scenario_invalid, "bytes_per_prb must be positive");
  std::set<std::string> node_ids;
  for (const auto& node : config_.nodes) {
    if (!node_ids.insert(node.node_id).second) fail(Errc::scenario_invalid, "duplicate node '" + node.node_id + "'");
    for (const auto& c : node.cells) {
      if (cell_index_.count(c.cell_id)) {
        fail(Errc::scenario_invalid, "duplicate cell id " + std::to_string(c.cell_id));
      }
      if (c.total_prb == 0) fail(Errc::scenario_invalid, "cell " + std::to_string(c.cell_id) + " has no PRBs");
      CellState cs;
      cs.config = c;
      cs.a3_offset_db = c.a3_offset_db;
      std::set<std::uint32_t> slice_ids;
      std::uint64_t dedicated = 0;
      for (const auto& s : c.slices) {
        if (!slice_ids.insert(s.slice_id).second) {
          fail(Errc::scenario_invalid, "duplicate slice " + std::to_string(s.slice_id) + " in cell " +
                                           std::to_string(c.cell_id));
        }
        dedicated += s.dedicated_prb;
        SliceState ss;
        ss.config = s;
        cs.slices.push_back(ss);
      }
      if (dedicated > c.total_prb) {
        fail(Errc::scenario_invalid, "cell " + std::to_string(c.cell_id) + " dedicates more PRBs than it has");
      }
      cell_index_[c.cell_id] = cells_.size();
      cell_node_[c.cell_id] = node.node_id;
      cells_.push_back(std::move(cs));
    }
    handovers_[node.node_id] = 0;
  }
  auto ues = config_.ues;
  std::sort(ues.begin(), ues.end(), [](const auto& a, const auto& b) { return a.ue_id < b.ue_id; });
  for (const auto& u : ues) {
    if (ue_index_.count(u.ue_id)) fail(Errc::scenario_invalid, "duplicate ue id " + std::to_string(u.ue_id));
    auto it = cell_index_.find(u.serving_cell);
    if (it == cell_index_.end()) {
      fail(Errc::scenario_invalid, "ue " + std::to_string(u.ue_id) + " served by unknown cell");
    }
    if (!cells_[it->second].slice(u.slice_id)) {
      fail(Errc::scenario_invalid, "ue " + std::to_string(u.ue_id) + " uses a slice its cell does not host");
    }
    UeState us;
    us.config = u;
    us.serving_cell = u.serving_cell;
    us.position = position_at(u.path, 0);
    ue_index_[u.ue_id] = ues_.size();
    ues_.push_back(std::move(us));
    traffic_.emplace_back(u.traffic, config_.packet_bytes, splitmix(config_.seed ^ splitmix(u.ue_id)));
  }
  stats_.resize(cells_.size());
  std::size_t max_slice = 0;
  for (const auto& c : cells_) {
    for (const auto& s : c.slices) max_slice = std::max<std::size_t>(max_slice, s.config.slice_id + 1);
  }
  weights_ = priority_weights(config_.objectives, max_slice);
}

std::vector<A3Event> RanSim::tick() {
  now_ += config_.tick_ms;

  for (auto& u : ues_) {
    if (!u.pending_target) continue;
    ++handovers_[node_of_cell(u.serving_cell)];
    u.serving_cell = *u.pending_target;
    u.pending_target.reset();
    u.frozen = false;
  }

  for (auto& c : cells_) {
    for (auto& s : c.slices) s.tick_arrived = 0;
  }
  for (std::size_t i = 0; i < ues_.size(); ++i) {
    auto& u = ues_[i];
    u.position = position_at(u.config.path, now_);
    const auto bytes = traffic_[i].arrivals(now_, config_.tick_ms);
    u.buffer += bytes;
    u.counters.arrived_bytes += bytes;
    auto* slice = cell_mut(u.serving_cell).slice(u.config.slice_id);
    slice->counters.arrived_bytes += bytes;
    slice->tick_arrived += bytes;
  }

  for (auto& c : cells_) {
    for (auto& s : c.slices) {
      s.last_requested =
          std::min(ceil_div(slice_buffer(c.config.cell_id, s.config.slice_id), config_.bytes_per_prb),
                   c.config.total_prb);
    }
  }

  run_policies();

  for (std::size_t ci = 0; ci < cells_.size(); ++ci) {
    auto& c = cells_[ci];
    if (trace_on_) {
      TickTrace t{now_, c.config.cell_id, {}, {}};
      for (const auto& s : c.slices) {
        t.requested.push_back(s.last_requested);
        t.dedicated.push_back(s.config.dedicated_prb);
      }
      trace_.push_back(std::move(t));
    }
    for (auto& s : c.slices) schedule_slice(c, s);
    score(c, ci);
  }

  for (auto& u : ues_) ++u.counters.ticks;
  return check_a3();
}

void RanSim::schedule_slice(CellState& cell, SliceState& slice) {
  const auto bpp = config_.bytes_per_prb;
  std::vector<UeState*> active;
  for (auto& u : ues_) {
    if (u.serving_cell == cell.config.cell_id && u.config.slice_id == slice.config.slice_id && u.buffer > 0) {
      active.push_back(&u);
    }
  }
  std::vector<std::uint32_t> need(active.size()), grant(active.size(), 0);
  for (std::size_t i = 0; i < active.size(); ++i) need[i] = ceil_div(active[i]->buffer, bpp);

  std::uint32_t left = slice.config.dedicated_prb;
  if (!active.empty()) {
    if (slice.config.scheduler == e2sm::SchedulerKind::round_robin) {
      const auto n = active.size();
      const auto start = slice.rr_offset % n;
      bool progress = true;
      while (left > 0 && progress) {
        progress = false;
        for (std::size_t k = 0; k < n && left > 0; ++k) {
          const auto i = (start + k) % n;
          if (grant[i] < need[i]) {
            ++grant[i];
            --left;
            progress = true;
          }
        }
      }
      ++slice.rr_offset;
    } else {
      std::vector<std::size_t> order(active.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return active[a]->buffer > active[b]->buffer; });
      for (auto i : order) {
        grant[i] = std::min(need[i], left);
        left -= grant[i];
      }
    }
  }

  std::uint32_t used = 0;
  std::uint64_t served_total = 0;
  for (std::size_t i = 0; i < active.size(); ++i) {
    auto& u = *active[i];
    const auto served = std::min<std::uint64_t>(u.buffer, std::uint64_t{grant[i]} * bpp);
    u.buffer -= served;
    u.counters.served_bytes += served;
    u.counters.prb_granted += grant[i];
    u.counters.prb_requested += need[i];
    used += grant[i];
    served_total += served;
  }
  const auto packets_before = slice.counters.served_bytes / config_.packet_bytes;
  slice.counters.served_bytes += served_total;
  slice.counters.prb_granted += used;
  slice.counters.prb_requested += slice.last_requested;
  ++slice.counters.ticks;
  slice.last_granted = used;

  const auto window_ticks = static_cast<std::size_t>(std::max<TimeMs>(config_.objectives.window_ms / config_.tick_ms, 1));
  SliceState::TickSample sample;
  sample.served = served_total;
  sample.packets = slice.counters.served_bytes / config_.packet_bytes - packets_before;
  sample.arrived = slice.tick_arrived;
  slice.window.push_back(sample);
  while (slice.window.size() > window_ticks) slice.window.pop_front();
}

void RanSim::score(CellState& cell, std::size_t cell_index) {
  const auto& obj = config_.objectives;
  const bool scored = now_ > config_.warmup_ms;
  bool any = false;
  std::vector<std::uint32_t> requested, dedicated;
  for (auto& s : cell.slices) {
    requested.push_back(s.last_requested);
    dedicated.push_back(s.config.dedicated_prb);
    if (!scored) continue;
    std::uint64_t served = 0, arrived = 0, packets = 0;
    for (const auto& w : s.window) {
      served += w.served;
      arrived += w.arrived;
      packets += w.packets;
    }
    const double span_ms = static_cast<double>(s.window.size() * static_cast<std::size_t>(config_.tick_ms));
    const auto buffer = slice_buffer(cell.config.cell_id, s.config.slice_id);
    bool violated = false;
    switch (s.config.kind) {
      case SliceKind::urllc: {
        double latency = 0.0;
        if (buffer > 0) latency = served == 0 ? e2sm::kLatencyClamp : buffer / (served / span_ms);
        violated = latency > obj.urllc_max_latency_ms;
        break;
      }
      case SliceKind::embb: {
        const double rate = served / span_ms * 1000.0;
        const double required = std::min(obj.embb_min_bytes_per_s, arrived / span_ms * 1000.0);
        violated = rate + 1e-9 < required;
        break;
      }
      case SliceKind::mmtc: {
        const double required = std::min(obj.mmtc_min_packets * span_ms / static_cast<double>(obj.window_ms),
                                          std::floor(static_cast<double>(arrived) / config_.packet_bytes));
        violated = static_cast<double>(packets) + 1e-9 < required;
        break;
      }
    }
    ++s.scored_ticks;
    if (violated) ++s.violation_ticks;
    any = any || violated;
  }
  if (scored) {
    auto& st = stats_[cell_index];
    ++st.scored_ticks;
    if (any) ++st.violation_ticks;
    std::vector<double> w(requested.size());
    for (std::size_t i = 0; i < cell.slices.size(); ++i) {
      const auto id = cell.slices[i].config.slice_id;
      w[i] = id < weights_.size() ? weights_[id] : 1.0;
    }
    st.cost_sum += shortfall_cost(w, requested, dedicated);
  }
}

void RanSim::run_policies() {
  for (const auto& [node, table] : policies_) {
    for (const auto& [target, policy] : table) {
      auto it = cell_index_.find(target.cell_id);
      if (it == cell_index_.end()) continue;
      auto& cell = cells_[it->second];
      auto* slice = cell.slice(static_cast<std::uint32_t>(target.slice_id));
      if (!slice) continue;
      double value = 0.0;
      if (policy.trigger.metric == e2sm::metric::buffer_bytes) {
        value = static_cast<double>(slice_buffer(cell.config.cell_id, slice->config.slice_id));
      } else if (policy.trigger.metric == e2sm::metric::prb_requested) {
        value = slice->last_requested;
      } else {
        value = slice->last_granted;
      }
      if (!e2sm::compare(value, policy.trigger.comparator, policy.trigger.threshold)) continue;
      std::visit(Overloaded{
                     [&](const e2sm::SliceScheduler& s) { slice->config.scheduler = s.scheduler; },
                     [&](const e2sm::SlicePrbQuota& q) {
                       std::uint64_t others = 0;
                       for (const auto& s : cell.slices) {
                         if (&s != slice) others += s.config.dedicated_prb;
                       }
                       if (others + q.dedicated_prb <= cell.config.total_prb) {
                         slice->config.dedicated_prb = q.dedicated_prb;
                       }
                     },
                     [](const auto&) {},
                 },
                 policy.action->value);
    }
  }
}

std::vector<A3Event> RanSim::check_a3() {
  std::vector<A3Event> events;
  for (const auto& u : ues_) {
    if (u.frozen || u.pending_target || now_ < u.a3_blocked_until) continue;
    const auto& serving = cell(u.serving_cell);
    const double rs = rsrp_dbm(distance(u.position, serving.config.position), config_.p0_dbm,
                               config_.path_loss_exponent);
    const CellState* best = nullptr;
    double best_rsrp = 0.0;
    for (const auto& c : cells_) {
      if (c.config.cell_id == u.serving_cell || !c.slice(u.config.slice_id)) continue;
      const double r = rsrp_dbm(distance(u.position, c.config.position), config_.p0_dbm, config_.path_loss_exponent);
      if (!best || r > best_rsrp) {
        best = &c;
        best_rsrp = r;
      }
    }
    if (best && best_rsrp >= rs + serving.a3_offset_db) {
      events.push_back({u.config.ue_id, node_of_cell(u.serving_cell), u.serving_cell, best->config.cell_id, rs,
                        best_rsrp});
    }
  }
  return events;
}

std::uint32_t RanSim::apply_controls(const std::string& node_id, const std::vector<e2sm::RcControl>& controls) {
  auto cells = cells_;
  auto ues = ues_;
  auto policies = policies_[node_id];
  std::set<std::uint32_t> touched;

  auto owned_cell = [&](std::uint32_t cell_id) -> CellState& {
    auto it = cell_index_.find(cell_id);
    if (it == cell_index_.end() || cell_node_.at(cell_id) != node_id) {
      fail(Errc::unknown_target, "cell " + std::to_string(cell_id) + " is not served by " + node_id);
    }
    return cells[it->second];
  };
  auto owned_slice = [&](std::uint32_t cell_id, std::uint32_t slice_id) -> SliceState& {
    auto* s = owned_cell(cell_id).slice(slice_id);
    if (!s) fail(Errc::unknown_target, "cell " + std::to_string(cell_id) + " has no slice " + std::to_string(slice_id));
    return *s;
  };
  auto owned_ue = [&](std::uint64_t ue_id) -> UeState& {
    auto it = ue_index_.find(ue_id);
    if (it == ue_index_.end()) fail(Errc::unknown_target, "unknown ue " + std::to_string(ue_id));
    auto& u = ues[it->second];
    owned_cell(u.serving_cell);
    return u;
  };

  for (const auto& control : controls) {
    e2sm::validate(control);
    std::visit(Overloaded{
                   [&](const e2sm::SlicePrbQuota& q) {
                     auto& cell = owned_cell(q.cell_id);
                     auto& s = owned_slice(q.cell_id, q.slice_id);
                     const auto total = cell.config.total_prb;
                     const auto lo = static_cast<std::uint32_t>(std::ceil(q.min_ratio * total - 1e-9));
                     const auto hi = static_cast<std::uint32_t>(std::floor(q.max_ratio * total + 1e-9));
                     s.config.dedicated_prb = std::clamp(q.dedicated_prb, lo, std::max(lo, hi));
                     touched.insert(q.cell_id);
                   },
                   [&](const e2sm::HandoverCommand& h) {
                     auto& u = owned_ue(h.ue_id);
                     const auto* target = find_cell_by_global_id(h.target_cell_global_id);
                     if (!target || !target->slice(u.config.slice_id)) {
                       fail(Errc::unknown_target, "no cell with global id " + std::to_string(h.target_cell_global_id) +
                                                      " hosting the ue's slice");
                     }
                     if (target->config.cell_id != u.serving_cell) u.pending_target = target->config.cell_id;
                     u.frozen = false;
                   },
                   [&](const e2sm::HandoverDeny& h) {
                     auto& u = owned_ue(h.ue_id);
                     u.frozen = false;
                     u.a3_blocked_until = now_ + config_.insert_backoff_ms;
                   },
                   [&](const e2sm::SliceScheduler& s) {
                     owned_slice(s.cell_id, s.slice_id).config.scheduler = s.scheduler;
                   },
                   [&](const e2sm::ControlPolicy& p) {
                     const auto& action = p.action->value;
                     const bool slice_action = std::holds_alternative<e2sm::SliceScheduler>(action) ||
                                               std::holds_alternative<e2sm::SlicePrbQuota>(action);
                     if (!slice_action) fail(Errc::unsupported_domain, "policy action must target a slice");
                     if (!is_policy_metric(p.trigger.metric)) {
                       fail(Errc::unknown_target, "policy trigger metric '" + p.trigger.metric + "' not available");
                     }
                     const auto target = e2sm::target_of(control);
                     owned_slice(target.cell_id, static_cast<std::uint32_t>(target.slice_id));
                     policies.insert_or_assign(target, p);
                   },
                   [&](const e2sm::OffsetPolicy& o) {
                     for (auto& c : cells) {
                       if (cell_node_.at(c.config.cell_id) == node_id) c.a3_offset_db += o.delta;
                     }
                   },
               },
               control.value);
  }
  for (auto cell_id : touched) {
    const auto& cell = cells[cell_index_.at(cell_id)];
    std::uint64_t sum = 0;
    for (const auto& s : cell.slices) sum += s.config.dedicated_prb;
    if (sum > cell.config.total_prb) {
      fail(Errc::infeasible_quota, "quota of " + std::to_string(sum) + " PRBs exceeds the " +
                                       std::to_string(cell.config.total_prb) + " PRBs of cell " +
                                       std::to_string(cell_id));
    }
  }
  cells_ = std::move(cells);
  ues_ = std::move(ues);
  policies_[node_id] = std::move(policies);
  return static_cast<std::uint32_t>(controls.size());
}

void RanSim::install_policy(const std::string& node_id, const e2sm::ControlPolicy& policy) {
  apply_controls(node_id, {e2sm::RcControl{policy}});
}

void RanSim::remove_policies(const std::string& node_id) { policies_.erase(node_id); }

void RanSim::schedule_handover(std::uint64_t ue_id, std::uint32_t target_cell) {
  cell(target_cell);
  auto& u = ue_mut(ue_id);
  if (target_cell != u.serving_cell) u.pending_target = target_cell;
  u.frozen = false;
}

void RanSim::freeze(std::uint64_t ue_id) { ue_mut(ue_id).frozen = true; }

void RanSim::release(std::uint64_t ue_id, TimeMs backoff_ms) {
  auto& u = ue_mut(ue_id);
  u.frozen = false;
  u.a3_blocked_until = now_ + backoff_ms;
}

const CellState& RanSim::cell(std::uint32_t cell_id) const {
  auto it = cell_index_.find(cell_id);
  if (it == cell_index_.end()) fail(Errc::unknown_target, "unknown cell " + std::to_string(cell_id));
  return cells_[it->second];
}

CellState& RanSim::cell_mut(std::uint32_t cell_id) { return const_cast<CellState&>(cell(cell_id)); }

const CellState* RanSim::find_cell_by_global_id(std::uint64_t global_id) const {
  for (const auto& c : cells_) {
    if (c.config.global_id == global_id) return &c;
  }
  return nullptr;
}

const std::string& RanSim::node_of_cell(std::uint32_t cell_id) const {
  auto it = cell_node_.find(cell_id);
  if (it == cell_node_.end()) fail(Errc::unknown_target, "unknown cell " + std::to_string(cell_id));
  return it->second;
}

const UeState& RanSim::ue(std::uint64_t ue_id) const {
  auto it = ue_index_.find(ue_id);
  if (it == ue_index_.end()) fail(Errc::unknown_target, "unknown ue " + std::to_string(ue_id));
  return ues_[it->second];
}

UeState& RanSim::ue_mut(std::uint64_t ue_id) { return const_cast<UeState&>(ue(ue_id)); }

std::uint64_t RanSim::handover_count(const std::string& node_id) const {
  auto it = handovers_.find(node_id);
  return it == handovers_.end() ? 0 : it->second;
}

std::uint32_t RanSim::connected_ues(std::uint32_t cell_id, std::optional<std::uint32_t> slice_id) const {
  std::uint32_t n = 0;
  for (const auto& u : ues_) {
    if (u.serving_cell == cell_id && (!slice_id || u.config.slice_id == *slice_id)) ++n;
  }
  return n;
}

std::uint64_t RanSim::slice_buffer(std::uint32_t cell_id, std::uint32_t slice_id) const {
  std::uint64_t b = 0;
  for (const auto& u : ues_) {
    if (u.serving_cell == cell_id && u.config.slice_id == slice_id) b += u.buffer;
  }
  return b;
}

std::uint64_t RanSim::total_arrived() const {
  std::uint64_t n = 0;
  for (const auto& u : ues_) n += u.counters.arrived_bytes;
  return n;
}

std::uint64_t RanSim::total_served() const {
  std::uint64_t n = 0;
  for (const auto& u : ues_) n += u.counters.served_bytes;
  return n;
}

std::uint64_t RanSim::total_buffered() const {
  std::uint64_t n = 0;
  for (const auto& u : ues_) n += u.buffer;
  return n;
}

std::vector<RanSim::Row> RanSim::rows(const std::string& node_id, const e2sm::KpmScope& scope) const {
  std::vector<Row> out;
  if (scope.kind == e2sm::KpmScope::Kind::ue) {
    const auto& u = ue(scope.ue_id);
    if (node_of_cell(u.serving_cell) != node_id) return out;
    out.push_back({scope, u.counters, u.buffer, 1});
    return out;
  }
  for (const auto& c : cells_) {
    if (cell_node_.at(c.config.cell_id) != node_id) continue;
    if (scope.kind != e2sm::KpmScope::Kind::node && c.config.cell_id != scope.cell_id) continue;
    for (const auto& s : c.slices) {
      if (scope.kind == e2sm::KpmScope::Kind::slice && s.config.slice_id != scope.slice_id) continue;
      out.push_back({e2sm::KpmScope::slice(c.config.cell_id, s.config.slice_id), s.counters,
                     slice_buffer(c.config.cell_id, s.config.slice_id),
                     connected_ues(c.config.cell_id, s.config.slice_id)});
    }
  }
  return out;
}

const ObjectiveStats& RanSim::objective_stats(std::uint32_t cell_id) const {
  cell(cell_id);
  return stats_[cell_index_.at(cell_id)];
}

std::map<std::uint32_t, double> RanSim::satisfaction() const {
  std::map<std::uint32_t, std::pair<std::uint64_t, std::uint64_t>> acc;
  for (const auto& c : cells_) {
    for (const auto& s : c.slices) {
      auto& a = acc[s.config.slice_id];
      a.first += s.scored_ticks - s.violation_ticks;
      a.second += s.scored_ticks;
    }
  }
  std::map<std::uint32_t, double> out;
  for (const auto& [id, a] : acc) out[id] = a.second == 0 ? 1.0 : static_cast<double>(a.first) / a.second;
  return out;
}

std::uint64_t RanSim::state_hash() const {
  Fnv1a h;
  h.add_i64(now_);
  for (const auto& c : cells_) {
    h.add_u64(c.config.cell_id).add_double(c.a3_offset_db);
    for (const auto& s : c.slices) {
      h.add_u64(s.config.slice_id).add_u64(s.config.dedicated_prb).add_u64(static_cast<std::uint64_t>(s.config.scheduler));
      h.add_u64(s.rr_offset).add_u64(s.last_requested).add_u64(s.last_granted);
      h.add_u64(s.violation_ticks).add_u64(s.scored_ticks);
      hash_counters(h, s.counters);
    }
  }
  for (const auto& u : ues_) {
    h.add_u64(u.config.ue_id).add_u64(u.serving_cell).add_u64(u.buffer);
    h.add_double(u.position.x).add_double(u.position.y);
    h.add_u64(u.frozen).add_i64(u.a3_blocked_until).add_u64(u.pending_target.value_or(~0u));
    hash_counters(h, u.counters);
  }
  for (const auto& [node, n] : handovers_) h.add(node).add_u64(n);
  for (const auto& [node, table] : policies_) {
    h.add(node).add_u64(table.size());
    for (const auto& [target, p] : table) {
      h.add_u64(target.cell_id).add_i64(target.slice_id).add(target.parameter).add(p.trigger.metric);
      h.add_double(p.trigger.threshold).add_u64(static_cast<std::uint64_t>(p.trigger.comparator));
    }
  }
  return h.digest();
}

}  // namespace oran::sim
