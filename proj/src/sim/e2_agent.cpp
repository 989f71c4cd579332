#include "oran/sim/e2_agent.hpp"

#include <algorithm>

#include "oran/common/error.hpp"
#include "oran/e2/codec.hpp"
#include "oran/e2sm/service_model.hpp"
#include "oran/sim/measure.hpp"

namespace oran::sim {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

e2::Cause cause_of(const Error& e) {
  const auto kind = e.code() == Errc::unsupported_domain ? e2::CauseKind::unsupported : e2::CauseKind::rejected;
  return {kind, e.what()};
}

}  // namespace

E2NodeAgent::E2NodeAgent(RanSim& sim, std::string node_id, std::unique_ptr<transport::Connection> conn)
    : sim_(sim), node_id_(std::move(node_id)), conn_(std::move(conn)) {
  enabled_functions_[kKpmFunctionId] = true;
  enabled_functions_[kRcFunctionId] = true;
}

std::vector<e2::RanFunction> E2NodeAgent::functions() const {
  std::vector<e2::RanFunction> out;
  if (enabled_functions_.at(kKpmFunctionId)) {
    e2sm::KpmFunctionDefinition kpm{{e2sm::NodeKind::du, e2sm::NodeKind::cu_up, e2sm::NodeKind::cu_cp}};
    out.push_back({kKpmFunctionId, "ORAN-E2SM-KPM", 2, e2sm::sm_encode(kpm)});
  }
  if (enabled_functions_.at(kRcFunctionId)) {
    e2sm::RcFunctionDefinition rc;
    rc.supported_domains = {e2sm::RcDomain::radio_resource_allocation, e2sm::RcDomain::connected_mobility};
    rc.tunables = {std::string(e2sm::kA3OffsetDb)};
    for (const auto& c : sim_.cells()) {
      if (sim_.node_of_cell(c.config.cell_id) == node_id_) rc.cells.push_back({c.config.cell_id, c.config.global_id});
    }
    out.push_back({kRcFunctionId, "ORAN-E2SM-RC", 1, e2sm::sm_encode(rc)});
  }
  return out;
}

void E2NodeAgent::start() { send(e2::SetupRequest{node_id_, functions()}); }

void E2NodeAgent::send(e2::PduBody body) { conn_->send(e2::encode(e2::make_pdu(std::move(body)))); }

std::size_t E2NodeAgent::poll() {
  std::size_t handled = 0;
  for (;;) {
    auto p = conn_->try_recv();
    if (p.state != transport::Poll::State::message) break;
    ++handled;
    try {
      handle(e2::decode(p.payload));
    } catch (const Error& e) {
      send(e2::ErrorIndication{{e2::CauseKind::rejected, e.what()}});
    }
  }
  return handled;
}

void E2NodeAgent::handle(const e2::E2apPdu& pdu) {
  std::visit(Overloaded{
                 [&](const e2::SetupResponse&) { setup_complete_ = true; },
                 [&](const e2::SubscriptionRequest& m) { on_subscription(m); },
                 [&](const e2::SubscriptionDeleteRequest& m) { on_subscription_delete(m); },
                 [&](const e2::ControlRequest& m) { on_control(m); },
                 [&](const e2::ServiceUpdateAcknowledge&) {},
                 [&](const e2::ErrorIndication&) {},
                 [&](const auto&) {
                   send(e2::ErrorIndication{{e2::CauseKind::unsupported,
                                             "unexpected " + std::string(e2::message_name(pdu.body))}});
                 },
             },
             pdu.body);
}

void E2NodeAgent::on_subscription(const e2::SubscriptionRequest& req) {
  auto reject = [&](e2::CauseKind kind, std::string detail) {
    send(e2::SubscriptionFailure{req.request_id, {kind, std::move(detail)}});
  };
  if (reports_.count(req.request_id) || inserts_.count(req.request_id) || policies_.count(req.request_id)) {
    return reject(e2::CauseKind::rejected, "duplicate RICrequestID");
  }
  auto fn = enabled_functions_.find(req.function_id);
  if (fn == enabled_functions_.end() || !fn->second) {
    return reject(e2::CauseKind::unsupported, "unknown RAN function " + std::to_string(req.function_id));
  }
  e2::SubscriptionResponse resp{req.request_id, {}, {}};

  if (req.function_id == kKpmFunctionId) {
    e2sm::KpmEventTrigger trigger;
    try {
      trigger = e2sm::sm_decode_as<e2sm::KpmEventTrigger>(req.event_trigger);
      e2sm::validate(trigger);
    } catch (const Error& e) {
      return reject(e2::CauseKind::rejected, e.what());
    }
    for (const auto& a : req.actions) {
      bool ok = false;
      if (a.type == e2::ActionType::report && !reports_.count(req.request_id)) {
        try {
          auto def = e2sm::sm_decode_as<e2sm::KpmActionDefinition>(a.definition);
          e2sm::validate(def);
          sim_.rows(node_id_, def.scope);
          ReportSub sub;
          sub.id = req.request_id;
          sub.action_id = a.action_id;
          sub.def = std::move(def);
          sub.period_ms = trigger.report_period_ms;
          sub.next_due = sim_.now() + sub.period_ms;
          sub.last_report = sim_.now();
          for (const auto& row : sim_.rows(node_id_, sub.def.scope)) sub.snapshot[row.scope] = row.counters;
          sub.handovers = sim_.handover_count(node_id_);
          reports_[req.request_id] = std::move(sub);
          ok = true;
        } catch (const Error&) {
        }
      }
      (ok ? resp.admitted_action_ids : resp.rejected_action_ids).push_back(a.action_id);
    }
  } else {
    try {
      e2sm::sm_decode_as<e2sm::RcEventTrigger>(req.event_trigger);
    } catch (const Error& e) {
      return reject(e2::CauseKind::rejected, e.what());
    }
    for (const auto& a : req.actions) {
      bool ok = false;
      try {
        auto def = e2sm::sm_decode_as<e2sm::RcActionDefinition>(a.definition);
        if (a.type == e2::ActionType::insert && def.domain == e2sm::RcDomain::connected_mobility &&
            !inserts_.count(req.request_id)) {
          const auto wait = a.subsequent ? e2::to_millis(a.subsequent->time_to_wait) : TimeMs{10};
          inserts_[req.request_id] = InsertSub{req.request_id, a.action_id, wait};
          ok = true;
        } else if (a.type == e2::ActionType::policy && e2sm::is_supported(def.domain) && !def.policies.empty()) {
          sim_.apply_controls(node_id_, def.policies);
          auto& installed = policies_[req.request_id];
          installed.insert(installed.end(), def.policies.begin(), def.policies.end());
          ok = true;
        }
      } catch (const Error&) {
      }
      (ok ? resp.admitted_action_ids : resp.rejected_action_ids).push_back(a.action_id);
    }
  }
  if (resp.admitted_action_ids.empty()) {
    reports_.erase(req.request_id);
    return reject(e2::CauseKind::rejected, "no action admitted");
  }
  send(std::move(resp));
}

void E2NodeAgent::on_subscription_delete(const e2::SubscriptionDeleteRequest& req) {
  const auto had_policies = policies_.erase(req.request_id);
  const auto n = reports_.erase(req.request_id) + inserts_.erase(req.request_id) + had_policies;
  if (n == 0) {
    send(e2::ErrorIndication{{e2::CauseKind::rejected, "unknown subscription in delete request"}});
    return;
  }
  if (had_policies) reinstall_policies();
  send(e2::SubscriptionDeleteResponse{req.request_id});
}

void E2NodeAgent::on_control(const e2::ControlRequest& req) {
  auto failure = [&](e2::Cause cause) {
    ++stats_.controls_failed;
    send(e2::ControlFailure{req.request_id, std::move(cause)});
  };
  if (req.function_id != kRcFunctionId || !enabled_functions_.at(kRcFunctionId)) {
    return failure({e2::CauseKind::unsupported, "control addressed to a non-RC function"});
  }
  e2sm::RcHeader header;
  e2sm::RcControlMessage message;
  try {
    header = e2sm::sm_decode_as<e2sm::RcHeader>(req.header);
    message = e2sm::sm_decode_as<e2sm::RcControlMessage>(req.message);
  } catch (const Error& e) {
    return failure(cause_of(e));
  }
  if (!e2sm::is_supported(header.domain)) {
    return failure({e2::CauseKind::unsupported, "UnsupportedDomain: " + std::string(e2sm::to_string(header.domain))});
  }
  for (const auto& c : message.controls) {
    if (e2sm::domain_of(c) != header.domain) {
      return failure({e2::CauseKind::unsupported, "UnsupportedDomain: control outside the header domain"});
    }
  }

  std::optional<PendingInsert> reply_to;
  if (req.call_process_id) {
    auto it = pending_.find(*req.call_process_id);
    if (it == pending_.end()) return failure({e2::CauseKind::timeout, "no insert pending for RICcallProcessID"});
    reply_to = it->second;
  }

  std::uint32_t applied = 0;
  try {
    applied = sim_.apply_controls(node_id_, message.controls);
  } catch (const Error& e) {
    return failure(cause_of(e));
  }
  if (reply_to) {
    pending_.erase(*req.call_process_id);
    const bool denied = std::any_of(message.controls.begin(), message.controls.end(), [](const auto& c) {
      return std::holds_alternative<e2sm::HandoverDeny>(c.value);
    });
    ++(denied ? stats_.inserts_denied : stats_.inserts_accepted);
  }
  ++stats_.controls_acked;
  if (req.ack_requested) {
    send(e2::ControlAcknowledge{req.request_id, e2sm::sm_encode(e2sm::RcControlOutcome{applied, "applied"})});
  }
}

void E2NodeAgent::reinstall_policies() {
  sim_.remove_policies(node_id_);
  for (const auto& [id, controls] : policies_) {
    for (const auto& c : controls) {
      if (const auto* p = std::get_if<e2sm::ControlPolicy>(&c.value)) sim_.install_policy(node_id_, *p);
    }
  }
}

bool E2NodeAgent::has_insert_subscription() const noexcept { return !inserts_.empty(); }

void E2NodeAgent::on_a3(const A3Event& event) {
  if (inserts_.empty()) {
    sim_.schedule_handover(event.ue_id, event.target_cell);
    ++stats_.autonomous_handovers;
    return;
  }
  const auto& sub = inserts_.begin()->second;
  Bytes call_process;
  put_u64_be(call_process, next_call_process_++);
  sim_.freeze(event.ue_id);
  pending_[call_process] = PendingInsert{sub.id, event.ue_id, event.target_cell, sim_.now() + sub.wait_ms};

  e2::Indication ind;
  ind.request_id = sub.id;
  ind.function_id = kRcFunctionId;
  ind.action_id = sub.action_id;
  ind.indication_type = e2::IndicationType::insert;
  ind.header = e2sm::sm_encode(e2sm::RcHeader{e2sm::RcDomain::connected_mobility});
  ind.message = e2sm::sm_encode(e2sm::HandoverInsert{event.ue_id, event.serving_cell, event.target_cell,
                                                     event.serving_rsrp_dbm, event.target_rsrp_dbm, call_process,
                                                     sim_.ue(event.ue_id).config.slice_id});
  ind.call_process_id = call_process;
  ++stats_.inserts_sent;
  send(std::move(ind));
}

void E2NodeAgent::on_tick() {
  const auto now = sim_.now();
  for (auto it = pending_.begin(); it != pending_.end();) {
    if (it->second.deadline > now) {
      ++it;
      continue;
    }
    // the node resumes on its own once the wait timer expires
    if (sim_.config().on_insert_timeout == InsertTimeoutAction::execute) {
      sim_.schedule_handover(it->second.ue_id, it->second.target_cell);
    } else {
      sim_.release(it->second.ue_id, sim_.config().insert_backoff_ms);
    }
    ++stats_.inserts_timed_out;
    it = pending_.erase(it);
  }
  for (auto& [id, sub] : reports_) {
    if (now >= sub.next_due) {
      report(sub);
      sub.next_due += sub.period_ms;
    }
  }
}

void E2NodeAgent::report(ReportSub& sub) {
  const auto now = sim_.now();
  const auto window = now - sub.last_report;
  const auto handovers = sim_.handover_count(node_id_);
  e2sm::KpmIndicationMessage msg;
  for (const auto& row : sim_.rows(node_id_, sub.def.scope)) {
    auto& snap = sub.snapshot[row.scope];
    const auto delta = row.counters - snap;
    for (const auto& m : sub.def.metrics) {
      msg.records.push_back({m, row.scope, now,
                             metric_value(m, row, delta, handovers - sub.handovers, sim_.config().packet_bytes,
                                          window)});
    }
    snap = row.counters;
  }
  sub.handovers = handovers;

  e2::Indication ind;
  ind.request_id = sub.id;
  ind.function_id = kKpmFunctionId;
  ind.action_id = sub.action_id;
  ind.sequence_number = ++sub.sequence;
  ind.indication_type = e2::IndicationType::report;
  ind.header = e2sm::sm_encode(e2sm::KpmIndicationHeader{node_id_, sub.last_report});
  ind.message = e2sm::sm_encode(msg);
  sub.last_report = now;
  ++stats_.indications_sent;
  send(std::move(ind));
}

void E2NodeAgent::send_service_update(e2::ServiceUpdate update) {
  for (auto id : update.deleted) {
    if (enabled_functions_.count(id)) enabled_functions_[id] = false;
    auto drop = [&](auto& subs, std::uint32_t fn) {
      if (id != fn) return;
      subs.clear();
    };
    drop(reports_, kKpmFunctionId);
    drop(inserts_, kRcFunctionId);
    drop(policies_, kRcFunctionId);
    if (id == kRcFunctionId) sim_.remove_policies(node_id_);
  }
  for (const auto& f : update.added) {
    if (enabled_functions_.count(f.function_id)) enabled_functions_[f.function_id] = true;
  }
  send(std::move(update));
}

void E2NodeAgent::hash_into(Fnv1a& h) const {
  h.add(node_id_).add_u64(setup_complete_);
  for (const auto& [id, sub] : reports_) {
    h.add_u64(id.requestor_id).add_u64(id.instance_id).add_u64(sub.sequence).add_i64(sub.next_due);
  }
  for (const auto& [id, sub] : inserts_) h.add_u64(id.instance_id).add_i64(sub.wait_ms);
  for (const auto& [cp, p] : pending_) h.add(ByteView(cp)).add_u64(p.ue_id).add_i64(p.deadline);
  h.add_u64(stats_.indications_sent).add_u64(stats_.inserts_sent).add_u64(stats_.inserts_accepted);
  h.add_u64(stats_.inserts_denied).add_u64(stats_.inserts_timed_out).add_u64(stats_.controls_acked);
  h.add_u64(stats_.controls_failed).add_u64(stats_.autonomous_handovers);
}

}  // namespace oran::sim
