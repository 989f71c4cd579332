#include "oran/ric/ric.hpp"

#include <algorithm>

#include <json.hpp>

#include "oran/common/error.hpp"
#include "oran/e2/codec.hpp"
#include "oran/e2sm/service_model.hpp"

namespace oran::ric {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

constexpr std::uint32_t kSubscriptionRequestor = 1;
constexpr std::uint32_t kControlRequestor = 2;
constexpr const char* kA1Principal = "a1";
constexpr const char* kPoliciesTopic = "policies";

// Two requests merge only when every field is byte-identical after the
// actions are put in action-id order.
std::string canonical_key(const std::string& node, std::uint32_t fn, ByteView trigger,
                          std::vector<e2::RicAction> actions) {
  std::sort(actions.begin(), actions.end(), [](const auto& a, const auto& b) { return a.action_id < b.action_id; });
  std::string key = node + "|" + std::to_string(fn) + "|" + to_hex(trigger);
  for (const auto& a : actions) {
    key += "|" + std::to_string(a.action_id) + ":" + std::string(e2::to_string(a.type)) + ":" + to_hex(a.definition);
    if (a.subsequent) {
      key += ":" + std::string(e2::to_string(a.subsequent->type)) + "/" +
             std::string(e2::to_string(a.subsequent->time_to_wait));
    }
  }
  return key;
}

std::string node_kind_of(const std::vector<e2::RanFunction>& functions) {
  for (const auto& f : functions) {
    try {
      auto def = e2sm::sm_decode_as<e2sm::KpmFunctionDefinition>(f.definition);
      if (std::find(def.containers.begin(), def.containers.end(), e2sm::NodeKind::du) != def.containers.end()) {
        return "du";
      }
      return "cu";
    } catch (const Error&) {
    }
  }
  return "unknown";
}

bool is_function_definition(const Bytes& def) {
  try {
    const auto d = e2sm::sm_decode(def);
    return std::holds_alternative<e2sm::KpmFunctionDefinition>(d.payload) ||
           std::holds_alternative<e2sm::RcFunctionDefinition>(d.payload);
  } catch (const Error&) {
    return false;
  }
}

a1::Message a1_error(std::string error, std::string policy_id, std::string detail) {
  a1::Message m;
  m.op = "error";
  m.policy_id = std::move(policy_id);
  m.error = std::move(error);
  m.detail = std::move(detail);
  return m;
}

a1::Message a1_feedback(std::string policy_id, bool enforced, TimeMs at) {
  a1::Message m;
  m.op = "feedback";
  m.feedback = a1::Feedback{std::move(policy_id), enforced, at};
  return m;
}

}  // namespace

// --- xApp host --------------------------------------------------------

class NearRtRic::Host : public XappContext {
 public:
  Host(NearRtRic& ric, XappDescriptor desc, std::unique_ptr<Xapp> app)
      : ric_(ric), desc_(std::move(desc)), app_(std::move(app)) {}

  const std::string& name() const { return desc_.name; }
  Xapp& app() { return *app_; }

  void deliver(const XappEvent& event) {
    try {
      std::visit(Overloaded{
                     [&](const SubscriptionEvent& e) { app_->on_subscription(*this, e); },
                     [&](const IndicationEvent& e) { app_->on_indication(*this, e); },
                     [&](const InsertEvent& e) { app_->on_insert(*this, e); },
                     [&](const ControlOutcome& e) { app_->on_control_outcome(*this, e); },
                     [&](const SdlChange& e) { app_->on_data(*this, e); },
                     [&](const TickEvent&) { app_->on_tick(*this); },
                 },
                 event);
    } catch (const std::exception& e) {
      ric_.bump("xapp.callback_errors");
      ric_.note(desc_.name + ": callback failed: " + e.what());
    }
  }

  TimeMs now() const override { return ric_.now_; }
  const XappDescriptor& descriptor() const override { return desc_; }

  SubscriptionHandle subscribe(const std::string& node_id, std::uint32_t function_id, Bytes trigger,
                               std::vector<e2::RicAction> actions) override {
    return ric_.subscribe(desc_.name, node_id, function_id, std::move(trigger), std::move(actions));
  }
  void unsubscribe(SubscriptionHandle handle) override { ric_.unsubscribe(desc_.name, handle); }

  ControlTicket submit_control(const std::string& node_id, std::vector<e2sm::RcControl> controls,
                               std::optional<Bytes> in_reply_to) override {
    return ric_.submit_control(desc_.name, node_id, std::move(controls), std::move(in_reply_to));
  }

  std::optional<std::string> sdl_get(const std::string& ns, const std::string& key) const override {
    return ric_.sdl_.find(ns, key);
  }
  std::vector<std::string> sdl_keys(const std::string& ns) const override { return ric_.sdl_.keys(ns); }
  void sdl_put(const std::string& key, std::string value) override {
    ric_.sdl_.put(Principal::xapp(desc_.name), ns::xapp(desc_.name), key, std::move(value));
  }
  void sdl_erase(const std::string& key) override {
    ric_.sdl_.erase(Principal::xapp(desc_.name), ns::xapp(desc_.name), key);
  }
  void watch(const std::string& ns, const std::string& prefix) override {
    auto* ric = &ric_;
    auto name = desc_.name;
    watches.push_back(ric_.sdl_.watch(ns, prefix, [ric, name](const SdlChange& c) { ric->router_.post(name, c); }));
  }

  void publish(const std::string& topic, std::string value) override {
    ric_.publish(desc_.name, topic, std::move(value));
  }
  void ack_policy(const std::string& policy_id, bool enforced) override {
    ric_.ack_policy(desc_.name, policy_id, enforced);
  }
  std::vector<RnibEntry> nodes() const override { return ric_.rnib(); }
  void log(const std::string& line) override { ric_.note(desc_.name + ": " + line); }

  std::vector<WatchId> watches;
  std::set<SubscriptionHandle> handles;
  TimeMs next_tick = 0;

 private:
  NearRtRic& ric_;
  XappDescriptor desc_;
  std::unique_ptr<Xapp> app_;
};

// --- core -------------------------------------------------------------

NearRtRic::NearRtRic(RicConfig config) : config_(config), kpm_(config.kpm_retention_ms) {
  declare_topic(kA1Principal, kPoliciesTopic);
}

NearRtRic::~NearRtRic() = default;

void NearRtRic::note(const std::string& line) { log_.push_back(std::to_string(now_) + " " + line); }

void NearRtRic::send(E2Conn& conn, e2::PduBody body) {
  if (!conn.conn->is_open()) {
    bump("e2.tx_dropped");
    return;
  }
  conn.conn->send(e2::encode(e2::make_pdu(std::move(body))));
  bump("e2.tx");
}

NearRtRic::E2Conn* NearRtRic::conn_of(const std::string& node_id) {
  for (auto& c : e2_) {
    if (c->node_id == node_id && c->conn->is_open()) return c.get();
  }
  return nullptr;
}

void NearRtRic::attach_e2(std::unique_ptr<transport::Connection> conn) {
  e2_.push_back(std::make_unique<E2Conn>(E2Conn{std::move(conn), {}}));
}

void NearRtRic::attach_a1(std::unique_ptr<transport::Connection> conn) { a1_ = std::move(conn); }

std::size_t NearRtRic::poll() {
  std::size_t handled = 0;
  for (std::size_t i = 0; i < e2_.size(); ++i) {
    for (;;) {
      auto& c = *e2_[i];
      auto p = c.conn->try_recv();
      if (p.state == transport::Poll::State::closed && !c.node_id.empty()) {
        auto it = rnib_.find(c.node_id);
        if (it != rnib_.end() && it->second.connected && conn_of(c.node_id) == nullptr) {
          it->second.connected = false;
          sync_rnib(c.node_id);
        }
      }
      if (p.state != transport::Poll::State::message) break;
      ++handled;
      bump("e2.rx");
      e2::E2apPdu pdu;
      try {
        pdu = e2::decode(p.payload);
      } catch (const Error& e) {
        bump("e2.rx_malformed");
        send(c, e2::ErrorIndication{{e2::CauseKind::rejected, e.what()}});
        continue;
      }
      handle_e2(c, pdu);
    }
  }
  while (a1_) {
    auto p = a1_->try_recv();
    if (p.state != transport::Poll::State::message) break;
    ++handled;
    bump("a1.rx");
    try {
      handle_a1(a1::decode(p.payload));
    } catch (const Error& e) {
      send_a1(a1_error(std::string(to_string(e.code())), "", e.what()));
    }
  }
  settle();
  return handled;
}

void NearRtRic::advance_to(TimeMs t) {
  now_ = std::max(now_, t);
  fire_timers();
  settle();
}

void NearRtRic::settle() {
  do {
    router_.dispatch();
    resolve_controls();
  } while (!router_.idle() || !batch_.empty());
}

// --- E2 ---------------------------------------------------------------

void NearRtRic::handle_e2(E2Conn& conn, const e2::E2apPdu& pdu) {
  if (!conn.node_id.empty()) {
    auto it = rnib_.find(conn.node_id);
    if (it != rnib_.end()) it->second.last_seen = now_;
  }
  if (conn.node_id.empty() && !std::holds_alternative<e2::SetupRequest>(pdu.body)) {
    bump("e2.unknown_node");
    send(conn, e2::ErrorIndication{{e2::CauseKind::rejected, "UnknownNode: E2 setup required first"}});
    return;
  }
  std::visit(Overloaded{
                 [&](const e2::SetupRequest& m) { on_setup(conn, m); },
                 [&](const e2::ServiceUpdate& m) { on_service_update(conn, m); },
                 [&](const e2::SubscriptionResponse& m) { on_subscription_response(m); },
                 [&](const e2::SubscriptionFailure& m) { on_subscription_failure(m); },
                 [&](const e2::SubscriptionDeleteResponse& m) { on_subscription_delete_response(m); },
                 [&](const e2::Indication& m) { on_indication(conn, m); },
                 [&](const e2::ControlAcknowledge& m) {
                   ControlOutcome o;
                   o.kind = ControlOutcome::Kind::acknowledged;
                   o.outcome = m.outcome;
                   on_control_response(m.request_id, std::move(o));
                 },
                 [&](const e2::ControlFailure& m) {
                   ControlOutcome o;
                   o.kind = m.cause.kind == e2::CauseKind::timeout ? ControlOutcome::Kind::timeout
                                                                   : ControlOutcome::Kind::denied;
                   o.cause = m.cause;
                   on_control_response(m.request_id, std::move(o));
                 },
                 [&](const e2::ErrorIndication& m) {
                   bump("e2.error_indications");
                   note("error indication from " + conn.node_id + ": " + m.cause.detail);
                 },
                 [&](const auto&) {
                   bump("e2.unexpected");
                   send(conn, e2::ErrorIndication{{e2::CauseKind::unsupported,
                                                   "unexpected " + std::string(e2::message_name(pdu.body))}});
                 },
             },
             pdu.body);
}

void NearRtRic::on_setup(E2Conn& conn, const e2::SetupRequest& req) {
  auto existing = rnib_.find(req.node_id);
  if (existing != rnib_.end()) {
    // a node that sets up again has lost its subscription state
    end_subscriptions(req.node_id, nullptr, "node set up again");
    for (auto& c : e2_) {
      if (c.get() != &conn && c->node_id == req.node_id) {
        c->conn->close();
        c->node_id.clear();
      }
    }
    bump("e2.setup_replaced");
  }
  RnibEntry entry;
  entry.node_id = req.node_id;
  entry.connected = true;
  entry.last_seen = now_;
  e2::SetupResponse resp;
  for (const auto& f : req.functions) {
    if (is_function_definition(f.definition)) {
      entry.functions.push_back(f);
      resp.accepted_ids.push_back(f.function_id);
      try {
        for (const auto& c : e2sm::sm_decode_as<e2sm::RcFunctionDefinition>(f.definition).cells) {
          entry.cells.push_back({c.cell_id, c.global_id});
        }
      } catch (const Error&) {
      }
    } else {
      resp.rejected_ids.push_back(f.function_id);
    }
  }
  entry.node_kind = node_kind_of(entry.functions);
  conn.node_id = req.node_id;
  rnib_[req.node_id] = std::move(entry);
  sync_rnib(req.node_id);
  bump("e2.setups");
  send(conn, std::move(resp));
}

void NearRtRic::on_service_update(E2Conn& conn, const e2::ServiceUpdate& upd) {
  auto& entry = rnib_.at(conn.node_id);
  e2::ServiceUpdateAcknowledge ack;
  std::set<std::uint32_t> removed(upd.deleted.begin(), upd.deleted.end());
  auto upsert = [&](const e2::RanFunction& f) {
    if (!is_function_definition(f.definition)) {
      ack.rejected_ids.push_back(f.function_id);
      return;
    }
    auto it = std::find_if(entry.functions.begin(), entry.functions.end(),
                           [&](const auto& g) { return g.function_id == f.function_id; });
    if (it == entry.functions.end()) {
      entry.functions.push_back(f);
    } else {
      *it = f;
    }
    ack.accepted_ids.push_back(f.function_id);
  };
  for (const auto& f : upd.added) upsert(f);
  for (const auto& f : upd.modified) upsert(f);
  std::erase_if(entry.functions, [&](const auto& f) { return removed.count(f.function_id) > 0; });
  if (!removed.empty()) end_subscriptions(conn.node_id, &removed, "RAN function deleted");
  sync_rnib(conn.node_id);
  send(conn, std::move(ack));
}

void NearRtRic::end_subscriptions(const std::string& node_id, const std::set<std::uint32_t>* functions,
                                  const std::string& why) {
  std::vector<std::uint64_t> ended;
  for (const auto& [id, rec] : records_) {
    if (rec->node_id == node_id && (!functions || functions->count(rec->function_id))) ended.push_back(id);
  }
  for (auto id : ended) {
    auto& rec = *records_.at(id);
    for (const auto& [xapp, handle] : rec.subscribers) {
      if (rec.state != SubRecord::State::deleting) {
        router_.post(xapp, SubscriptionEvent{handle, SubscriptionEvent::Kind::ended,
                                             {e2::CauseKind::unsupported, why}});
      }
      record_by_handle_.erase(handle);
      for (auto& h : hosts_) {
        if (h->name() == xapp) h->handles.erase(handle);
      }
    }
    if (record_by_key_.count(rec.key) && record_by_key_[rec.key] == id) record_by_key_.erase(rec.key);
    record_by_wire_.erase(rec.wire);
    records_.erase(id);
    bump("subscriptions.ended");
  }
}

void NearRtRic::on_subscription_response(const e2::SubscriptionResponse& resp) {
  auto it = record_by_wire_.find(resp.request_id);
  if (it == record_by_wire_.end()) {
    bump("e2.stale_responses");
    return;
  }
  auto& rec = *records_.at(it->second);
  if (rec.state != SubRecord::State::pending) return;
  rec.state = SubRecord::State::active;
  for (const auto& [xapp, handle] : rec.subscribers) {
    router_.post(xapp, SubscriptionEvent{handle, SubscriptionEvent::Kind::active, {}});
  }
}

void NearRtRic::on_subscription_failure(const e2::SubscriptionFailure& f) {
  auto it = record_by_wire_.find(f.request_id);
  if (it == record_by_wire_.end()) {
    bump("e2.stale_responses");
    return;
  }
  const auto id = it->second;
  auto& rec = *records_.at(id);
  for (const auto& [xapp, handle] : rec.subscribers) {
    router_.post(xapp, SubscriptionEvent{handle, SubscriptionEvent::Kind::failed, f.cause});
    record_by_handle_.erase(handle);
    for (auto& h : hosts_) {
      if (h->name() == xapp) h->handles.erase(handle);
    }
  }
  if (record_by_key_.count(rec.key) && record_by_key_[rec.key] == id) record_by_key_.erase(rec.key);
  record_by_wire_.erase(it);
  records_.erase(id);
  bump("subscriptions.wire_rejected");
}

void NearRtRic::on_subscription_delete_response(const e2::SubscriptionDeleteResponse& resp) {
  auto it = record_by_wire_.find(resp.request_id);
  if (it == record_by_wire_.end()) return;
  records_.erase(it->second);
  record_by_wire_.erase(it);
}

void NearRtRic::on_indication(E2Conn& conn, const e2::Indication& ind) {
  auto it = record_by_wire_.find(ind.request_id);
  if (it == record_by_wire_.end() || records_.at(it->second)->state == SubRecord::State::deleting) {
    bump("indications.orphan");
    return;
  }
  auto& rec = *records_.at(it->second);
  if (ind.indication_type == e2::IndicationType::report) {
    try {
      const auto msg = e2sm::sm_decode(ind.message);
      if (auto* kpm = std::get_if<e2sm::KpmIndicationMessage>(&msg.payload)) {
        for (const auto& r : kpm->records) kpm_.add(conn.node_id, r);
      }
    } catch (const Error&) {
      bump("indications.undecodable");
    }
    for (const auto& [xapp, handle] : rec.subscribers) {
      router_.post(xapp, IndicationEvent{handle, conn.node_id, ind});
      bump("indications.delivered");
    }
    bump("indications.reports");
    return;
  }

  ++insert_stats_.received;
  bump("indications.inserts");
  e2sm::HandoverInsert ins;
  try {
    ins = e2sm::sm_decode_as<e2sm::HandoverInsert>(ind.message);
  } catch (const Error& e) {
    ++insert_stats_.undeliverable;
    note("undecodable insert from " + conn.node_id + ": " + e.what());
    return;
  }
  const auto cp = ind.call_process_id.value_or(ins.call_process_id);
  auto& ctx = uenib_[ins.ue_id];
  ctx.ue_id = ins.ue_id;
  std::erase_if(ctx.contexts, [&](const auto& c) { return c.node_id == conn.node_id; });
  ctx.contexts.push_back({conn.node_id, ins.serving_cell_id, ins.slice_id});
  sync_uenib(ins.ue_id);

  // the first subscriber allowed to control mobility takes the insert
  const Host* target = nullptr;
  SubscriptionHandle handle = 0;
  for (const auto& [xapp, h] : rec.subscribers) {
    for (const auto& host : hosts_) {
      if (host->name() == xapp && host->descriptor().can_control(e2sm::RcDomain::connected_mobility)) {
        target = host.get();
        handle = h;
        break;
      }
    }
    if (target) break;
  }
  if (!target) {
    ++insert_stats_.undeliverable;
    return;
  }
  TimeMs wait = e2::to_millis(e2::TimeToWait::w10ms);
  for (const auto& a : rec.actions) {
    if (a.action_id == ind.action_id && a.subsequent) wait = e2::to_millis(a.subsequent->time_to_wait);
  }
  const auto deadline = now_ + wait;
  inserts_[cp] = InsertPending{conn.node_id, target->name(), ins.ue_id, deadline};
  router_.post(target->name(), InsertEvent{handle, conn.node_id, cp, ins, deadline});
}

void NearRtRic::on_control_response(const e2::RicRequestId& id, ControlOutcome outcome) {
  auto it = inflight_.find(id.instance_id);
  if (id.requestor_id != kControlRequestor || it == inflight_.end()) {
    bump("controls.late_responses");
    return;
  }
  auto inflight = std::move(it->second);
  inflight_.erase(it);
  outcome.ticket = inflight.ticket;
  outcome.node_id = inflight.node_id;
  bump(std::string("controls.") + std::string(to_string(outcome.kind)));
  if (outcome.kind == ControlOutcome::Kind::acknowledged) {
    for (const auto& c : inflight.controls) {
      if (const auto* q = std::get_if<e2sm::SlicePrbQuota>(&c.value)) {
        verify_jobs_.push_back({inflight.ticket, inflight.xapp, inflight.node_id,
                                e2sm::KpmScope::slice(q->cell_id, q->slice_id), now_});
      } else if (const auto* h = std::get_if<e2sm::HandoverCommand>(&c.value)) {
        auto ue = uenib_.find(h->ue_id);
        if (ue == uenib_.end()) continue;
        for (const auto& [node, entry] : rnib_) {
          for (const auto& cell : entry.cells) {
            if (cell.global_id != h->target_cell_global_id) continue;
            auto slice = ue->second.contexts.empty() ? 0u : ue->second.contexts.back().slice_id;
            ue->second.contexts = {{node, cell.cell_id, slice}};
          }
        }
        sync_uenib(h->ue_id);
      }
    }
  }
  router_.post(inflight.xapp, std::move(outcome));
}

// --- subscriptions ----------------------------------------------------

SubscriptionHandle NearRtRic::subscribe(const std::string& xapp, const std::string& node_id,
                                        std::uint32_t function_id, Bytes trigger,
                                        std::vector<e2::RicAction> actions) {
  Host* host = nullptr;
  for (auto& h : hosts_) {
    if (h->name() == xapp) host = h.get();
  }
  if (!host) fail(Errc::not_onboarded, xapp + " is not deployed");
  auto node = rnib_.find(node_id);
  auto* conn = conn_of(node_id);
  if (node == rnib_.end() || !conn) fail(Errc::unknown_node, node_id);
  const auto& fns = node->second.functions;
  if (std::none_of(fns.begin(), fns.end(), [&](const auto& f) { return f.function_id == function_id; })) {
    fail(Errc::unknown_function, "function " + std::to_string(function_id) + " on " + node_id);
  }

  const auto handle = next_handle_++;
  const auto key = canonical_key(node_id, function_id, trigger, actions);
  host->handles.insert(handle);
  auto existing = record_by_key_.find(key);
  if (existing != record_by_key_.end()) {
    auto& rec = *records_.at(existing->second);
    rec.subscribers.emplace_back(xapp, handle);
    record_by_handle_[handle] = rec.id;
    bump("subscriptions.merged");
    if (rec.state == SubRecord::State::active) {
      router_.post(xapp, SubscriptionEvent{handle, SubscriptionEvent::Kind::active, {}});
    }
    return handle;
  }
  auto rec = std::make_unique<SubRecord>();
  rec->id = next_record_++;
  rec->key = key;
  rec->node_id = node_id;
  rec->function_id = function_id;
  rec->actions = actions;
  rec->subscribers.emplace_back(xapp, handle);
  rec->wire = {kSubscriptionRequestor, next_instance_++};
  record_by_key_[key] = rec->id;
  record_by_wire_[rec->wire] = rec->id;
  record_by_handle_[handle] = rec->id;
  const auto wire = rec->wire;
  records_[rec->id] = std::move(rec);
  bump("subscriptions.wire_requests");
  if (keys_seen_.insert(key).second) bump("subscriptions.distinct_keys");
  send(*conn, e2::SubscriptionRequest{wire, function_id, std::move(trigger), std::move(actions)});
  return handle;
}

void NearRtRic::unsubscribe(const std::string& xapp, SubscriptionHandle handle) {
  auto it = record_by_handle_.find(handle);
  if (it == record_by_handle_.end()) return;
  const auto& subs = records_.at(it->second)->subscribers;
  if (std::none_of(subs.begin(), subs.end(), [&](const auto& s) { return s.first == xapp && s.second == handle; })) {
    fail(Errc::forbidden, xapp + " does not own subscription " + std::to_string(handle));
  }
  drop_subscriber(it->second, handle, true);
}

void NearRtRic::drop_subscriber(std::uint64_t record_id, SubscriptionHandle handle, bool notify_wire) {
  auto& rec = *records_.at(record_id);
  std::erase_if(rec.subscribers, [&](const auto& s) { return s.second == handle; });
  record_by_handle_.erase(handle);
  for (auto& h : hosts_) h->handles.erase(handle);
  if (!rec.subscribers.empty() || rec.state == SubRecord::State::deleting) return;
  if (record_by_key_.count(rec.key) && record_by_key_[rec.key] == record_id) record_by_key_.erase(rec.key);
  rec.state = SubRecord::State::deleting;
  auto* conn = conn_of(rec.node_id);
  if (notify_wire && conn) {
    bump("subscriptions.wire_deletes");
    send(*conn, e2::SubscriptionDeleteRequest{rec.wire, rec.function_id});
  } else {
    record_by_wire_.erase(rec.wire);
    records_.erase(record_id);
  }
}

std::size_t NearRtRic::wire_subscription_count() const {
  std::size_t n = 0;
  for (const auto& [id, rec] : records_) {
    if (rec->state != SubRecord::State::deleting) ++n;
  }
  return n;
}

std::size_t NearRtRic::subscriber_count(SubscriptionHandle handle) const {
  auto it = record_by_handle_.find(handle);
  return it == record_by_handle_.end() ? 0 : records_.at(it->second)->subscribers.size();
}

// --- controls ---------------------------------------------------------

ControlTicket NearRtRic::submit_control(const std::string& xapp, const std::string& node_id,
                                        std::vector<e2sm::RcControl> controls, std::optional<Bytes> in_reply_to) {
  const Host* host = nullptr;
  for (const auto& h : hosts_) {
    if (h->name() == xapp) host = h.get();
  }
  if (!host) fail(Errc::not_onboarded, xapp + " is not deployed");
  if (!conn_of(node_id)) fail(Errc::unknown_node, node_id);
  if (controls.empty()) fail(Errc::invariant_violation, "empty control message");
  const auto domain = e2sm::domain_of(controls.front());
  for (const auto& c : controls) {
    e2sm::validate(c);
    if (!host->descriptor().can_control(e2sm::domain_of(c))) {
      fail(Errc::unsupported_domain, xapp + " has no " + std::string(e2sm::to_string(e2sm::domain_of(c))) +
                                         " capability");
    }
    if (e2sm::domain_of(c) != domain) fail(Errc::unsupported_domain, "one control message spans two domains");
  }
  const auto ticket = next_ticket_++;
  if (in_reply_to && !inserts_.count(*in_reply_to)) {
    ControlOutcome o;
    o.ticket = ticket;
    o.kind = ControlOutcome::Kind::timeout;
    o.node_id = node_id;
    o.cause = {e2::CauseKind::timeout, "insert is no longer pending"};
    router_.post(xapp, std::move(o));
    return ticket;
  }
  batch_.push_back({ticket, xapp, node_id, std::move(controls), std::move(in_reply_to)});
  return ticket;
}

void NearRtRic::resolve_controls() {
  if (batch_.empty()) return;
  auto batch = std::move(batch_);
  batch_.clear();
  auto descriptor_of = [&](const std::string& name) -> const XappDescriptor* {
    for (const auto& h : hosts_) {
      if (h->name() == name) return &h->descriptor();
    }
    return nullptr;
  };
  // every submission of one instant competes on equal terms: priority
  // first, then name, then submission order
  std::stable_sort(batch.begin(), batch.end(), [&](const PendingControl& a, const PendingControl& b) {
    const auto* da = descriptor_of(a.xapp);
    const auto* db = descriptor_of(b.xapp);
    if (!da || !db) return da != nullptr && db == nullptr;
    if (da->name == db->name) return false;
    return outranks(*da, *db);
  });
  for (auto& pc : batch) {
    auto* conn = conn_of(pc.node_id);
    if (!descriptor_of(pc.xapp) || !conn) {
      bump("controls.dropped");
      continue;
    }
    std::vector<LockKey> keys;
    std::string holder;
    for (const auto& c : pc.controls) {
      LockKey k{pc.node_id, e2sm::target_of(c)};
      auto lock = locks_.find(k);
      if (lock != locks_.end() && lock->second.expiry > now_ && lock->second.holder != pc.xapp) {
        holder = lock->second.holder;
        break;
      }
      keys.push_back(std::move(k));
    }
    if (!holder.empty()) {
      ControlOutcome o;
      o.ticket = pc.ticket;
      o.kind = ControlOutcome::Kind::conflict_rejected;
      o.node_id = pc.node_id;
      o.holder = holder;
      o.cause = {e2::CauseKind::conflict, "ConflictRejected: held by " + holder};
      bump("controls.conflict_rejected");
      note("control " + std::to_string(pc.ticket) + " of " + pc.xapp + " rejected, lock held by " + holder);
      router_.post(pc.xapp, std::move(o));
      continue;
    }
    for (const auto& k : keys) {
      auto& lock = locks_[k];
      if (lock.holder != pc.xapp || lock.expiry <= now_) lock = {pc.xapp, now_ + config_.conflict_window_ms};
    }
    if (pc.in_reply_to) {
      auto ins = inserts_.find(*pc.in_reply_to);
      if (ins != inserts_.end()) {
        const bool deny = std::any_of(pc.controls.begin(), pc.controls.end(), [](const auto& c) {
          return std::holds_alternative<e2sm::HandoverDeny>(c.value);
        });
        ++(deny ? insert_stats_.denied : insert_stats_.accepted);
        inserts_.erase(ins);
      }
    }
    const e2::RicRequestId wire{kControlRequestor, next_instance_++};
    e2::ControlRequest req;
    req.request_id = wire;
    req.function_id = 0;
    for (const auto& f : rnib_.at(pc.node_id).functions) {
      if (is_function_definition(f.definition)) {
        try {
          e2sm::sm_decode_as<e2sm::RcFunctionDefinition>(f.definition);
          req.function_id = f.function_id;
        } catch (const Error&) {
        }
      }
    }
    req.call_process_id = pc.in_reply_to;
    req.header = e2sm::sm_encode(e2sm::RcHeader{e2sm::domain_of(pc.controls.front())});
    req.message = e2sm::sm_encode(e2sm::RcControlMessage{pc.controls});
    req.ack_requested = true;
    inflight_[wire.instance_id] = {pc.ticket, pc.xapp, pc.node_id, std::move(pc.controls), now_};
    bump("controls.sent");
    send(*conn, std::move(req));
  }
}

// --- timers -----------------------------------------------------------

void NearRtRic::fire_timers() {
  for (auto it = inserts_.begin(); it != inserts_.end();) {
    if (it->second.deadline > now_) {
      ++it;
      continue;
    }
    ++insert_stats_.timed_out;
    it = inserts_.erase(it);
  }
  for (auto it = inflight_.begin(); it != inflight_.end();) {
    if (now_ - it->second.sent_at < config_.control_timeout_ms) {
      ++it;
      continue;
    }
    ControlOutcome o;
    o.ticket = it->second.ticket;
    o.kind = ControlOutcome::Kind::timeout;
    o.node_id = it->second.node_id;
    o.cause = {e2::CauseKind::timeout, "no response from node"};
    bump("controls.timeout");
    router_.post(it->second.xapp, std::move(o));
    it = inflight_.erase(it);
  }
  std::erase_if(locks_, [&](const auto& kv) { return kv.second.expiry <= now_; });

  for (auto it = verify_jobs_.begin(); it != verify_jobs_.end();) {
    if (now_ < it->at + config_.verify.window_ms) {
      ++it;
      continue;
    }
    bool any = false;
    for (const auto& metric : {e2sm::metric::tx_bytes, e2sm::metric::latency_proxy_ms, e2sm::metric::prb_granted}) {
      const auto series = kpm_.series(it->node_id, it->scope, std::string(metric));
      if (series.empty()) continue;
      any = true;
      verifications_.push_back({it->ticket, it->xapp, it->node_id, it->scope, std::string(metric), it->at,
                                verify(series, it->at, higher_is_better(metric), config_.verify)});
    }
    if (!any) {
      VerifyResult r;
      r.verdict = Verdict::insufficient_data;
      verifications_.push_back({it->ticket, it->xapp, it->node_id, it->scope, "", it->at, r});
    }
    bump("verifications");
    it = verify_jobs_.erase(it);
  }

  for (auto& h : hosts_) {
    const auto period = h->descriptor().loop_period_ms;
    if (period <= 0 || now_ < h->next_tick) continue;
    while (h->next_tick <= now_) h->next_tick += period;
    router_.post(h->name(), TickEvent{now_});
  }
}

// --- xApp management --------------------------------------------------

void NearRtRic::register_factory(const std::string& name, XappFactory factory) {
  factories_[name] = std::move(factory);
}

void NearRtRic::onboard(XappDescriptor descriptor) {
  auto& versions = onboarded_[descriptor.name];
  for (const auto& v : versions) {
    if (v.version == descriptor.version) {
      fail(Errc::duplicate_name, descriptor.name + " " + descriptor.version + " is already onboarded");
    }
  }
  note("onboarded " + descriptor.name + " " + descriptor.version);
  versions.push_back(std::move(descriptor));
}

void NearRtRic::deploy(const std::string& name, const std::map<std::string, std::string>& overrides) {
  auto it = onboarded_.find(name);
  if (it == onboarded_.end() || it->second.empty()) fail(Errc::not_onboarded, name);
  if (is_deployed(name)) fail(Errc::duplicate_name, name + " is already deployed");
  auto f = factories_.find(name);
  if (f == factories_.end()) fail(Errc::not_onboarded, "no implementation registered for " + name);
  auto desc = it->second.back();
  for (const auto& [k, v] : overrides) {
    if (k == "model_path") {
      desc.model_path = v;
    } else if (k == "loop_period_ms") {
      desc.loop_period_ms = std::stoll(v);
    } else if (k == "priority") {
      desc.priority = std::stoi(v);
    } else {
      desc.params[k] = v;
    }
  }
  auto app = f->second(desc);
  auto host = std::make_unique<Host>(*this, desc, std::move(app));
  auto* h = host.get();
  h->next_tick = now_ + desc.loop_period_ms;
  router_.register_endpoint(name, [h](const XappEvent& e) { h->deliver(e); });
  sdl_.create_namespace(ns::xapp(name));
  for (const auto& t : desc.produced_data) declare_topic(name, t);
  hosts_.push_back(std::move(host));
  try {
    for (const auto& t : desc.consumed_data) {
      if (!sdl_.has_namespace(ns::topic(t))) sdl_.create_namespace(ns::topic(t));
      h->watch(ns::topic(t), "");
    }
    h->app().on_start(*h);
  } catch (...) {
    for (auto w : h->watches) sdl_.unwatch(w);
    router_.remove_endpoint(name);
    sdl_.drop_namespace(ns::xapp(name));
    for (auto& [topic, producers] : topic_producers_) producers.erase(name);
    hosts_.pop_back();
    throw;
  }
  bump("xapps.deployed");
  note("deployed " + name + " " + desc.version);
  settle();
}

void NearRtRic::terminate(const std::string& name) {
  auto it = std::find_if(hosts_.begin(), hosts_.end(), [&](const auto& h) { return h->name() == name; });
  if (it == hosts_.end()) fail(Errc::not_found, name + " is not deployed");
  auto& h = **it;
  try {
    h.app().on_stop(h);
  } catch (const std::exception& e) {
    note(name + ": on_stop failed: " + e.what());
  }
  const auto handles = h.handles;
  for (auto handle : handles) {
    auto rec = record_by_handle_.find(handle);
    if (rec != record_by_handle_.end()) drop_subscriber(rec->second, handle, true);
  }
  for (auto w : h.watches) sdl_.unwatch(w);
  std::erase_if(batch_, [&](const auto& pc) { return pc.xapp == name; });
  for (auto& [topic, producers] : topic_producers_) producers.erase(name);
  router_.remove_endpoint(name);
  sdl_.drop_namespace(ns::xapp(name));
  hosts_.erase(it);
  bump("xapps.terminated");
  note("terminated " + name);
  settle();
}

bool NearRtRic::is_deployed(const std::string& name) const {
  return std::any_of(hosts_.begin(), hosts_.end(), [&](const auto& h) { return h->name() == name; });
}

std::vector<std::string> NearRtRic::deployed() const {
  std::vector<std::string> out;
  for (const auto& h : hosts_) out.push_back(h->name());
  return out;
}

Xapp* NearRtRic::xapp(const std::string& name) {
  for (auto& h : hosts_) {
    if (h->name() == name) return &h->app();
  }
  return nullptr;
}

// --- topics and policies ----------------------------------------------

void NearRtRic::declare_topic(const std::string& producer, const std::string& topic) {
  topic_producers_[topic].insert(producer);
  if (!sdl_.has_namespace(ns::topic(topic))) sdl_.create_namespace(ns::topic(topic));
}

void NearRtRic::publish(const std::string& producer, const std::string& topic, std::string value) {
  auto it = topic_producers_.find(topic);
  if (it == topic_producers_.end() || !it->second.count(producer)) {
    fail(Errc::undeclared_topic, producer + " did not declare topic " + topic);
  }
  sdl_.put(Principal::component("data-access"), ns::topic(topic), "latest", std::move(value));
  bump("topics.published");
}

void NearRtRic::ack_policy(const std::string& xapp, const std::string& policy_id, bool enforced) {
  auto it = policy_state_.find(policy_id);
  if (it == policy_state_.end()) return;
  if (it->second == enforced) return;
  it->second = enforced;
  note(xapp + " reports policy " + policy_id + (enforced ? " enforced" : " not enforced"));
  send_a1(a1_feedback(policy_id, enforced, now_));
}

void NearRtRic::send_a1(const a1::Message& msg) {
  if (!a1_ || !a1_->is_open()) return;
  a1_->send(a1::encode(msg));
  bump("a1.tx");
}

void NearRtRic::handle_a1(const a1::Message& msg) {
  const Principal a1p = Principal::component(kA1Principal);
  const auto policies_ns = ns::topic(kPoliciesTopic);
  auto error = [&](Errc code, const std::string& id, const std::string& detail) {
    send_a1(a1_error(std::string(to_string(code)), id, detail));
  };
  if (msg.op == "create" || msg.op == "update") {
    const auto& p = *msg.policy;
    try {
      a1::validate(p);
    } catch (const Error& e) {
      bump("a1.rejected");
      error(e.code() == Errc::unknown_policy_type ? Errc::unknown_policy_type : Errc::malformed_policy, p.policy_id,
            e.what());
      return;
    }
    const bool exists = sdl_.find(policies_ns, p.policy_id).has_value();
    if (msg.op == "update" && !exists) return error(Errc::unknown_id, p.policy_id, "no such policy");
    if (!exists) policy_state_[p.policy_id] = std::nullopt;
    sdl_.put(a1p, policies_ns, p.policy_id, a1::to_json(p).dump());
    bump("a1.policies_stored");
  } else if (msg.op == "delete") {
    if (!sdl_.find(policies_ns, msg.policy_id)) return error(Errc::unknown_id, msg.policy_id, "no such policy");
    sdl_.erase(a1p, policies_ns, msg.policy_id);
    auto st = policy_state_.find(msg.policy_id);
    const bool was_enforced = st != policy_state_.end() && st->second == true;
    policy_state_.erase(msg.policy_id);
    if (was_enforced) send_a1(a1_feedback(msg.policy_id, false, now_));
  } else if (msg.op == "query") {
    a1::Message out;
    out.op = "query_result";
    for (const auto& id : sdl_.keys(policies_ns)) {
      if (!msg.policy_id.empty() && id != msg.policy_id) continue;
      out.policies.push_back(a1::policy_from_json(nlohmann::json::parse(sdl_.get(policies_ns, id))));
    }
    if (!msg.policy_id.empty() && out.policies.empty()) return error(Errc::unknown_id, msg.policy_id, "no such policy");
    send_a1(out);
  } else if (msg.op == "ei") {
    const auto& ei = *msg.ei;
    declare_topic(kA1Principal, ei.topic);
    nlohmann::json j{{"producer", ei.producer}, {"epoch", ei.epoch}, {"payload", ei.payload}, {"at_ms", now_}};
    publish(kA1Principal, ei.topic, j.dump());
    bump("a1.ei");
  } else {
    bump("a1.ignored");
  }
}

// --- NIBs and inspection ----------------------------------------------

void NearRtRic::sync_rnib(const std::string& node_id) {
  const auto& e = rnib_.at(node_id);
  nlohmann::json fns = nlohmann::json::array();
  for (const auto& f : e.functions) fns.push_back({{"id", f.function_id}, {"name", f.name}, {"revision", f.revision}});
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : e.cells) cells.push_back({{"cell_id", c.cell_id}, {"global_id", c.global_id}});
  nlohmann::json j{{"node_id", e.node_id}, {"node_kind", e.node_kind}, {"functions", fns},
                   {"cells", cells},       {"connected", e.connected}, {"last_seen", e.last_seen}};
  sdl_.put(Principal::component("e2term"), ns::rnib, node_id, j.dump());
}

void NearRtRic::sync_uenib(std::uint64_t ue_id) {
  const auto& e = uenib_.at(ue_id);
  nlohmann::json ctx = nlohmann::json::array();
  for (const auto& c : e.contexts) {
    ctx.push_back({{"node_id", c.node_id}, {"serving_cell", c.serving_cell}, {"slice_id", c.slice_id}});
  }
  sdl_.put(Principal::component("e2term"), ns::uenib, std::to_string(ue_id),
           nlohmann::json{{"ue_id", ue_id}, {"contexts", ctx}}.dump());
}

std::vector<RnibEntry> NearRtRic::rnib() const {
  std::vector<RnibEntry> out;
  for (const auto& [id, e] : rnib_) out.push_back(e);
  return out;
}

std::optional<RnibEntry> NearRtRic::rnib(const std::string& node_id) const {
  auto it = rnib_.find(node_id);
  if (it == rnib_.end()) return std::nullopt;
  return it->second;
}

std::optional<UeNibEntry> NearRtRic::uenib(std::uint64_t ue_id) const {
  auto it = uenib_.find(ue_id);
  if (it == uenib_.end()) return std::nullopt;
  return it->second;
}

std::string NearRtRic::metrics_csv() const {
  std::string out = "metric,value\n";
  for (const auto& [k, v] : metrics_) out += k + "," + std::to_string(v) + "\n";
  out += "router.delivered," + std::to_string(router_.delivered()) + "\n";
  out += "router.dropped," + std::to_string(router_.dropped()) + "\n";
  return out;
}

std::uint64_t NearRtRic::state_hash() const {
  Fnv1a h;
  h.add_i64(now_);
  for (const auto& [id, rec] : records_) {
    h.add_u64(id).add(rec->key).add_u64(static_cast<std::uint64_t>(rec->state));
    for (const auto& [x, handle] : rec->subscribers) h.add(x).add_u64(handle);
  }
  for (const auto& [k, lock] : locks_) {
    h.add(k.node_id).add_u64(k.target.cell_id).add_i64(k.target.slice_id).add_u64(k.target.ue_id);
    h.add(k.target.parameter).add(lock.holder).add_i64(lock.expiry);
  }
  for (const auto& [cp, ins] : inserts_) h.add(ByteView(cp)).add(ins.xapp).add_i64(ins.deadline);
  for (const auto& [id, e] : rnib_) h.add(id).add_u64(e.functions.size()).add_u64(e.connected);
  for (const auto& [id, e] : uenib_) {
    h.add_u64(id);
    for (const auto& c : e.contexts) h.add(c.node_id).add_u64(c.serving_cell);
  }
  for (const auto& [k, v] : metrics_) h.add(k).add_u64(v);
  h.add_u64(insert_stats_.received).add_u64(insert_stats_.accepted).add_u64(insert_stats_.denied);
  h.add_u64(insert_stats_.timed_out).add_u64(verifications_.size());
  return h.digest();
}

}  // namespace oran::ric
