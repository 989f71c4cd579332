#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "oran/ric/ric.hpp"
#include "sim_fixtures.hpp"

namespace oran::testing {

/// xApp that records every event and runs optional hooks.
struct Probe : ric::Xapp {
  std::function<void(ric::XappContext&)> start;
  std::function<void(ric::XappContext&)> tick;
  std::function<void(ric::XappContext&, const ric::InsertEvent&)> insert;
  std::function<void(ric::XappContext&, const ric::SdlChange&)> data_hook;

  std::vector<ric::SubscriptionEvent> subscriptions;
  std::vector<ric::IndicationEvent> indications;
  std::vector<ric::InsertEvent> inserts;
  std::vector<ric::ControlOutcome> outcomes;
  std::vector<ric::SdlChange> data;
  std::vector<TimeMs> ticks;

  void on_start(ric::XappContext& ctx) override {
    if (start) start(ctx);
  }
  void on_tick(ric::XappContext& ctx) override {
    ticks.push_back(ctx.now());
    if (tick) tick(ctx);
  }
  void on_subscription(ric::XappContext&, const ric::SubscriptionEvent& e) override { subscriptions.push_back(e); }
  void on_indication(ric::XappContext&, const ric::IndicationEvent& e) override { indications.push_back(e); }
  void on_insert(ric::XappContext& ctx, const ric::InsertEvent& e) override {
    inserts.push_back(e);
    if (insert) insert(ctx, e);
  }
  void on_control_outcome(ric::XappContext&, const ric::ControlOutcome& e) override { outcomes.push_back(e); }
  void on_data(ric::XappContext& ctx, const ric::SdlChange& e) override {
    data.push_back(e);
    if (data_hook) data_hook(ctx, e);
  }
};

inline ric::XappDescriptor probe_descriptor(const std::string& name, int priority = 0,
                                            std::vector<e2sm::RcDomain> caps = {}) {
  ric::XappDescriptor d;
  d.name = name;
  d.version = "1.0";
  d.priority = priority;
  d.control_capabilities = std::move(caps);
  return d;
}

/// Onboards and deploys a Probe; `setup` runs before deployment so hooks
/// are in place for on_start.
inline Probe& deploy_probe(ric::NearRtRic& ric, const ric::XappDescriptor& d,
                           const std::function<void(Probe&)>& setup = {}) {
  ric.register_factory(d.name, [setup](const ric::XappDescriptor&) {
    auto p = std::make_unique<Probe>();
    if (setup) setup(*p);
    return p;
  });
  ric.onboard(d);
  ric.deploy(d.name);
  return dynamic_cast<Probe&>(*ric.xapp(d.name));
}

inline Bytes kpm_trigger(std::uint32_t period_ms) { return e2sm::sm_encode(e2sm::KpmEventTrigger{period_ms}); }

inline std::vector<e2::RicAction> kpm_actions(e2sm::KpmScope scope, std::vector<std::string> metrics) {
  return {{1, e2::ActionType::report,
           e2sm::sm_encode(e2sm::KpmActionDefinition{e2sm::NodeKind::du, scope, std::move(metrics)}), std::nullopt}};
}

inline std::vector<e2::RicAction> insert_actions(e2::TimeToWait ttw = e2::TimeToWait::w10ms) {
  return {{1, e2::ActionType::insert,
           e2sm::sm_encode(e2sm::RcActionDefinition{e2sm::RcDomain::connected_mobility, {}}),
           e2::SubsequentAction{e2::SubsequentActionType::wait, ttw}}};
}

/// A near-RT RIC wired to a simulated RAN over the loopback transport.
struct RicBed {
  explicit RicBed(sim::SimConfig cfg, ric::RicConfig rc = {})
      : e2_listener(hub.listen("ric:e2")), o1_listener(hub.listen("smo:o1")), ric(rc) {
    ran = std::make_unique<sim::RanRuntime>(std::move(cfg), [this](const std::string&, sim::Interface iface) {
      if (iface == sim::Interface::e2) {
        auto c = hub.connect({"ric:e2", transport::Role::e2_node});
        ric.attach_e2(e2_listener->try_accept());
        return c;
      }
      auto c = hub.connect({"smo:o1", transport::Role::e2_node});
      o1.push_back(o1_listener->try_accept());
      return c;
    });
    ran->start();
    settle();
  }

  void settle() {
    for (int i = 0; i < 16; ++i) {
      if (ric.poll() + ran->poll() == 0) return;
    }
  }

  void step() {
    ran->advance();
    ric.advance_to(ran->sim().now());
    settle();
  }

  void run(TimeMs ms) {
    for (TimeMs i = 0; i < ms; ++i) step();
  }

  void run_until(TimeMs t) {
    while (ran->sim().now() < t) step();
  }

  sim::E2NodeAgent& agent() { return ran->agent("du-1"); }

  transport::LoopbackHub hub;
  std::unique_ptr<transport::Listener> e2_listener;
  std::unique_ptr<transport::Listener> o1_listener;
  ric::NearRtRic ric;
  std::unique_ptr<sim::RanRuntime> ran;
  std::vector<std::unique_ptr<transport::Connection>> o1;
};

/// Minimal hand-driven E2 node for protocol edge cases.
struct RawNode {
  RawNode(transport::LoopbackHub& hub, transport::Listener& listener, ric::NearRtRic& ric)
      : conn(hub.connect({"ric:e2", transport::Role::e2_node})) {
    ric.attach_e2(listener.try_accept());
  }

  void send(const e2::PduBody& body) { conn->send(e2::encode(e2::make_pdu(body))); }

  std::vector<e2::E2apPdu> drain() {
    std::vector<e2::E2apPdu> out;
    for (;;) {
      auto p = conn->try_recv();
      if (p.state != transport::Poll::State::message) return out;
      out.push_back(e2::decode(p.payload));
    }
  }

  static e2::SetupRequest setup(const std::string& node_id) {
    e2::SetupRequest req;
    req.node_id = node_id;
    req.functions = {{sim::kKpmFunctionId, "ORAN-E2SM-KPM", 2,
                      e2sm::sm_encode(e2sm::KpmFunctionDefinition{{e2sm::NodeKind::du}})},
                     {sim::kRcFunctionId, "ORAN-E2SM-RC", 1,
                      e2sm::sm_encode(e2sm::RcFunctionDefinition{
                          {e2sm::RcDomain::radio_resource_allocation}, {}, {{1, 0x1001}}})}};
    return req;
  }

  std::unique_ptr<transport::Connection> conn;
};

template <class F>
Errc errc_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected an oran::Error");
}

}  // namespace oran::testing
