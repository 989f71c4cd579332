#include <doctest.h>

#include <algorithm>
#include <random>
#include <thread>

#include <json.hpp>

#include "oran/common/error.hpp"
#include "ric_fixtures.hpp"

using namespace oran;
using namespace oran::ric;
using namespace oran::testing;

namespace {

constexpr auto kRra = e2sm::RcDomain::radio_resource_allocation;
constexpr auto kMobility = e2sm::RcDomain::connected_mobility;

e2sm::RcControl scheduler(std::uint32_t cell, std::uint32_t slice,
                          e2sm::SchedulerKind kind = e2sm::SchedulerKind::highest_buffer_first) {
  return {e2sm::SliceScheduler{cell, slice, kind}};
}

std::vector<TimedValue> series(std::initializer_list<std::pair<TimeMs, double>> pts) {
  std::vector<TimedValue> out;
  for (auto [t, v] : pts) out.push_back({t, v});
  return out;
}

}  // namespace

// --- SDL ---------------------------------------------------------------

TEST_CASE("sdl put and get with write rules") {
  Sdl sdl;
  sdl.create_namespace(ns::xapp("a"));
  sdl.create_namespace(ns::xapp("b"));
  sdl.put(Principal::xapp("a"), ns::xapp("a"), "k", "v1");
  CHECK(sdl.get(ns::xapp("a"), "k") == "v1");
  CHECK(errc_of([&] { sdl.put(Principal::xapp("a"), ns::xapp("b"), "k", "x"); }) == Errc::forbidden);
  CHECK(errc_of([&] { sdl.put(Principal::component("p"), "nope", "k", "x"); }) == Errc::not_found);
  CHECK(errc_of([&] { sdl.get(ns::xapp("b"), "k"); }) == Errc::not_found);
  sdl.put(Principal::component("p"), ns::xapp("b"), "k", "x");
  CHECK(sdl.keys(ns::xapp("b")) == std::vector<std::string>{"k"});
  sdl.erase(Principal::xapp("a"), ns::xapp("a"), "k");
  CHECK_FALSE(sdl.find(ns::xapp("a"), "k"));
}

TEST_CASE("sdl watchers see commits in order, including writes made from a callback") {
  Sdl sdl;
  sdl.create_namespace("n");
  std::vector<SdlChange> seen_a;
  std::vector<SdlChange> seen_b;
  const auto p = Principal::component("p");
  sdl.watch("n", "", [&](const SdlChange& c) {
    seen_a.push_back(c);
    if (c.key == "k1") sdl.put(p, "n", "k2", "from-callback");
  });
  sdl.watch("n", "k", [&](const SdlChange& c) { seen_b.push_back(c); });
  sdl.put(p, "n", "k1", "a");
  sdl.put(p, "n", "x", "b");
  REQUIRE(seen_a.size() == 3);
  CHECK(seen_a[0].key == "k1");
  CHECK(seen_a[1].key == "k2");
  CHECK(seen_a[2].key == "x");
  for (std::size_t i = 1; i < seen_a.size(); ++i) CHECK(seen_a[i].version > seen_a[i - 1].version);
  // the prefix watcher sees the same order without "x"
  REQUIRE(seen_b.size() == 2);
  CHECK(seen_b[0].version == seen_a[0].version);
  CHECK(seen_b[1].version == seen_a[1].version);
}

TEST_CASE("sdl concurrent writers: every change seen once, versions strictly increasing") {
  Sdl sdl;
  sdl.create_namespace("n");
  std::vector<std::uint64_t> versions;
  sdl.watch("n", "", [&](const SdlChange& c) { versions.push_back(c.version); });
  constexpr int kThreads = 4;
  constexpr int kWrites = 500;
  std::vector<std::thread> threads;
  for (int t = 0; t < kThreads; ++t) {
    threads.emplace_back([&sdl, t] {
      for (int i = 0; i < kWrites; ++i) {
        sdl.put(Principal::component("w"), "n", std::to_string(t) + ":" + std::to_string(i % 7), std::to_string(i));
      }
    });
  }
  for (auto& th : threads) th.join();
  REQUIRE(versions.size() == kThreads * kWrites);
  CHECK(std::is_sorted(versions.begin(), versions.end()));
  CHECK(std::adjacent_find(versions.begin(), versions.end()) == versions.end());
  CHECK(sdl.version() == kThreads * kWrites);
  CHECK(sdl.keys("n").size() == kThreads * 7);
}

// --- descriptors -------------------------------------------------------

TEST_CASE("descriptor parse and round trip") {
  const auto d = parse_descriptor(
      "# slicing\n"
      "name = slicing-control\n"
      "version = 1.2\n"
      "priority = 5\n"
      "consumed_data = A, policies\n"
      "produced_data = B\n"
      "control_capabilities = radio_resource_allocation\n"
      "loop_period_ms = 100\n"
      "model_path = models/m1.json\n"
      "step = 5\n");
  CHECK(d.name == "slicing-control");
  CHECK(d.priority == 5);
  CHECK(d.consumed_data == std::vector<std::string>{"A", "policies"});
  CHECK(d.can_control(kRra));
  CHECK_FALSE(d.can_control(kMobility));
  CHECK(d.loop_period_ms == 100);
  CHECK(d.params.at("step") == "5");
  const auto again = parse_descriptor(to_text(d));
  CHECK(to_text(again) == to_text(d));

  try {
    parse_descriptor("name = x\nthis line has no equals\n");
    FAIL("expected parse_error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::parse_error);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK(errc_of([] { parse_descriptor("name = x\ncontrol_capabilities = warp_drive\n"); }) == Errc::parse_error);
}

TEST_CASE("conflict order: priority then name") {
  auto a = probe_descriptor("alpha", 1);
  auto b = probe_descriptor("beta", 2);
  CHECK(outranks(b, a));
  b.priority = 1;
  CHECK(outranks(a, b));
  CHECK_FALSE(outranks(b, a));
}

// --- verifier ----------------------------------------------------------

TEST_CASE("verifier verdicts against hand-computed means") {
  const VerifyParams p;  // V = 2000, 5%, 3 samples
  // before: 100, 100, 100 in [t-V, t); after: 120 x3 in (t, t+V]
  const auto up = series({{-1500, 100}, {-1000, 100}, {-1, 100}, {1, 120}, {1000, 120}, {2000, 120}});
  auto r = verify(up, 0, true, p);
  CHECK(r.verdict == Verdict::improved);
  CHECK(r.change == doctest::Approx(0.20));
  CHECK(verify(up, 0, false, p).verdict == Verdict::degraded);

  // a sample at exactly t belongs to neither window; t-V is inside, t+V+1 is not
  const auto edges = series({{-2000, 100}, {-10, 100}, {-5, 100}, {0, 999}, {10, 102}, {20, 102}, {2000, 102}, {2001, 999}});
  r = verify(edges, 0, true, p);
  CHECK(r.before_samples == 3);
  CHECK(r.after_samples == 3);
  CHECK(r.verdict == Verdict::neutral);  // +2% is inside the 5% band

  const auto thin = series({{-100, 1}, {-50, 1}, {50, 5}, {100, 5}, {150, 5}});
  CHECK(verify(thin, 0, true, p).verdict == Verdict::insufficient_data);

  CHECK_FALSE(higher_is_better(e2sm::metric::latency_proxy_ms));
  CHECK(higher_is_better(e2sm::metric::tx_bytes));
}

TEST_CASE("kpm history drops samples older than the retention") {
  KpmHistory h(1000);
  const auto scope = e2sm::KpmScope::slice(1, 1);
  for (TimeMs t = 0; t <= 3000; t += 100) h.add("n", {"tx_bytes", scope, t, double(t)});
  const auto s = h.series("n", scope, "tx_bytes");
  REQUIRE_FALSE(s.empty());
  CHECK(s.front().t >= 2000);
  CHECK(s.back().t == 3000);
  CHECK(h.series("n", e2sm::KpmScope::slice(1, 2), "tx_bytes").empty());
}

// --- subscriptions -----------------------------------------------------

TEST_CASE("identical subscriptions merge into one wire subscription for N xApps") {
  for (int n = 1; n <= 8; ++n) {
    CAPTURE(n);
    RicBed bed(mobility_config());
    std::vector<Probe*> probes;
    for (int i = 0; i < n; ++i) {
      probes.push_back(&deploy_probe(bed.ric, probe_descriptor("x" + std::to_string(i)), [](Probe& p) {
        p.start = [](XappContext& ctx) {
          ctx.subscribe("du-1", sim::kKpmFunctionId, kpm_trigger(100),
                        kpm_actions(e2sm::KpmScope::slice(1, 1), {"tx_bytes"}));
        };
      }));
    }
    bed.settle();
    CHECK(bed.ric.wire_subscription_count() == 1);
    CHECK(bed.agent().subscription_count() == 1);
    CHECK(bed.ric.metrics().at("subscriptions.wire_requests") == 1);
    bed.run(1000);
    const auto sent = bed.agent().stats().indications_sent;
    CHECK(sent == 10);
    for (auto* p : probes) {
      REQUIRE(p->subscriptions.size() == 1);
      CHECK(p->subscriptions[0].kind == SubscriptionEvent::Kind::active);
      REQUIRE(p->indications.size() == sent);
      CHECK(p->indications.back().indication == probes[0]->indications.back().indication);
    }
    CHECK(bed.ric.subscriber_count(probes[0]->subscriptions[0].handle) == static_cast<std::size_t>(n));

    for (int i = 0; i < n; ++i) {
      bed.ric.terminate("x" + std::to_string(i));
      bed.settle();
      const bool last = i == n - 1;
      CHECK(bed.agent().subscription_count() == (last ? 0u : 1u));
    }
    CHECK(bed.ric.metrics().at("subscriptions.wire_deletes") == 1);
    CHECK(bed.ric.wire_subscription_count() == 0);
  }
}

TEST_CASE("subscriptions differing in period are not merged") {
  RicBed bed(mobility_config());
  auto& a = deploy_probe(bed.ric, probe_descriptor("a"));
  auto& b = deploy_probe(bed.ric, probe_descriptor("b"));
  (void)a;
  (void)b;
  bed.ric.subscribe("a", "du-1", sim::kKpmFunctionId, kpm_trigger(100), kpm_actions(e2sm::KpmScope::node(), {"tx_bytes"}));
  bed.ric.subscribe("b", "du-1", sim::kKpmFunctionId, kpm_trigger(200), kpm_actions(e2sm::KpmScope::node(), {"tx_bytes"}));
  bed.settle();
  CHECK(bed.ric.wire_subscription_count() == 2);
  CHECK(bed.agent().subscription_count() == 2);
}

TEST_CASE("subscribe to unknown node or function") {
  RicBed bed(mobility_config());
  deploy_probe(bed.ric, probe_descriptor("a"));
  CHECK(errc_of([&] { bed.ric.subscribe("a", "du-1", 9, kpm_trigger(100), {}); }) == Errc::unknown_function);
  CHECK(errc_of([&] { bed.ric.subscribe("a", "du-9", 0, kpm_trigger(100), {}); }) == Errc::unknown_node);
  CHECK(bed.ric.wire_subscription_count() == 0);
}

TEST_CASE("a subscription refused by the node reaches every merged subscriber") {
  RicBed bed(mobility_config());
  auto& a = deploy_probe(bed.ric, probe_descriptor("a"));
  auto& b = deploy_probe(bed.ric, probe_descriptor("b"));
  // period outside the near-RT band
  for (const char* x : {"a", "b"}) {
    bed.ric.subscribe(x, "du-1", sim::kKpmFunctionId, kpm_trigger(5), kpm_actions(e2sm::KpmScope::node(), {"tx_bytes"}));
  }
  bed.settle();
  for (auto* p : {&a, &b}) {
    REQUIRE(p->subscriptions.size() == 1);
    CHECK(p->subscriptions[0].kind == SubscriptionEvent::Kind::failed);
  }
  CHECK(bed.ric.wire_subscription_count() == 0);
}

// --- raw E2 edge cases -------------------------------------------------

struct RawBed {
  transport::LoopbackHub hub;
  std::unique_ptr<transport::Listener> listener = hub.listen("ric:e2");
  NearRtRic ric;
};

TEST_CASE("messages before setup get an error indication") {
  RawBed b;
  RawNode n(b.hub, *b.listener, b.ric);
  n.send(e2::ServiceUpdate{});
  b.ric.poll();
  const auto errs = bodies_of<e2::ErrorIndication>(n.drain());
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].cause.detail.find("UnknownNode") != std::string::npos);
}

TEST_CASE("undecodable frame gets an error indication") {
  RawBed b;
  RawNode n(b.hub, *b.listener, b.ric);
  n.conn->send(Bytes{0xff, 0x00, 0x01});
  b.ric.poll();
  CHECK(bodies_of<e2::ErrorIndication>(n.drain()).size() == 1);
  CHECK(b.ric.metrics().at("e2.rx_malformed") == 1);
}

TEST_CASE("indications for unknown subscriptions are counted as orphans") {
  RawBed b;
  RawNode n(b.hub, *b.listener, b.ric);
  n.send(RawNode::setup("du-9"));
  b.ric.poll();
  REQUIRE(bodies_of<e2::SetupResponse>(n.drain()).size() == 1);
  e2::Indication ind;
  ind.request_id = {1, 77};
  n.send(ind);
  n.send(ind);
  b.ric.poll();
  CHECK(b.ric.metrics().at("indications.orphan") == 2);
}

TEST_CASE("setup populates the R-NIB and mirrors it to the SDL") {
  RawBed b;
  RawNode n(b.hub, *b.listener, b.ric);
  n.send(RawNode::setup("du-9"));
  b.ric.poll();
  const auto entry = b.ric.rnib("du-9");
  REQUIRE(entry);
  CHECK(entry->node_kind == "du");
  CHECK(entry->functions.size() == 2);
  REQUIRE(entry->cells.size() == 1);
  CHECK(entry->cells[0].global_id == 0x1001);
  const auto j = nlohmann::json::parse(b.ric.sdl().get(ns::rnib, "du-9"));
  CHECK(j["connected"] == true);
  CHECK(j["functions"].size() == 2);
}

TEST_CASE("a second setup from the same node replaces the first") {
  RawBed b;
  RawNode first(b.hub, *b.listener, b.ric);
  first.send(RawNode::setup("du-9"));
  b.ric.poll();
  first.drain();
  deploy_probe(b.ric, probe_descriptor("a"));
  b.ric.subscribe("a", "du-9", 0, kpm_trigger(100), kpm_actions(e2sm::KpmScope::node(), {"tx_bytes"}));
  CHECK(b.ric.wire_subscription_count() == 1);

  RawNode second(b.hub, *b.listener, b.ric);
  second.send(RawNode::setup("du-9"));
  b.ric.poll();
  CHECK(bodies_of<e2::SetupResponse>(second.drain()).size() == 1);
  first.drain();
  CHECK(first.conn->try_recv().state == transport::Poll::State::closed);
  CHECK(b.ric.rnib().size() == 1);
  CHECK(b.ric.wire_subscription_count() == 0);
  auto& probe = dynamic_cast<Probe&>(*b.ric.xapp("a"));
  REQUIRE_FALSE(probe.subscriptions.empty());
  CHECK(probe.subscriptions.back().kind == SubscriptionEvent::Kind::ended);
}

TEST_CASE("service update removing a function ends its subscriptions") {
  RicBed bed(mobility_config());
  auto& a = deploy_probe(bed.ric, probe_descriptor("a"));
  bed.ric.subscribe("a", "du-1", sim::kKpmFunctionId, kpm_trigger(100), kpm_actions(e2sm::KpmScope::node(), {"tx_bytes"}));
  bed.settle();
  REQUIRE(a.subscriptions.size() == 1);
  bed.agent().send_service_update(e2::ServiceUpdate{{}, {}, {sim::kKpmFunctionId}});
  bed.settle();
  REQUIRE(a.subscriptions.size() == 2);
  CHECK(a.subscriptions[1].kind == SubscriptionEvent::Kind::ended);
  CHECK(bed.ric.wire_subscription_count() == 0);
  CHECK(bed.ric.rnib("du-1")->functions.size() == 1);
  CHECK(errc_of([&] {
          bed.ric.subscribe("a", "du-1", sim::kKpmFunctionId, kpm_trigger(100), kpm_actions(e2sm::KpmScope::node(), {"tx_bytes"}));
        }) == Errc::unknown_function);
}

// --- conflicts ---------------------------------------------------------

TEST_CASE("same-instant conflict: the higher priority xApp wins") {
  RicBed bed(mobility_config());
  auto& lo = deploy_probe(bed.ric, probe_descriptor("lo", 1, {kRra}));
  auto& hi = deploy_probe(bed.ric, probe_descriptor("hi", 2, {kRra}));
  bed.ric.submit_control("lo", "du-1", {scheduler(1, 1)}, std::nullopt);
  bed.ric.submit_control("hi", "du-1", {scheduler(1, 1)}, std::nullopt);
  bed.settle();
  REQUIRE(lo.outcomes.size() == 1);
  REQUIRE(hi.outcomes.size() == 1);
  CHECK(hi.outcomes[0].kind == ControlOutcome::Kind::acknowledged);
  CHECK(lo.outcomes[0].kind == ControlOutcome::Kind::conflict_rejected);
  CHECK(lo.outcomes[0].holder == "hi");
  CHECK(bed.agent().stats().controls_acked == 1);
}

TEST_CASE("same-instant conflict at equal priority: the smaller name wins") {
  RicBed bed(mobility_config());
  auto& beta = deploy_probe(bed.ric, probe_descriptor("beta", 1, {kRra}));
  auto& alpha = deploy_probe(bed.ric, probe_descriptor("alpha", 1, {kRra}));
  bed.ric.submit_control("beta", "du-1", {scheduler(1, 1)}, std::nullopt);
  bed.ric.submit_control("alpha", "du-1", {scheduler(1, 1)}, std::nullopt);
  bed.settle();
  CHECK(alpha.outcomes.at(0).kind == ControlOutcome::Kind::acknowledged);
  CHECK(beta.outcomes.at(0).kind == ControlOutcome::Kind::conflict_rejected);
}

TEST_CASE("a held lock rejects a later writer until the window elapses") {
  RicBed bed(mobility_config());
  auto& a = deploy_probe(bed.ric, probe_descriptor("a", 1, {kRra}));
  auto& b = deploy_probe(bed.ric, probe_descriptor("b", 9, {kRra}));
  bed.run(10);
  const TimeMs t0 = bed.ric.now();
  bed.ric.submit_control("a", "du-1", {scheduler(1, 1)}, std::nullopt);
  bed.settle();
  bed.run(500);
  // self-write inside the window does not extend the lock
  bed.ric.submit_control("a", "du-1", {scheduler(1, 1, e2sm::SchedulerKind::round_robin)}, std::nullopt);
  bed.settle();
  bed.run_until(t0 + 999);
  bed.ric.submit_control("b", "du-1", {scheduler(1, 1)}, std::nullopt);
  bed.settle();
  bed.run_until(t0 + 1000);
  bed.ric.submit_control("b", "du-1", {scheduler(1, 1)}, std::nullopt);
  bed.settle();
  REQUIRE(a.outcomes.size() == 2);
  CHECK(a.outcomes[1].kind == ControlOutcome::Kind::acknowledged);
  REQUIRE(b.outcomes.size() == 2);
  CHECK(b.outcomes[0].kind == ControlOutcome::Kind::conflict_rejected);
  CHECK(b.outcomes[0].holder == "a");
  CHECK(b.outcomes[1].kind == ControlOutcome::Kind::acknowledged);
}

TEST_CASE("controls on disjoint targets never conflict") {
  RicBed bed(mobility_config());
  auto& a = deploy_probe(bed.ric, probe_descriptor("a", 1, {kRra}));
  auto& b = deploy_probe(bed.ric, probe_descriptor("b", 2, {kRra}));
  bed.ric.submit_control("a", "du-1", {scheduler(1, 1)}, std::nullopt);
  bed.ric.submit_control("b", "du-1", {scheduler(1, 2)}, std::nullopt);
  bed.ric.submit_control("b", "du-1", {scheduler(2, 1)}, std::nullopt);
  bed.settle();
  CHECK(a.outcomes.at(0).kind == ControlOutcome::Kind::acknowledged);
  CHECK(b.outcomes.at(0).kind == ControlOutcome::Kind::acknowledged);
  CHECK(b.outcomes.at(1).kind == ControlOutcome::Kind::acknowledged);
  CHECK(bed.ric.locks().size() == 3);
}

TEST_CASE("lock exclusivity holds under random contention") {
  struct Sub {
    std::string xapp;
    std::pair<std::uint32_t, std::uint32_t> key;
    TimeMs at;
  };
  constexpr TimeMs W = 1000;
  for (unsigned seed : {1u, 2u, 3u, 4u}) {
    CAPTURE(seed);
    RicBed bed(mobility_config());
    const std::vector<std::string> names{"a", "b", "c"};
    std::map<std::string, Probe*> probes;
    for (std::size_t i = 0; i < names.size(); ++i) {
      probes[names[i]] = &deploy_probe(bed.ric, probe_descriptor(names[i], int(i % 2), {kRra}));
    }
    std::mt19937 rng(seed);
    std::map<ControlTicket, Sub> subs;
    for (int ms = 0; ms < 4000; ++ms) {
      bed.ran->advance();
      bed.ric.advance_to(bed.ran->sim().now());
      for (const auto& x : names) {
        if (rng() % 40 != 0) continue;
        const std::uint32_t cell = 1 + rng() % 2;
        const std::uint32_t slice = rng() % 2;
        auto t = bed.ric.submit_control(x, "du-1", {scheduler(cell, slice)}, std::nullopt);
        subs[t] = {x, {cell, slice}, bed.ric.now()};
      }
      bed.settle();
    }
    bed.run(W);
    // accepted writes per key in time order
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<Sub>> accepted;
    std::vector<std::pair<Sub, std::string>> rejected;
    std::size_t outcomes = 0;
    for (const auto& [name, p] : probes) {
      for (const auto& o : p->outcomes) {
        ++outcomes;
        const auto& s = subs.at(o.ticket);
        CHECK(s.xapp == name);
        if (o.kind == ControlOutcome::Kind::conflict_rejected) {
          CHECK(o.holder != name);
          rejected.emplace_back(s, o.holder);
        } else {
          CHECK(o.kind == ControlOutcome::Kind::acknowledged);
          accepted[s.key].push_back(s);
        }
      }
    }
    CHECK(outcomes == subs.size());
    CHECK_FALSE(rejected.empty());
    for (auto& [key, list] : accepted) {
      std::stable_sort(list.begin(), list.end(), [](const Sub& a, const Sub& b) { return a.at < b.at; });
      // a run of writes by one xApp starts at an acquisition; the next
      // writer's run may start only a full window after it
      TimeMs run_start = list.front().at;
      for (std::size_t i = 1; i < list.size(); ++i) {
        if (list[i].xapp == list[i - 1].xapp) continue;
        CHECK(list[i].at >= run_start + W);
        run_start = list[i].at;
      }
    }
    for (const auto& [s, holder] : rejected) {
      const auto& list = accepted[s.key];
      CHECK(std::any_of(list.begin(), list.end(), [&](const Sub& w) {
        return w.xapp == holder && w.at <= s.at && w.at > s.at - W;
      }));
    }
  }
}

TEST_CASE("control capability gate") {
  RicBed bed(mobility_config());
  deploy_probe(bed.ric, probe_descriptor("a", 1, {kRra}));
  CHECK(errc_of([&] {
          bed.ric.submit_control("a", "du-1", {{e2sm::HandoverCommand{7, 0x1002}}}, std::nullopt);
        }) == Errc::unsupported_domain);
  CHECK(errc_of([&] { bed.ric.submit_control("a", "du-7", {scheduler(1, 1)}, std::nullopt); }) == Errc::unknown_node);
  CHECK(errc_of([&] { bed.ric.submit_control("nobody", "du-1", {scheduler(1, 1)}, std::nullopt); }) ==
        Errc::not_onboarded);
}

TEST_CASE("node refusal arrives as a denied outcome") {
  RicBed bed(mobility_config());
  auto& a = deploy_probe(bed.ric, probe_descriptor("a", 1, {kRra}));
  bed.ric.submit_control("a", "du-1", {{e2sm::SlicePrbQuota{1, 1, 500, 0.0, 1.0}}}, std::nullopt);
  bed.settle();
  REQUIRE(a.outcomes.size() == 1);
  CHECK(a.outcomes[0].kind == ControlOutcome::Kind::denied);
  CHECK(a.outcomes[0].cause.detail.find("InfeasibleQuota") != std::string::npos);
}

TEST_CASE("acknowledged quota is verified against KPM history") {
  RicBed bed(mobility_config());
  auto& a = deploy_probe(bed.ric, probe_descriptor("a", 1, {kRra}));
  bed.ric.subscribe("a", "du-1", sim::kKpmFunctionId, kpm_trigger(100),
                    kpm_actions(e2sm::KpmScope::node(), {"tx_bytes", "latency_proxy_ms", "prb_granted"}));
  bed.run(2500);
  const auto ticket = bed.ric.submit_control("a", "du-1", {{e2sm::SlicePrbQuota{1, 1, 5, 0.0, 1.0}}}, std::nullopt);
  bed.settle();
  REQUIRE(a.outcomes.at(0).kind == ControlOutcome::Kind::acknowledged);
  bed.run(1990);
  CHECK(bed.ric.verifications().empty());
  bed.run(20);
  REQUIRE(bed.ric.verifications().size() == 3);
  for (const auto& v : bed.ric.verifications()) {
    CHECK(v.ticket == ticket);
    CHECK(v.scope == e2sm::KpmScope::slice(1, 1));
    CHECK(v.result.before_samples >= 3);
    CHECK(v.result.after_samples >= 3);
  }
  // the UE offers 100 B/ms on slice 1 with or without the quota
  const auto tx = std::find_if(bed.ric.verifications().begin(), bed.ric.verifications().end(),
                               [](const auto& v) { return v.metric == "tx_bytes"; });
  CHECK(tx->result.verdict == Verdict::neutral);
  CHECK(tx->result.before == doctest::Approx(10000.0));
}

TEST_CASE("control timeout when the node stays silent") {
  RawBed b;
  RawNode n(b.hub, *b.listener, b.ric);
  n.send(RawNode::setup("du-9"));
  b.ric.poll();
  n.drain();
  auto& a = deploy_probe(b.ric, probe_descriptor("a", 1, {kRra}));
  b.ric.submit_control("a", "du-9", {scheduler(1, 1)}, std::nullopt);
  b.ric.poll();
  CHECK(bodies_of<e2::ControlRequest>(n.drain()).size() == 1);
  b.ric.advance_to(999);
  CHECK(a.outcomes.empty());
  b.ric.advance_to(1000);
  REQUIRE(a.outcomes.size() == 1);
  CHECK(a.outcomes[0].kind == ControlOutcome::Kind::timeout);
}

// --- inserts -----------------------------------------------------------

TEST_CASE("handover insert routed to the mobility xApp and accepted") {
  RicBed bed(mobility_config());
  auto& m = deploy_probe(bed.ric, probe_descriptor("mob", 1, {kMobility}), [](Probe& p) {
    p.insert = [](XappContext& ctx, const InsertEvent& e) {
      const auto target = 0x1000 + e.insert.candidate_target_cell_id;
      ctx.submit_control(e.node_id, {{e2sm::HandoverCommand{e.insert.ue_id, target}}}, e.call_process_id);
    };
  });
  bed.ric.subscribe("mob", "du-1", sim::kRcFunctionId, e2sm::sm_encode(e2sm::RcEventTrigger{}), insert_actions());
  bed.run_until(7000);
  REQUIRE(m.inserts.size() == 1);
  const auto& ins = m.inserts[0];
  CHECK(ins.insert.ue_id == 7);
  CHECK(ins.insert.slice_id == 1);
  CHECK(ins.deadline == 5574 + 10);
  CHECK(bed.ric.insert_stats().received == 1);
  CHECK(bed.ric.insert_stats().accepted == 1);
  CHECK(bed.agent().stats().inserts_accepted == 1);
  CHECK(bed.ric.pending_inserts() == 0);
  REQUIRE(m.outcomes.size() == 1);
  CHECK(m.outcomes[0].kind == ControlOutcome::Kind::acknowledged);
  const auto ue = bed.ric.uenib(7);
  REQUIRE(ue);
  REQUIRE(ue->contexts.size() == 1);
  CHECK(ue->contexts[0].serving_cell == 2);
  CHECK(ue->contexts[0].slice_id == 1);
  const auto j = nlohmann::json::parse(bed.ric.sdl().get(ns::uenib, "7"));
  CHECK(j["contexts"][0]["serving_cell"] == 2);
}

TEST_CASE("unanswered insert times out; a late reply gets a local timeout") {
  RicBed bed(mobility_config());
  auto& m = deploy_probe(bed.ric, probe_descriptor("mob", 1, {kMobility}));
  bed.ric.subscribe("mob", "du-1", sim::kRcFunctionId, e2sm::sm_encode(e2sm::RcEventTrigger{}), insert_actions());
  bed.run_until(5574 + 9);
  REQUIRE(m.inserts.size() == 1);
  CHECK(bed.ric.pending_inserts() == 1);
  bed.step();
  CHECK(bed.ric.pending_inserts() == 0);
  CHECK(bed.ric.insert_stats().timed_out == 1);
  const auto controls_before = bed.agent().stats().controls_acked + bed.agent().stats().controls_failed;
  bed.ric.submit_control("mob", "du-1", {{e2sm::HandoverCommand{7, 0x1002}}}, m.inserts[0].call_process_id);
  bed.settle();
  REQUIRE(m.outcomes.size() == 1);
  CHECK(m.outcomes[0].kind == ControlOutcome::Kind::timeout);
  CHECK(bed.agent().stats().controls_acked + bed.agent().stats().controls_failed == controls_before);
}

TEST_CASE("insert with no mobility-capable subscriber is undeliverable") {
  RicBed bed(mobility_config());
  deploy_probe(bed.ric, probe_descriptor("watcher"));
  bed.ric.subscribe("watcher", "du-1", sim::kRcFunctionId, e2sm::sm_encode(e2sm::RcEventTrigger{}), insert_actions());
  bed.run_until(5600);
  CHECK(bed.ric.insert_stats().received == 1);
  CHECK(bed.ric.insert_stats().undeliverable == 1);
}

// --- xApp lifecycle and topics -----------------------------------------

TEST_CASE("onboarding and deployment errors") {
  NearRtRic ric;
  CHECK(errc_of([&] { ric.deploy("ghost"); }) == Errc::not_onboarded);
  deploy_probe(ric, probe_descriptor("a"));
  CHECK(errc_of([&] { ric.onboard(probe_descriptor("a")); }) == Errc::duplicate_name);
  CHECK(errc_of([&] { ric.deploy("a"); }) == Errc::duplicate_name);
  ric.terminate("a");
  CHECK_FALSE(ric.is_deployed("a"));
  CHECK_FALSE(ric.sdl().has_namespace(ns::xapp("a")));
}

TEST_CASE("xApp ticks follow the loop period from deployment") {
  NearRtRic ric;
  ric.advance_to(50);
  auto d = probe_descriptor("a");
  d.loop_period_ms = 100;
  auto& a = deploy_probe(ric, d);
  for (TimeMs t = 51; t <= 500; ++t) ric.advance_to(t);
  CHECK(a.ticks == std::vector<TimeMs>{150, 250, 350, 450});
}

TEST_CASE("xApps write only their own SDL namespace") {
  NearRtRic ric;
  deploy_probe(ric, probe_descriptor("a"), [](Probe& p) { p.start = [](XappContext& ctx) { ctx.sdl_put("k", "v"); }; });
  CHECK(ric.sdl().get(ns::xapp("a"), "k") == "v");
  CHECK(errc_of([&] { ric.sdl().put(Principal::xapp("a"), ns::rnib, "x", "y"); }) == Errc::forbidden);
}

TEST_CASE("topics: undeclared publish fails, consumers see the last value") {
  NearRtRic ric;
  auto prod = probe_descriptor("prod");
  prod.produced_data = {"B"};
  auto cons = probe_descriptor("cons");
  cons.consumed_data = {"B"};
  deploy_probe(ric, prod);
  auto& c = deploy_probe(ric, cons);
  CHECK(errc_of([&] { ric.publish("prod", "C", "1"); }) == Errc::undeclared_topic);
  CHECK(errc_of([&] { ric.publish("cons", "B", "1"); }) == Errc::undeclared_topic);
  ric.publish("prod", "B", "1");
  ric.publish("prod", "B", "2");
  ric.advance_to(1);
  REQUIRE(c.data.size() == 2);
  CHECK(c.data[1].value == "2");
  CHECK(ric.sdl().get(ns::topic("B"), "latest") == "2");
}

TEST_CASE("a throwing xApp callback is contained") {
  NearRtRic ric;
  auto d = probe_descriptor("bad");
  d.loop_period_ms = 10;
  deploy_probe(ric, d, [](Probe& p) { p.tick = [](XappContext&) { throw std::runtime_error("boom"); }; });
  ric.advance_to(10);
  ric.advance_to(20);
  CHECK(ric.metrics().at("xapp.callback_errors") == 2);
  CHECK(ric.is_deployed("bad"));
}

// --- A1 ----------------------------------------------------------------

struct A1Bed {
  transport::LoopbackHub hub;
  std::unique_ptr<transport::Listener> listener = hub.listen("ric:a1");
  NearRtRic ric;
  std::unique_ptr<transport::Connection> smo;

  A1Bed() {
    smo = hub.connect({"ric:a1", transport::Role::ric});
    ric.attach_a1(listener->try_accept());
  }
  void send(const a1::Message& m) {
    smo->send(a1::encode(m));
    ric.poll();
  }
  std::vector<a1::Message> drain() {
    std::vector<a1::Message> out;
    for (;;) {
      auto p = smo->try_recv();
      if (p.state != transport::Poll::State::message) return out;
      out.push_back(a1::decode(p.payload));
    }
  }
};

a1::Policy latency_policy(const std::string& id, std::uint32_t type = a1::kSlicingPolicyType) {
  a1::Policy p;
  p.policy_id = id;
  p.policy_type_id = type;
  p.scope.kind = a1::PolicyScope::Kind::slice;
  p.scope.slice_id = 1;
  p.statements = {{a1::PolicyStatement::Kind::objective, "latency_proxy_ms", e2sm::Comparator::le, 20.0}};
  return p;
}

a1::Message op(std::string name, std::optional<a1::Policy> p = std::nullopt, std::string id = "") {
  a1::Message m;
  m.op = std::move(name);
  m.policy = std::move(p);
  m.policy_id = std::move(id);
  return m;
}

TEST_CASE("A1 policy ingest, feedback and delete") {
  A1Bed b;
  auto d = probe_descriptor("slicer");
  d.consumed_data = {"policies"};
  auto& s = deploy_probe(b.ric, d, [](Probe& p) {
    p.data_hook = [](XappContext& ctx, const SdlChange& c) {
      if (c.value) ctx.ack_policy(c.key, true);
    };
  });
  b.send(op("create", latency_policy("p1")));
  REQUIRE(s.data.size() == 1);
  CHECK(s.data[0].key == "p1");
  const auto stored = a1::policy_from_json(nlohmann::json::parse(b.ric.sdl().get(ns::topic("policies"), "p1")));
  CHECK(stored == latency_policy("p1"));
  auto out = b.drain();
  REQUIRE(out.size() == 1);
  CHECK(out[0].op == "feedback");
  CHECK(out[0].feedback->enforced);

  // an update that keeps the policy enforced sends no new feedback
  b.send(op("update", latency_policy("p1")));
  CHECK(b.drain().empty());

  b.send(op("query", std::nullopt, "p1"));
  out = b.drain();
  REQUIRE(out.size() == 1);
  CHECK(out[0].op == "query_result");
  CHECK(out[0].policies.size() == 1);

  b.send(op("delete", std::nullopt, "p1"));
  out = b.drain();
  REQUIRE(out.size() == 1);
  CHECK(out[0].op == "feedback");
  CHECK_FALSE(out[0].feedback->enforced);
  CHECK_FALSE(b.ric.sdl().find(ns::topic("policies"), "p1"));
  REQUIRE(s.data.size() == 3);
  CHECK_FALSE(s.data[2].value);
}

TEST_CASE("A1 errors") {
  A1Bed b;
  b.send(op("create", latency_policy("p1", 1)));
  auto out = b.drain();
  REQUIRE(out.size() == 1);
  CHECK(out[0].error == "UnknownPolicyType");

  auto bad = latency_policy("p2");
  bad.statements[0].name = "happiness";
  b.send(op("create", bad));
  CHECK(b.drain().at(0).error == "MalformedPolicy");

  b.send(op("delete", std::nullopt, "nope"));
  CHECK(b.drain().at(0).error == "UnknownId");
  b.send(op("update", latency_policy("nope")));
  CHECK(b.drain().at(0).error == "UnknownId");

  b.smo->send(to_bytes("{not json"));
  b.ric.poll();
  CHECK(b.drain().at(0).error == "SchemaViolation");
  CHECK(b.ric.sdl().keys(ns::topic("policies")).empty());
}

TEST_CASE("A1 enrichment information lands on its topic") {
  A1Bed b;
  auto d = probe_descriptor("c");
  d.consumed_data = {"A"};
  auto& c = deploy_probe(b.ric, d);
  a1::Message m;
  m.op = "ei";
  m.ei = a1::EiMessage{"A", "forecast", 3, a1::to_json(a1::Forecast{{10.0, 20.0}, false})};
  b.send(m);
  REQUIRE(c.data.size() == 1);
  const auto j = nlohmann::json::parse(*c.data[0].value);
  CHECK(j["epoch"] == 3);
  CHECK(a1::forecast_from_json(j["payload"]).demand_prb == std::vector<double>{10.0, 20.0});
}

// --- determinism -------------------------------------------------------

TEST_CASE("identical runs give identical RIC state hashes") {
  auto run = [] {
    RicBed bed(mobility_config());
    deploy_probe(bed.ric, probe_descriptor("mob", 1, {kMobility, kRra}), [](Probe& p) {
      p.start = [](XappContext& ctx) {
        ctx.subscribe("du-1", sim::kKpmFunctionId, kpm_trigger(100), kpm_actions(e2sm::KpmScope::node(), {"tx_bytes"}));
        ctx.subscribe("du-1", sim::kRcFunctionId, e2sm::sm_encode(e2sm::RcEventTrigger{}), insert_actions());
      };
      p.insert = [](XappContext& ctx, const InsertEvent& e) {
        ctx.submit_control(e.node_id, {{e2sm::HandoverDeny{e.insert.ue_id}}}, e.call_process_id);
      };
    });
    bed.run(6000);
    return std::make_pair(bed.ric.state_hash(), bed.ric.insert_stats().denied);
  };
  const auto a = run();
  CHECK(a == run());
  CHECK(a.second >= 1);
}
