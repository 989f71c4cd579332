#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "oran/common/error.hpp"
#include "sim_fixtures.hpp"

using namespace oran;
using namespace oran::sim;
using namespace oran::testing;

namespace {

double record_value(const e2sm::KpmIndicationMessage& m, std::string_view metric, std::uint32_t slice_id) {
  for (const auto& r : m.records) {
    if (r.metric == metric && r.scope.slice_id == slice_id) return r.value;
  }
  FAIL("metric missing");
  return 0.0;
}

}  // namespace

TEST_CASE("rsrp closed form") {
  CHECK(rsrp_dbm(1.0) == doctest::Approx(-40.0));
  CHECK(rsrp_dbm(0.2) == doctest::Approx(-40.0));
  CHECK(rsrp_dbm(100.0) == doctest::Approx(-100.0));
  CHECK(rsrp_dbm(distance({0, 0}, {30, 40})) == rsrp_dbm(distance({0, 0}, {-50, 0})));
}

TEST_CASE("single UE at constant demand is served every tick") {
  SimConfig cfg;
  cfg.nodes = {{"du-1", {cell(1, 0, {0, 10, 0})}}};
  cfg.ues = {constant_ue(1, 1, 1, 10000.0)};
  RanSim sim(cfg);
  for (int t = 1; t <= 500; ++t) {
    sim.tick();
    REQUIRE(sim.ue(1).buffer == 0);
  }
  // 10 PRB x 1000 bytes each TTI is 10 MB/s
  CHECK(sim.ue(1).counters.served_bytes == 500u * 10000u);
  CHECK(sim.cell(1).slice(1)->counters.prb_granted == 500u * 10u);
}

TEST_CASE("an unserved slice grows linearly") {
  SimConfig cfg;
  cfg.nodes = {{"du-1", {cell(1, 0, {0, 0, 0})}}};
  cfg.ues = {constant_ue(1, 1, 1, 2500.5)};
  RanSim sim(cfg);
  for (int t = 1; t <= 1000; ++t) {
    sim.tick();
    REQUIRE(sim.ue(1).buffer == static_cast<std::uint64_t>(std::floor(2500.5 * t)));
  }
}

TEST_CASE("state hash is a pure function of scenario and seed") {
  auto make = [](std::uint64_t seed) {
    SimConfig cfg = mobility_config();
    cfg.seed = seed;
    for (std::uint64_t i = 0; i < 12; ++i) {
      auto u = constant_ue(100 + i, 1 + i % 2, i % 3, 0.0, {i * 15.0, 5.0});
      u.traffic = {{0, TrafficKind::poisson, 3000.0, 0, 1}, {4000, TrafficKind::periodic, 0, 20000, 7}};
      cfg.ues.push_back(u);
    }
    return cfg;
  };
  auto run = [&](std::uint64_t seed) {
    RanSim sim(make(seed));
    for (int t = 0; t < 10000; ++t) {
      for (const auto& e : sim.tick()) sim.schedule_handover(e.ue_id, e.target_cell);
    }
    return sim.state_hash();
  };
  const auto a = run(42);
  CHECK(a == run(42));
  CHECK(a != run(43));
}

TEST_CASE("byte conservation and PRB accounting under random scenarios") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    SimConfig cfg;
    cfg.seed = rng();
    const auto prb = static_cast<std::uint32_t>(10 + rng() % 90);
    std::vector<std::uint32_t> split{static_cast<std::uint32_t>(rng() % (prb / 2)), 0, 0};
    split[1] = static_cast<std::uint32_t>(rng() % (prb - split[0] + 1));
    split[2] = prb - split[0] - split[1];
    auto c = cell(1, 0, split);
    c.total_prb = prb;
    c.slices[2].scheduler = e2sm::SchedulerKind::highest_buffer_first;
    cfg.nodes = {{"du-1", {c}}};
    const int n = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      auto u = constant_ue(i, 1, static_cast<std::uint32_t>(rng() % 3), 0.0);
      u.traffic = {{0, TrafficKind::poisson, static_cast<double>(rng() % 20000), 0, 1},
                   {500, TrafficKind::periodic, 0, rng() % 50000, static_cast<TimeMs>(1 + rng() % 20)},
                   {900, TrafficKind::constant, static_cast<double>(rng() % 10000) / 3.0, 0, 1}};
      cfg.ues.push_back(u);
    }
    RanSim sim(cfg);
    for (int t = 0; t < 1500; ++t) {
      sim.tick();
      std::uint32_t granted = 0;
      for (const auto& s : sim.cell(1).slices) {
        granted += s.last_granted;
        REQUIRE(s.last_granted <= s.config.dedicated_prb);
        REQUIRE(s.counters.arrived_bytes - s.counters.served_bytes == sim.slice_buffer(1, s.config.slice_id));
      }
      REQUIRE(granted <= prb);
    }
    CHECK(sim.total_arrived() - sim.total_served() == sim.total_buffered());
  }
}

TEST_CASE("round robin splits a slice evenly and rotates the remainder") {
  SimConfig cfg;
  cfg.nodes = {{"du-1", {cell(1, 0, {0, 3, 0})}}};
  cfg.ues = {constant_ue(1, 1, 1, 5000.0), constant_ue(2, 1, 1, 5000.0)};
  RanSim sim(cfg);
  sim.tick();
  // 3 PRBs over two backlogged UEs: first UE in rotation gets 2
  CHECK(sim.ue(1).counters.prb_granted == 2);
  CHECK(sim.ue(2).counters.prb_granted == 1);
  sim.tick();
  CHECK(sim.ue(1).counters.prb_granted == 3);
  CHECK(sim.ue(2).counters.prb_granted == 3);
}

TEST_CASE("highest buffer first serves the largest backlog") {
  SimConfig cfg;
  auto c = cell(1, 0, {0, 4, 0});
  c.slices[1].scheduler = e2sm::SchedulerKind::highest_buffer_first;
  cfg.nodes = {{"du-1", {c}}};
  cfg.ues = {constant_ue(1, 1, 1, 1500.0), constant_ue(2, 1, 1, 3000.0)};
  RanSim sim(cfg);
  sim.tick();
  CHECK(sim.ue(2).counters.prb_granted == 3);
  CHECK(sim.ue(1).counters.prb_granted == 1);
}

TEST_CASE("KPM reports arrive on cadence with consecutive sequence numbers") {
  SimConfig cfg;
  cfg.nodes = {{"du-1", {cell(1, 0)}}};
  cfg.ues = {constant_ue(1, 1, 0, 800.0)};
  Deployment d(cfg);
  auto resp = d.request(kpm_subscription(1, 100, e2sm::KpmScope::node(), {"tx_bytes", "buffer_bytes"}));
  REQUIRE(bodies_of<e2::SubscriptionResponse>(resp).size() == 1);
  std::vector<e2::Indication> got;
  for (int t = 0; t < 10000; ++t) {
    d.rt.advance();
    for (auto& i : bodies_of<e2::Indication>(d.ric.drain())) got.push_back(i);
  }
  REQUIRE(got.size() == 100);
  std::uint64_t served = 0;
  for (std::size_t k = 0; k < got.size(); ++k) {
    CHECK(got[k].sequence_number == k + 1);
    const auto h = e2sm::sm_decode_as<e2sm::KpmIndicationHeader>(got[k].header);
    CHECK(h.collection_start == static_cast<TimeMs>(k * 100));
    const auto m = e2sm::sm_decode_as<e2sm::KpmIndicationMessage>(got[k].message);
    CHECK(m.records.size() == 3 * 2);
    served += static_cast<std::uint64_t>(record_value(m, "tx_bytes", 0));
    // idle slices still report, with zeros
    CHECK(record_value(m, "tx_bytes", 2) == 0.0);
  }
  CHECK(served == d.rt.sim().ue(1).counters.served_bytes);
}

TEST_CASE("UE scope reports only that UE") {
  SimConfig cfg;
  cfg.nodes = {{"du-1", {cell(1, 0)}}};
  cfg.ues = {constant_ue(1, 1, 0, 800.0), constant_ue(2, 1, 1, 900.0)};
  Deployment d(cfg);
  d.request(kpm_subscription(1, 10, e2sm::KpmScope::ue(2), {"tx_bytes"}));
  for (int t = 0; t < 10; ++t) d.rt.advance();
  const auto inds = bodies_of<e2::Indication>(d.ric.drain());
  REQUIRE(inds.size() == 1);
  const auto m = e2sm::sm_decode_as<e2sm::KpmIndicationMessage>(inds[0].message);
  REQUIRE(m.records.size() == 1);
  CHECK(m.records[0].scope == e2sm::KpmScope::ue(2));
  CHECK(m.records[0].value == 9000.0);
}

TEST_CASE("invalid KPM subscriptions fail") {
  SimConfig cfg;
  cfg.nodes = {{"du-1", {cell(1, 0)}}};
  Deployment d(cfg);
  CHECK(bodies_of<e2::SubscriptionFailure>(d.request(kpm_subscription(1, 5, {}, {"tx_bytes"}))).size() == 1);
  auto wrong_kind = kpm_subscription(2, 100, {}, {"tx_bytes"});
  wrong_kind.actions[0].definition = e2sm::sm_encode(e2sm::RcHeader{});
  CHECK(bodies_of<e2::SubscriptionFailure>(d.request(wrong_kind)).size() == 1);
  auto unknown = kpm_subscription(3, 100, {}, {"tx_bytes"});
  unknown.function_id = 9;
  const auto f = bodies_of<e2::SubscriptionFailure>(d.request(unknown));
  REQUIRE(f.size() == 1);
  CHECK(f[0].cause.kind == e2::CauseKind::unsupported);
  CHECK(bodies_of<e2::ErrorIndication>(d.request(e2::SubscriptionDeleteRequest{{9, 9}, 0})).size() == 1);
}

TEST_CASE("insert fires at the analytic A3 crossover tick") {
  Deployment d(mobility_config());
  d.request(insert_subscription(1));
  const auto hit = d.run_until_insert(10000);
  REQUIRE(hit);
  CHECK(hit->first == a3_crossover_tick(200.0, 0.02, 3.0));
  CHECK(hit->first == 5574);
  const auto ins = e2sm::sm_decode_as<e2sm::HandoverInsert>(hit->second.message);
  CHECK(ins.ue_id == 7);
  CHECK(ins.serving_cell_id == 1);
  CHECK(ins.candidate_target_cell_id == 2);
  CHECK(ins.target_rsrp_dbm >= ins.serving_rsrp_dbm + 3.0);
  CHECK(hit->second.call_process_id == ins.call_process_id);
  CHECK(d.rt.sim().ue(7).frozen);
}

TEST_CASE("without an insert subscription the node hands over on its own") {
  Deployment d(mobility_config());
  const auto expected = a3_crossover_tick(200.0, 0.02, 3.0);
  while (d.rt.sim().now() < expected) {
    d.rt.advance();
    CHECK(d.rt.sim().ue(7).serving_cell == 1);
  }
  CHECK(d.rt.agent("du-1").stats().autonomous_handovers == 1);
  d.rt.advance();
  CHECK(d.rt.sim().ue(7).serving_cell == 2);
  CHECK(d.rt.sim().handover_count("du-1") == 1);
}

TEST_CASE("insert replies: accept, deny, unknown call process") {
  SUBCASE("accept") {
    Deployment d(mobility_config());
    d.request(insert_subscription(1, e2::TimeToWait::w100ms));
    auto hit = d.run_until_insert(10000);
    REQUIRE(hit);
    auto out = d.request(control_request(1, e2sm::RcDomain::connected_mobility,
                                         {e2sm::RcControl{e2sm::HandoverCommand{7, 0x1002}}},
                                         hit->second.call_process_id));
    CHECK(bodies_of<e2::ControlAcknowledge>(out).size() == 1);
    d.rt.advance();
    CHECK(d.rt.sim().ue(7).serving_cell == 2);
    CHECK(d.rt.agent("du-1").stats().inserts_accepted == 1);
  }
  SUBCASE("deny") {
    Deployment d(mobility_config());
    d.request(insert_subscription(1, e2::TimeToWait::w100ms));
    auto hit = d.run_until_insert(10000);
    REQUIRE(hit);
    d.request(control_request(1, e2sm::RcDomain::connected_mobility, {e2sm::RcControl{e2sm::HandoverDeny{7}}},
                              hit->second.call_process_id));
    for (int i = 0; i < 200; ++i) d.rt.advance();
    CHECK(d.rt.sim().ue(7).serving_cell == 1);
    CHECK(d.rt.agent("du-1").stats().inserts_denied == 1);
    CHECK(d.rt.agent("du-1").pending_inserts() == 0);
  }
  SUBCASE("unknown call process id") {
    Deployment d(mobility_config());
    auto out = d.request(control_request(1, e2sm::RcDomain::connected_mobility,
                                         {e2sm::RcControl{e2sm::HandoverCommand{7, 0x1002}}}, Bytes{1, 2, 3}));
    const auto f = bodies_of<e2::ControlFailure>(out);
    REQUIRE(f.size() == 1);
    CHECK(f[0].cause.kind == e2::CauseKind::timeout);
  }
}

TEST_CASE("insert wait timer expiry") {
  SUBCASE("execute resumes the handover") {
    Deployment d(mobility_config());
    d.request(insert_subscription(1, e2::TimeToWait::w10ms));
    auto hit = d.run_until_insert(10000);
    REQUIRE(hit);
    const auto t0 = hit->first;
    while (d.rt.sim().now() < t0 + 10) {
      d.rt.advance();
      CHECK(d.rt.sim().ue(7).serving_cell == 1);
    }
    d.rt.advance();
    CHECK(d.rt.sim().ue(7).serving_cell == 2);
    CHECK(d.rt.agent("du-1").stats().inserts_timed_out == 1);
  }
  SUBCASE("abort keeps the UE and backs off") {
    auto cfg = mobility_config();
    cfg.on_insert_timeout = InsertTimeoutAction::abort;
    Deployment d(cfg);
    d.request(insert_subscription(1, e2::TimeToWait::w10ms));
    auto first = d.run_until_insert(10000);
    REQUIRE(first);
    auto second = d.run_until_insert(20000);
    REQUIRE(second);
    CHECK(second->first == first->first + 10 + cfg.insert_backoff_ms);
    CHECK(d.rt.sim().ue(7).serving_cell == 1);
  }
}

TEST_CASE("offset policy raises the A3 margin") {
  Deployment d(mobility_config());
  d.request(insert_subscription(1));
  auto out = d.request(control_request(1, e2sm::RcDomain::connected_mobility,
                                       {e2sm::RcControl{e2sm::OffsetPolicy{"a3_offset_db", 2.0}}}));
  REQUIRE(bodies_of<e2::ControlAcknowledge>(out).size() == 1);
  const auto hit = d.run_until_insert(10000);
  REQUIRE(hit);
  CHECK(hit->first == a3_crossover_tick(200.0, 0.02, 5.0));
  const auto ins = e2sm::sm_decode_as<e2sm::HandoverInsert>(hit->second.message);
  CHECK(ins.target_rsrp_dbm >= ins.serving_rsrp_dbm + 5.0);
}

TEST_CASE("slice quota control reaches the next report") {
  SimConfig cfg;
  cfg.nodes = {{"du-1", {cell(1, 0)}}};
  cfg.ues = {constant_ue(1, 1, 0, 90000.0), constant_ue(2, 1, 1, 90000.0), constant_ue(3, 1, 2, 90000.0)};
  Deployment d(cfg);
  d.request(kpm_subscription(1, 100, e2sm::KpmScope::cell(1), {"prb_granted"}));
  using e2sm::SlicePrbQuota;
  auto out = d.request(control_request(2, e2sm::RcDomain::radio_resource_allocation,
                                       {e2sm::RcControl{SlicePrbQuota{1, 0, 40, 0, 1}},
                                        e2sm::RcControl{SlicePrbQuota{1, 1, 10, 0, 1}},
                                        e2sm::RcControl{SlicePrbQuota{1, 2, 0, 0, 1}}}));
  const auto ack = bodies_of<e2::ControlAcknowledge>(out);
  REQUIRE(ack.size() == 1);
  CHECK(e2sm::sm_decode_as<e2sm::RcControlOutcome>(ack[0].outcome).applied == 3);
  for (int t = 0; t < 100; ++t) d.rt.advance();
  const auto inds = bodies_of<e2::Indication>(d.ric.drain());
  REQUIRE(inds.size() == 1);
  const auto m = e2sm::sm_decode_as<e2sm::KpmIndicationMessage>(inds[0].message);
  CHECK(record_value(m, "prb_granted", 0) == 40.0);
  CHECK(record_value(m, "prb_granted", 1) == 10.0);
  CHECK(record_value(m, "prb_granted", 2) == 0.0);
}

TEST_CASE("control failures") {
  SimConfig cfg;
  cfg.nodes = {{"du-1", {cell(1, 0)}}, {"du-2", {cell(2, 500)}}};
  Deployment d(cfg);
  using e2sm::SlicePrbQuota;
  auto fail_of = [&](const e2::ControlRequest& req) {
    const auto f = bodies_of<e2::ControlFailure>(d.request(req));
    REQUIRE(f.size() == 1);
    return f[0].cause;
  };
  auto c = fail_of(control_request(1, e2sm::RcDomain::radio_resource_allocation,
                                   {e2sm::RcControl{SlicePrbQuota{1, 0, 30, 0, 1}},
                                    e2sm::RcControl{SlicePrbQuota{1, 1, 30, 0, 1}}}));
  CHECK(c.kind == e2::CauseKind::rejected);
  CHECK(c.detail.find("InfeasibleQuota") != std::string::npos);
  // atomic: the first quota of the rejected message was not kept
  CHECK(d.rt.sim().cell(1).slice(0)->config.dedicated_prb == 20);

  c = fail_of(control_request(2, e2sm::RcDomain::radio_resource_allocation,
                              {e2sm::RcControl{SlicePrbQuota{2, 0, 10, 0, 1}}}));
  CHECK(c.detail.find("UnknownTarget") != std::string::npos);

  c = fail_of(control_request(3, e2sm::RcDomain::dual_connectivity, {}));
  CHECK(c.kind == e2::CauseKind::unsupported);

  c = fail_of(control_request(4, e2sm::RcDomain::connected_mobility,
                              {e2sm::RcControl{SlicePrbQuota{1, 0, 10, 0, 1}}}));
  CHECK(c.kind == e2::CauseKind::unsupported);

  e2sm::ControlPolicy bad{{"latency_proxy_ms", e2sm::Comparator::gt, 1.0},
                          e2sm::RcControl{e2sm::SliceScheduler{1, 0, e2sm::SchedulerKind::highest_buffer_first}}};
  c = fail_of(control_request(5, e2sm::RcDomain::radio_resource_allocation, {e2sm::RcControl{bad}}));
  CHECK(c.detail.find("UnknownTarget") != std::string::npos);
}

TEST_CASE("quota is clamped to its ratio bounds") {
  SimConfig cfg;
  cfg.nodes = {{"du-1", {cell(1, 0)}}};
  RanSim sim(cfg);
  sim.apply_controls("du-1", {e2sm::RcControl{e2sm::SlicePrbQuota{1, 2, 2, 0.1, 0.3}}});
  CHECK(sim.cell(1).slice(2)->config.dedicated_prb == 5);
  sim.apply_controls("du-1", {e2sm::RcControl{e2sm::SlicePrbQuota{1, 2, 25, 0.0, 0.2}}});
  CHECK(sim.cell(1).slice(2)->config.dedicated_prb == 10);
}

TEST_CASE("node-local policy switches the scheduler when its trigger holds") {
  SimConfig cfg;
  cfg.nodes = {{"du-1", {cell(1, 0)}}};
  cfg.ues = {constant_ue(1, 1, 1, 0.0)};
  cfg.ues[0].traffic = {{0, TrafficKind::constant, 0.0, 0, 1}, {50, TrafficKind::constant, 30000.0, 0, 1}};
  RanSim sim(cfg);
  e2sm::ControlPolicy p{{"buffer_bytes", e2sm::Comparator::gt, 5000.0},
                        e2sm::RcControl{e2sm::SliceScheduler{1, 1, e2sm::SchedulerKind::highest_buffer_first}}};
  sim.install_policy("du-1", p);
  for (int t = 0; t < 50; ++t) sim.tick();
  CHECK(sim.cell(1).slice(1)->config.scheduler == e2sm::SchedulerKind::round_robin);
  sim.tick();
  CHECK(sim.cell(1).slice(1)->config.scheduler == e2sm::SchedulerKind::highest_buffer_first);
}

TEST_CASE("setup advertises both functions with cell global ids") {
  SimConfig cfg;
  cfg.nodes = {{"du-1", {cell(1, 0), cell(4, 100)}}};
  FakeRic ric;
  RanRuntime rt(cfg, ric.connector());
  rt.start();
  const auto setup = bodies_of<e2::SetupRequest>(ric.drain());
  REQUIRE(setup.size() == 1);
  CHECK(setup[0].node_id == "du-1");
  REQUIRE(setup[0].functions.size() == 2);
  const auto rc = e2sm::sm_decode_as<e2sm::RcFunctionDefinition>(setup[0].functions[1].definition);
  CHECK(rc.cells == std::vector<e2sm::RcCell>{{1, 0x1001}, {4, 0x1004}});
}

TEST_CASE("O1 heartbeats and PM files") {
  SimConfig cfg;
  cfg.nodes = {{"du-1", {cell(1, 0)}}, {"du-2", {cell(2, 500)}}};
  cfg.ues = {constant_ue(1, 1, 0, 700.0)};
  FakeRic ric;
  RanRuntime rt(cfg, ric.connector());
  rt.start();
  for (int t = 0; t < 10000; ++t) rt.advance();
  for (std::size_t n = 0; n < 2; ++n) {
    int beats = 0, ready = 0;
    std::string first_file;
    for (const auto& text : ric.drain_o1(n)) {
      const auto j = nlohmann::json::parse(text);
      if (j["type"] == "heartbeat") ++beats;
      if (j["type"] == "file_ready") {
        if (first_file.empty()) first_file = j["file"];
        ++ready;
      }
    }
    CHECK(beats == 11);
    CHECK(ready == 10);
    ric.o1(n).send(to_bytes(nlohmann::json{{"type", "fetch"}, {"file", first_file}}.dump()));
    ric.o1(n).send(to_bytes(nlohmann::json{{"type", "fetch"}, {"file", "pm/none"}}.dump()));
    rt.poll();
    const auto replies = ric.drain_o1(n);
    REQUIRE(replies.size() == 2);
    const auto file = nlohmann::json::parse(replies[0]);
    CHECK(file["type"] == "file");
    const auto content = file["content"].get<std::string>();
    CHECK(content.rfind("time_ms,node,cell,slice,metric,value\n", 0) == 0);
    // 3 slices x 6 DU metrics
    CHECK(std::count(content.begin(), content.end(), '\n') == 1 + 18);
    CHECK(nlohmann::json::parse(replies[1])["type"] == "file_missing");
  }
  const auto& files = rt.o1("du-1").files();
  std::uint64_t tx = 0;
  for (const auto& [name, content] : files) {
    for (const auto& line : split(content, '\n')) {
      const auto cols = split(line, ',');
      if (cols.size() == 6 && cols[4] == "tx_bytes") tx += std::stoull(cols[5]);
    }
  }
  CHECK(tx == rt.sim().ue(1).counters.served_bytes);
}

TEST_CASE("scenario validation") {
  SimConfig cfg;
  cfg.nodes = {{"du-1", {cell(1, 0, {40, 20, 0})}}};
  CHECK_THROWS_AS(RanSim{cfg}, Error);
  cfg.nodes = {{"du-1", {cell(1, 0)}}};
  cfg.ues = {constant_ue(1, 9, 0, 1.0)};
  CHECK_THROWS_AS(RanSim{cfg}, Error);
  cfg.ues = {constant_ue(1, 1, 5, 1.0)};
  CHECK_THROWS_AS(RanSim{cfg}, Error);
}
