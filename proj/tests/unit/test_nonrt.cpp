#include <doctest.h>

#include <random>

#include "oran/common/error.hpp"
#include "oran/nonrt/nonrt.hpp"
#include "oran/xapps/apps.hpp"
#include "loop_fixtures.hpp"

using namespace oran;
using namespace oran::nonrt;
using namespace oran::testing;

namespace {

a1::Policy slice_policy(const std::string& id, std::uint32_t slice = 0, double bound = 5.0) {
  a1::Policy p;
  p.policy_id = id;
  p.scope.kind = a1::PolicyScope::Kind::slice;
  p.scope.slice_id = slice;
  p.statements = {{a1::PolicyStatement::Kind::objective, "latency_proxy_ms", e2sm::Comparator::le, bound}};
  return p;
}

template <typename F>
std::optional<Errc> maybe_errc(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

std::vector<std::string> ids(const std::vector<a1::Policy>& ps) {
  std::vector<std::string> out;
  for (const auto& p : ps) out.push_back(p.policy_id);
  return out;
}

}  // namespace

TEST_CASE("policy store operations and errors") {
  PolicyService ps;
  ps.create(slice_policy("a"));
  ps.create(slice_policy("b", 1));
  CHECK(ps.query().size() == 2);
  CHECK(ps.query("b").front().scope.slice_id == 1);
  CHECK(errc_of([&] { ps.create(slice_policy("a")); }) == Errc::duplicate_id);
  CHECK(errc_of([&] { ps.update(slice_policy("zz")); }) == Errc::unknown_id);
  CHECK(errc_of([&] { ps.remove("zz"); }) == Errc::unknown_id);
  CHECK(errc_of([&] { ps.query("zz"); }) == Errc::unknown_id);

  auto bad = slice_policy("c");
  bad.statements.clear();
  CHECK(errc_of([&] { ps.create(bad); }) == Errc::schema_violation);
  bad = slice_policy("c");
  bad.statements[0].name = "happiness";
  CHECK(errc_of([&] { ps.create(bad); }) == Errc::schema_violation);
  bad = slice_policy("c");
  bad.policy_type_id = 1;
  CHECK(errc_of([&] { ps.create(bad); }) == Errc::schema_violation);
  CHECK(errc_of([&] { ps.create(slice_policy("")); }) == Errc::schema_violation);
  CHECK(ids(ps.query()) == std::vector<std::string>{"a", "b"});

  auto upd = slice_policy("a", 0, 3.0);
  ps.update(upd);
  CHECK(ps.query("a").front() == upd);
  ps.remove("a");
  CHECK(ids(ps.query()) == std::vector<std::string>{"b"});
}

TEST_CASE("query reflects created minus deleted ids under random operations") {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    std::mt19937 rng(seed);
    PolicyService ps;
    std::set<std::string> model;
    for (int i = 0; i < 400; ++i) {
      const auto id = "p" + std::to_string(rng() % 12);
      const auto op = rng() % 3;
      const bool exists = model.contains(id);
      if (op == 0) {
        CHECK(maybe_errc([&] { ps.create(slice_policy(id)); }) ==
              (exists ? std::optional(Errc::duplicate_id) : std::nullopt));
        model.insert(id);
      } else if (op == 1) {
        CHECK(maybe_errc([&] { ps.remove(id); }) == (exists ? std::nullopt : std::optional(Errc::unknown_id)));
        model.erase(id);
      } else {
        CHECK(maybe_errc([&] { ps.update(slice_policy(id, 2)); }) ==
              (exists ? std::nullopt : std::optional(Errc::unknown_id)));
      }
      CHECK(ids(ps.query()) == std::vector<std::string>(model.begin(), model.end()));
    }
  }
}

TEST_CASE("enrichment epochs must rise per topic and producer") {
  EiService ei;
  ei.register_topic("A");
  a1::EiMessage m{"A", "rapp", 5, {}};
  ei.publish(m);
  m.epoch = 4;
  CHECK(errc_of([&] { ei.publish(m); }) == Errc::stale_epoch);
  m.epoch = 5;
  CHECK(errc_of([&] { ei.publish(m); }) == Errc::stale_epoch);
  m.producer = "other";
  ei.publish(m);  // epochs are per producer
  m.topic = "nope";
  CHECK(errc_of([&] { ei.publish(m); }) == Errc::unknown_topic);
  CHECK(ei.last_epoch("A", "rapp") == 5u);
  CHECK(ei.published() == 2);
}

TEST_CASE("forecast is the mean of the last W samples") {
  auto samples = [](std::vector<double> xs) {
    std::vector<DemandSample> out;
    TimeMs t = 0;
    for (auto x : xs) out.push_back({t += 1000, {x}});
    return out;
  };
  CHECK(mean_forecast(samples({7, 7, 7, 7}), 3).demand_prb == std::vector<double>{7});
  CHECK(mean_forecast(samples({10, 20, 30}), 3).demand_prb == std::vector<double>{20});
  CHECK(mean_forecast(samples({10, 20, 30}), 2).demand_prb == std::vector<double>{25});
  CHECK(mean_forecast(samples({10, 20, 30}), 10).demand_prb == std::vector<double>{20});
  const auto empty = mean_forecast({}, 3);
  CHECK(empty.low_confidence);
  CHECK(empty.demand_prb.empty());
  CHECK_FALSE(mean_forecast(samples({1}), 3).low_confidence);

  // samples average prb_requested over cells, per interval end
  std::vector<MeasurementRow> rows = {
      {1000, "du-1", 1, 0, "prb_requested", 10}, {1000, "du-2", 2, 0, "prb_requested", 20},
      {1000, "du-1", 1, 1, "prb_requested", 4},  {1000, "du-1", 1, 1, "tx_bytes", 999},
      {2000, "du-1", 1, 0, "prb_requested", 30},
  };
  const auto s = demand_samples(rows);
  REQUIRE(s.size() == 2);
  CHECK(s[0].demand_prb == std::vector<double>{15, 4});
  CHECK(s[1].demand_prb == std::vector<double>{30});
  CHECK(mean_forecast(s, 2).demand_prb == std::vector<double>{22.5, 2});
}

TEST_CASE("heartbeat boundary is exact") {
  HeartbeatMonitor hb;
  hb.register_node("du-1", 100, 0);
  for (TimeMs t = 1; t <= 1000; ++t) {
    if (t % 100 == 0) hb.beat("du-1", 100, t);
    hb.advance_to(t);
    REQUIRE(hb.available("du-1"));
  }
  // last beat at 1000: still available at 1300, gone at 1301
  for (TimeMs t = 1001; t <= 1300; ++t) hb.advance_to(t);
  CHECK(hb.available("du-1"));
  hb.advance_to(1301);
  CHECK_FALSE(hb.available("du-1"));
  hb.beat("du-1", 100, 1450);
  CHECK(hb.available("du-1"));
  CHECK(hb.transitions() == std::vector<HeartbeatTransition>{{1301, "du-1", HeartbeatRecord::State::unavailable},
                                                              {1450, "du-1", HeartbeatRecord::State::available}});

  // coarse advancement reports the same boundary instant
  HeartbeatMonitor coarse;
  coarse.register_node("du-1", 100, 1000);
  coarse.advance_to(5000);
  REQUIRE(coarse.transitions().size() == 1);
  CHECK(coarse.transitions()[0].at_ms == 1301);
}

TEST_CASE("pm collector deduplicates and reports missing files") {
  PmCollector pm;
  CHECK(pm.on_file_ready("du-1", "f1", 0));
  CHECK_FALSE(pm.on_file_ready("du-1", "f1", 0));  // fetch already pending
  pm.on_file("du-1", "f1", std::string(kMeasurementCsvHeader) + "\n1000,du-1,1,0,prb_requested,3\n");
  CHECK_FALSE(pm.on_file_ready("du-1", "f1", 0));
  CHECK(pm.files().size() == 1);
  CHECK(pm.rows().size() == 1);
  CHECK(pm.on_file_ready("du-1", "f2", 1000));
  CHECK(errc_of([&] { pm.on_file_missing("du-1", "f2"); }) == Errc::missing_file);
  CHECK(pm.files().size() == 1);
}

TEST_CASE("O1 over the loop: 2 nodes for 10 s give 20 PM files") {
  SmoConfig sc;
  sc.forecast_enabled = false;
  LoopBed bed(two_nodes(), sc);
  bed.run_until(10000);
  CHECK(bed.smo.pm().files().size() == 20);
  CHECK(bed.smo.errors().empty());
  const auto rows = bed.smo.pm().rows();
  CHECK(rows.size() == 20 * 3 * e2sm::metric_catalog(e2sm::NodeKind::du).size());
  for (const auto& [key, f] : bed.smo.pm().files()) CHECK(f.content == bed.ran->o1(key.first).files().at(f.name));

  // replayed notifications do not add files
  auto replay = bed.hub.connect({"smo:o1", transport::Role::e2_node});
  for (const auto& [key, f] : bed.smo.pm().files()) {
    replay->send(to_bytes(nlohmann::json{{"type", "file_ready"},
                                         {"node", key.first},
                                         {"file", f.name},
                                         {"interval_start_ms", key.second},
                                         {"at_ms", 10000}}
                              .dump()));
  }
  bed.settle();
  CHECK(bed.smo.pm().files().size() == 20);
  CHECK(replay->try_recv().state == transport::Poll::State::pending);  // no fetches

  // a notification whose blob is gone surfaces MissingFile
  replay->send(to_bytes(nlohmann::json{{"type", "file_ready"},
                                       {"node", "du-1"},
                                       {"file", "pm/du-1/77.csv"},
                                       {"interval_start_ms", 77},
                                       {"at_ms", 10000}}
                            .dump()));
  bed.settle();
  auto fetch = replay->try_recv();
  REQUIRE(fetch.state == transport::Poll::State::message);
  replay->send(to_bytes(R"({"type":"file_missing","node":"du-1","file":"pm/du-1/77.csv"})"));
  bed.settle();
  REQUIRE(bed.smo.errors().size() == 1);
  CHECK(bed.smo.errors()[0].starts_with("MissingFile:"));
}

TEST_CASE("silent node turns unavailable at last beat + 3 periods + 1") {
  SmoConfig sc;
  sc.forecast_enabled = false;
  LoopBed bed(two_nodes(), sc);
  bed.run_until(2500);
  bed.ran->o1("du-2").set_heartbeat_enabled(false);  // last beat was at 2000
  bed.run_until(5000);
  CHECK(bed.smo.heartbeats().available("du-2"));
  bed.step();
  CHECK_FALSE(bed.smo.heartbeats().available("du-2"));
  CHECK(bed.smo.heartbeats().available("du-1"));
  bed.ran->o1("du-2").set_heartbeat_enabled(true);
  bed.run_until(6000);
  CHECK(bed.smo.heartbeats().available("du-2"));
  CHECK(bed.smo.heartbeats().transitions() ==
        std::vector<HeartbeatTransition>{{5001, "du-2", HeartbeatRecord::State::unavailable},
                                         {6000, "du-2", HeartbeatRecord::State::available}});
}

TEST_CASE("A1 policy reaches the slicing xApp and feedback returns") {
  SmoConfig sc;
  sc.forecast_enabled = false;
  LoopBed bed(two_nodes(), sc);
  xapps::register_reference_xapps(bed.ric);
  bed.ric.onboard(xapps::slicing_control_descriptor());
  bed.ric.deploy("slicing-control");
  auto& sc_app = dynamic_cast<xapps::SlicingControl&>(*bed.ric.xapp("slicing-control"));
  bed.run_until(500);

  bed.smo.policies().create(slice_policy("urllc-latency", 0, 5.0));
  bed.settle();
  CHECK(bed.smo.policies().enforced("urllc-latency") == true);
  CHECK(sc_app.status().objectives.urllc_max_latency_ms == 5.0);
  // enforced feedback is backed by an xApp acknowledgement in the log
  CHECK(std::any_of(bed.ric.log().begin(), bed.ric.log().end(), [](const std::string& l) {
    return l.find("slicing-control reports policy urllc-latency enforced") != std::string::npos;
  }));

  bed.smo.policies().create(slice_policy("second", 1, 10.0));
  bed.smo.policies().query_remote();
  bed.settle();
  REQUIRE(bed.smo.policies().remote_view());
  CHECK(ids(*bed.smo.policies().remote_view()) == ids(bed.smo.policies().query()));

  bed.smo.policies().remove("urllc-latency");
  bed.settle();
  CHECK(bed.smo.policies().enforced("urllc-latency") == false);
  CHECK(sc_app.status().objectives.urllc_max_latency_ms == SlicingObjectives{}.urllc_max_latency_ms);
}

TEST_CASE("forecast reaches the near-RT topic within one loop tick") {
  SmoConfig sc;
  sc.forecast_window = 3;
  sc.forecast_horizon_ms = 1000;
  LoopBed bed(two_nodes(), sc);
  std::vector<std::pair<TimeMs, std::string>> seen;
  auto d = probe_descriptor("watcher");
  d.consumed_data = {xapps::topic::forecast};
  deploy_probe(bed.ric, d, [&](Probe& p) {
    p.data_hook = [&](ric::XappContext& ctx, const ric::SdlChange& c) {
      if (c.value) seen.emplace_back(ctx.now(), *c.value);
    };
  });
  bed.run_until(3000);
  REQUIRE(seen.size() == 3);
  const auto j = nlohmann::json::parse(seen.back().second);
  CHECK(j["epoch"] == 3);
  CHECK(j["producer"] == "rapp-forecast");
  CHECK(seen.back().first == 3000);  // same instant as the emission
  const auto f = a1::forecast_from_json(j["payload"]);
  CHECK(f == *bed.smo.rapp().last());
  CHECK(f.demand_prb.size() == 3);
}
