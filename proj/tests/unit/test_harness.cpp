#include <doctest.h>

#include <random>

#include "oran/common/error.hpp"
#include "oran/harness/capture.hpp"
#include "oran/harness/runner.hpp"
#include "oran/mlops/mlops.hpp"
#include "temp_dir.hpp"

using namespace oran;
using namespace oran::harness;
using namespace oran::testing;

namespace {

const char* kMinimal = R"(name: tiny
duration_ms: 2000
nodes:
  - id: du-1
    cells:
      - {id: 1, total_prb: 50}
ues:
  - {id: 1, cell: 1, slice: 0, traffic: [{kind: constant, rate_bytes_per_ms: 5000}]}
xapps: [kpm-monitor, slicing-control]
)";

std::string scenario_error(const std::string& yaml, const std::string& catalog = "catalog") {
  try {
    parse_scenario(yaml, "s.yaml", catalog);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::scenario_invalid);
    return e.what();
  }
  FAIL("scenario was accepted");
  return {};
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

std::vector<std::string> all_scenarios() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(ORAN_SCENARIO_DIR)) {
    if (e.path().extension() == ".yaml") out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Every file below a directory, keyed by relative path.
std::map<std::string, std::string> tree(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[std::filesystem::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return out;
}

/// Lowest weighted shortfall over every split with sum <= capacity.
double brute_force_cost(const std::vector<std::uint32_t>& demand, std::uint32_t capacity,
                        const std::vector<double>& w) {
  double best = 1e300;
  std::vector<std::uint32_t> split(demand.size(), 0);
  std::function<void(std::size_t, std::uint32_t)> go = [&](std::size_t i, std::uint32_t left) {
    if (i == demand.size()) {
      double c = 0;
      for (std::size_t k = 0; k < demand.size(); ++k) c += w[k] * (demand[k] > split[k] ? demand[k] - split[k] : 0);
      best = std::min(best, c);
      return;
    }
    for (std::uint32_t x = 0; x <= left; ++x) {
      split[i] = x;
      go(i + 1, left - x);
    }
  };
  go(0, capacity);
  return best;
}

}  // namespace

TEST_CASE("scenario diagnostics name the line and field") {
  CHECK_NOTHROW(parse_scenario(kMinimal, "s.yaml"));

  auto msg = scenario_error(std::string(kMinimal) + "colour: blue\n");
  CHECK(msg.find("s.yaml:10: colour: unknown key") != std::string::npos);

  msg = scenario_error(replace(kMinimal, "duration_ms: 2000", "duration_ms: 500"));
  CHECK(msg.find("s.yaml:2: duration_ms: must exceed warmup_ms") != std::string::npos);

  msg = scenario_error(replace(kMinimal, "cell: 1, slice: 0", "cell: 4, slice: 0"));
  CHECK(msg.find("s.yaml:8: ues[0].cell: no cell 4") != std::string::npos);

  msg = scenario_error(replace(kMinimal, "slice: 0", "slice: 3"));
  CHECK(msg.find("ues[0].slice: cell 1 has no slice 3") != std::string::npos);

  msg = scenario_error(replace(kMinimal, "slicing-control]", "slicing-ctl]"));
  CHECK(msg.find("xapps[1].name: unknown xApp 'slicing-ctl'") != std::string::npos);

  msg = scenario_error(replace(kMinimal, "kind: constant", "kind: bursty"));
  CHECK(msg.find("ues[0].traffic[0].kind: unknown traffic kind 'bursty'") != std::string::npos);

  msg = scenario_error(replace(kMinimal, "duration_ms: 2000\n", ""));
  CHECK(msg.find("duration_ms: missing") != std::string::npos);

  msg = scenario_error(replace(kMinimal, "total_prb: 50", "total_prb: [50"));
  CHECK(msg.find("ScenarioInvalid: s.yaml:") == 0);
  CHECK(msg.find(": yaml: ") != std::string::npos);

  msg = scenario_error(std::string(kMinimal) +
                       "policies:\n  - at_ms: 10\n    op: create\n    policy: {policy_id: p, policy_type_id: 20008, "
                       "scope: {kind: slice, slice_id: 0}, statements: [{kind: objective, name: colour, "
                       "comparator: le, value: 1}]}\n");
  CHECK(msg.find("policies[0].policy: SchemaViolation") != std::string::npos);
}

TEST_CASE("a scenario naming an unpublished model is invalid") {
  TempDir dir("unpublished");
  const auto yaml = std::string(kMinimal) + "model_id: slicing-000000000000\n";
  const auto msg = scenario_error(yaml, dir.path.string());
  CHECK(msg.find("model_id: model slicing-000000000000 is not published") != std::string::npos);

  // trained but not validated: the directory exists without a manifest
  spit(dir.path / "m1" / "model.tbl", "model_id = m1\ncapacity = 50\nstep = 5\n0,0,0 -> 0,0,0\n");
  CHECK(scenario_error(std::string(kMinimal) + "model_id: m1\n", dir.path.string()).find("not published") !=
        std::string::npos);

  const auto no_slicing = replace(kMinimal, "xapps: [kpm-monitor, slicing-control]", "xapps: [kpm-monitor]");
  CHECK(scenario_error(no_slicing + "model_id: m1\n", dir.path.string()).find("needs slicing-control") !=
        std::string::npos);
}

TEST_CASE("bundled scenarios parse") {
  const auto paths = all_scenarios();
  CHECK(paths.size() >= 8);
  for (const auto& p : paths) {
    INFO(p);
    const auto sc = load_scenario(p);
    CHECK(sc.duration_ms > sc.sim.warmup_ms);
    CHECK(!sc.xapps.empty());
  }
}

TEST_CASE("slicing-baseline completes with a consistent report") {
  TempDir out("baseline");
  RunOptions opt;
  opt.out_dir = out.path.string();
  const auto r = run(load_scenario(scenario_path("slicing-baseline")), opt);
  CHECK(r.consistency_errors().empty());
  CHECK(r.ran.now == 10000);
  CHECK(r.ran.inserts == r.ran.inserts_accepted + r.ran.inserts_denied + r.ran.inserts_timed_out +
                             r.ran.inserts_pending);
  CHECK(r.ran.inserts > 0);
  CHECK(r.metric("subscriptions.wire_requests") == r.metric("subscriptions.distinct_keys"));
  CHECK(r.pm_files == 20);
  CHECK(r.a1_feedback == 2);
  CHECK(r.a1_errors.empty());
  CHECK(r.ran.cells.size() == 3);
  for (const auto& p : r.csv_paths) CHECK(std::filesystem::exists(out.path / p));
  const auto j = nlohmann::json::parse(slurp(out.path / "report.json"));
  CHECK(j.at("state_hash") == r.state_hash);
  CHECK(!j.contains("mode"));

  auto broken = r;
  broken.ran.inserts += 1;
  CHECK(broken.consistency_errors().size() == 1);
  broken = r;
  broken.ric_metrics["subscriptions.wire_requests"] += 1;
  CHECK(broken.consistency_errors().size() == 1);
}

TEST_CASE("same seed gives the same hash and byte-identical outputs") {
  TempDir a("det-a"), b("det-b");
  const auto sc = load_scenario(scenario_path("slicing-baseline"));
  RunOptions oa, ob;
  oa.out_dir = a.path.string();
  ob.out_dir = b.path.string();
  const auto ra = run(sc, oa);
  const auto rb = run(sc, ob);
  CHECK(ra.state_hash == rb.state_hash);
  CHECK(tree(a.path) == tree(b.path));

  RunOptions oc;
  oc.seed = 12345;
  CHECK(run(sc, oc).state_hash != ra.state_hash);
}

TEST_CASE("tcp mode reproduces the in-process run") {
  TempDir a("tcp-a"), b("tcp-b");
  const auto sc = load_scenario(scenario_path("slicing-baseline"));
  RunOptions oa, ob;
  oa.out_dir = a.path.string();
  ob.out_dir = b.path.string();
  ob.tcp = true;
  oa.capture_path = a / "capture.bin";
  ob.capture_path = b / "capture.bin";
  const auto ra = run(sc, oa);
  const auto rb = run(sc, ob);
  CHECK(ra.mode == "in-process");
  CHECK(rb.mode == "tcp");
  CHECK(ra.state_hash == rb.state_hash);
  CHECK(ra.ran == rb.ran);
  CHECK(tree(a.path) == tree(b.path));
}

TEST_CASE("capture encoding round trips and rejects truncation") {
  std::mt19937_64 rng(5);
  std::vector<CaptureRecord> recs;
  for (int i = 0; i < 200; ++i) {
    CaptureRecord r;
    r.time_ms = static_cast<TimeMs>(rng() % 100000);
    r.to_node = rng() % 2 == 0;
    r.link = static_cast<std::uint16_t>(rng() % 7);
    r.payload.resize(rng() % 40);
    for (auto& b : r.payload) b = static_cast<std::uint8_t>(rng());
    recs.push_back(r);
  }
  const auto bytes = encode_capture(recs);
  CHECK(decode_capture(bytes) == recs);
  CHECK(decode_capture(Bytes{}).empty());
  CHECK(render_capture(Bytes{}).empty());

  // cut into the second record's header and into the first one's payload
  const auto second = 15 + recs[0].payload.size();
  Bytes cut(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(second + 3));
  try {
    decode_capture(cut);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::malformed_capture);
    CHECK(std::string(e.what()).find("byte offset " + std::to_string(second)) != std::string::npos);
  }
  Bytes bad = bytes;
  bad[8] = 9;
  CHECK_THROWS_AS(decode_capture(bad), Error);
}

TEST_CASE("a run capture renders the subscription request") {
  TempDir dir("capture");
  RunOptions opt;
  opt.capture_path = dir / "run.cap";
  run(load_scenario(scenario_path("slicing-overload")), opt);
  const auto data = to_bytes(slurp(opt.capture_path));
  const auto records = decode_capture(data);
  REQUIRE(!records.empty());
  CHECK(records.front().time_ms == 0);
  CHECK(!records.front().to_node);
  for (std::size_t i = 1; i < records.size(); ++i) CHECK(records[i - 1].time_ms <= records[i].time_ms);
  const auto text = render_capture(data);
  CHECK(text.find("procedureCode: 1") != std::string::npos);
  CHECK(text.find("procedureCode: 8") != std::string::npos);
  CHECK(text.find("RICsubscriptionRequest") != std::string::npos);
  CHECK(text.find("RICindication") != std::string::npos);

  // a frame that is not E2AP
  auto junk = encode_capture({{5, false, 0, Bytes{0xff, 0x00}}});
  CHECK_THROWS_AS(render_capture(junk), Error);
}

TEST_CASE("oracle cost in the report matches an independent search") {
  const auto sc = load_scenario(scenario_path("slicing-overload"));
  const auto weights = priority_weights(sc.sim.objectives, 3);
  double oracle = 0;
  std::map<std::vector<std::uint32_t>, double> memo;
  RunOptions opt;
  opt.observer = [&](const sim::RanSim& s) {
    if (s.now() <= s.config().warmup_ms) return;
    std::vector<std::uint32_t> req;
    for (const auto& sl : s.cells()[0].slices) req.push_back(sl.last_requested);
    auto it = memo.find(req);
    if (it == memo.end()) it = memo.emplace(req, brute_force_cost(req, 50, weights)).first;
    oracle += it->second;
  };
  const auto r = run(sc, opt);
  REQUIRE(r.ran.cells.size() == 1);
  CHECK(r.ran.cells[0].oracle_cost_sum == doctest::Approx(oracle));
  CHECK(r.ran.cells[0].scored_ticks == 5000);
  CHECK(r.ran.cells[0].cost_sum <= 1.05 * r.ran.cells[0].oracle_cost_sum);
}

TEST_CASE("a published model named by the scenario drives slicing-control") {
  TempDir dir("published");
  mlops::Catalog cat(dir.path.string());
  xapps::PolicyModel m;
  m.dataset_hash = "00";
  m.table = {{{20, 30, 10}, {20, 30, 0}}, {{0, 0, 0}, {0, 0, 0}}};
  const auto id = cat.add_trained(m, 0).model.model_id;
  mlops::ValidationReport rep;
  rep.pass_rate = 1.0;
  rep.scenarios = {{"synthetic", 100, 0, true}};
  cat.record_validation(id, rep);
  cat.publish(id);

  auto yaml = slurp(scenario_path("slicing-overload")) + "model_id: " + id + "\n";
  const auto sc = parse_scenario(yaml, "overload-with-model.yaml", dir.path.string());
  RunOptions opt;
  opt.catalog_dir = dir.path.string();
  const auto r = run(sc, opt);
  CHECK(r.model_id == id);
  CHECK(r.consistency_errors().empty());
}
