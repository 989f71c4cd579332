#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "oran/a1/a1.hpp"
#include "oran/common/error.hpp"
#include "oran/harness/capture.hpp"
#include "oran/harness/runner.hpp"
#include "oran/mlops/mlops.hpp"
#include "oran/nonrt/nonrt.hpp"
#include "oran/ric/ric.hpp"
#include "oran/xapps/apps.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kScenarioError = 2;
constexpr int kValidationFailure = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) oran::fail(oran::Errc::missing_file, path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, const std::string& capture, bool tcp,
            const std::string& out, const std::string& catalog) {
  const auto sc = oran::harness::load_scenario(path, catalog);
  oran::harness::RunOptions opt;
  opt.seed = seed;
  opt.capture_path = capture;
  opt.tcp = tcp;
  opt.catalog_dir = catalog;
  opt.out_dir = out.empty() ? (std::filesystem::path("runs") / sc.name).string() : out;
  const auto r = oran::harness::run(sc, opt);
  std::cout << "scenario " << r.scenario << "  seed " << r.seed << "  mode " << r.mode << "\n";
  std::cout << "state hash " << r.state_hash << "\n";
  for (const auto& [slice, v] : r.ran.satisfaction) std::cout << "slice " << slice << " satisfaction " << v << "\n";
  for (const auto& c : r.ran.cells) {
    std::cout << "cell " << c.cell_id << " violation ticks " << c.violation_ticks << "/" << c.scored_ticks << "  cost "
              << c.cost_sum << "  oracle " << c.oracle_cost_sum << "\n";
  }
  std::cout << "inserts " << r.ran.inserts << " (accepted " << r.ran.inserts_accepted << ", denied "
            << r.ran.inserts_denied << ", timed out " << r.ran.inserts_timed_out << ")\n";
  std::cout << "conflicts rejected " << r.metric("controls.conflict_rejected") << "\n";
  if (!r.model_id.empty()) std::cout << "model " << r.model_id << "\n";
  for (const auto& e : r.a1_errors) std::cout << "a1 error: " << e << "\n";
  std::cout << "outputs in " << opt.out_dir << "\n";
  const auto broken = r.consistency_errors();
  for (const auto& b : broken) std::cerr << "inconsistent report: " << b << "\n";
  return broken.empty() ? kOk : kFailure;
}

int cmd_train(const std::string& glob, const std::string& holdout, const std::string& catalog, const std::string& work) {
  oran::mlops::TrainRequest req;
  req.train_glob = glob;
  req.holdout_glob = holdout;
  req.catalog_dir = catalog;
  req.work_dir = work;
  const auto res = oran::mlops::train_pipeline(req);
  std::cout << "dataset " << res.dataset_hash << "  rows " << res.rows << "\n";
  std::cout << "model " << res.model_id << "  entries " << res.entries << "\n";
  for (const auto& s : res.validation.scenarios) {
    std::cout << "validation " << s.scenario << ": " << s.violation_ticks << "/" << s.scored_ticks << " violation ticks  "
              << (s.passed ? "pass" : "fail") << "\n";
  }
  std::cout << "pass rate " << res.validation.pass_rate << "\n";
  if (!res.published) {
    std::cerr << "validation failed, model " << res.model_id << " stays trained\n";
    return kValidationFailure;
  }
  std::cout << "published " << res.model_id << "\n";
  return kOk;
}

int cmd_inspect(const std::string& path) {
  const auto data = read_file(path);
  std::cout << oran::harness::render_capture(oran::to_bytes(data));
  return kOk;
}

/// Applies A1 operations to a scratch near-RT RIC running slicing-control
/// and prints the policy store and feedback.
int cmd_policies(const std::string& arg) {
  const auto text = std::filesystem::exists(arg) ? read_file(arg) : arg;
  nlohmann::json ops;
  try {
    ops = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    oran::fail(oran::Errc::schema_violation, std::string("not JSON: ") + e.what());
  }
  if (!ops.is_array()) ops = nlohmann::json::array({ops});

  oran::transport::LoopbackHub hub;
  auto listener = hub.listen("ric:a1");
  oran::nonrt::A1Client client(hub.connect({"ric:a1", oran::transport::Role::ric}));
  oran::nonrt::PolicyService service(&client);
  oran::ric::NearRtRic ric;
  ric.attach_a1(listener->try_accept());
  oran::xapps::register_reference_xapps(ric);
  ric.onboard(oran::xapps::slicing_control_descriptor());
  ric.deploy("slicing-control");
  auto settle = [&] {
    for (int i = 0; i < 16; ++i) {
      ric.poll();
      for (const auto& m : client.drain()) service.handle(m);
    }
  };
  settle();

  int rc = kOk;
  for (const auto& j : ops) {
    try {
      const auto op = j.value("op", std::string());
      if (op == "create" || op == "update") {
        const auto p = oran::a1::policy_from_json(j.at("policy"));
        op == "create" ? service.create(p) : service.update(p);
      } else if (op == "delete") {
        service.remove(j.at("policy_id").get<std::string>());
      } else if (op == "query") {
        service.query_remote(j.value("policy_id", std::string()));
      } else {
        oran::fail(oran::Errc::schema_violation, "unknown op '" + op + "'");
      }
    } catch (const oran::Error& e) {
      std::cout << "error: " << e.what() << "\n";
      rc = kFailure;
    } catch (const nlohmann::json::exception& e) {
      std::cout << "error: SchemaViolation: " << e.what() << "\n";
      rc = kFailure;
    }
    settle();
  }
  auto store = nlohmann::json::array();
  for (const auto& p : service.query()) store.push_back(oran::a1::to_json(p));
  std::cout << "policies " << store.dump() << "\n";
  for (const auto& f : service.feedback()) {
    std::cout << "feedback " << f.policy_id << " enforced=" << (f.enforced ? "true" : "false") << "\n";
  }
  for (const auto& m : service.remote_errors()) std::cout << "ric error: " << m.error << ": " << m.detail << "\n";
  if (const auto& v = service.remote_view()) {
    std::cout << "ric holds " << v->size() << " polic" << (v->size() == 1 ? "y" : "ies") << "\n";
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"O-RAN closed-loop testbed"};
  app.require_subcommand(1);

  std::string scenario, capture, out, catalog = "catalog";
  std::optional<std::uint64_t> seed;
  bool tcp = false;
  auto* run = app.add_subcommand("run", "Run a scenario");
  run->add_option("scenario", scenario, "Scenario YAML")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--capture", capture, "Write the E2 wire capture here");
  run->add_flag("--tcp", tcp, "Run the RAN in a separate process over TCP");
  run->add_option("--out", out, "Output directory (default runs/<scenario>)");
  run->add_option("--catalog", catalog, "Model catalog directory");

  std::string glob, holdout = "scenarios/holdout-*.yaml", work = "runs/train";
  auto* train = app.add_subcommand("train", "Collect, train, validate and publish a slicing model");
  train->add_option("glob", glob, "Training scenarios")->required();
  train->add_option("--holdout", holdout, "Validation scenarios");
  train->add_option("--catalog", catalog, "Model catalog directory");
  train->add_option("--work", work, "Directory for training runs");

  std::string capture_in;
  auto* inspect = app.add_subcommand("inspect", "Render a wire capture");
  inspect->add_option("capture", capture_in, "Capture file")->required();

  std::string ops;
  auto* policies = app.add_subcommand("policies", "Apply A1 operations to a scratch RIC");
  policies->add_option("ops", ops, "A1 operation JSON, inline or a file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(scenario, seed, capture, tcp, out, catalog);
    if (*train) return cmd_train(glob, holdout, catalog, work);
    if (*inspect) return cmd_inspect(capture_in);
    if (*policies) return cmd_policies(ops);
  } catch (const oran::Error& e) {
    std::cerr << e.what() << "\n";
    return e.code() == oran::Errc::scenario_invalid ? kScenarioError : kFailure;
  }
  return kOk;
}
