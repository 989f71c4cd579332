#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oran/a1/a1.hpp"
#include "oran/sim/config.hpp"

namespace oran::harness {

struct XappSpec {
  std::string name;
  std::map<std::string, std::string> overrides;  // descriptor fields or params
};

/// One A1 operation issued by the SMO at `at_ms`.
struct PolicyInjection {
  TimeMs at_ms = 0;
  std::string op;  // create, update, delete
  std::optional<a1::Policy> policy;
  std::string policy_id;
};

struct ForecastSpec {
  bool enabled = false;
  std::size_t window = 5;
  TimeMs horizon_ms = 1000;
};

struct Scenario {
  std::string name;
  std::string source;  // file the scenario came from, for diagnostics
  TimeMs duration_ms = 10000;
  sim::SimConfig sim;  // seed, warmup, objectives, topology and traffic
  std::vector<XappSpec> xapps;
  std::vector<PolicyInjection> policies;
  ForecastSpec forecast;
  std::optional<std::string> model_id;
};

/// Parses a YAML scenario. Every problem throws scenario_invalid as
/// "<source>:<line>: <field>: <reason>". A named model must be published in
/// `catalog_dir`.
///
///   name: slicing-overload
///   seed: 1
///   duration_ms: 20000
///   warmup_ms: 1000
///   objectives: {urllc_max_latency_ms: 10, priority: [0, 1, 2]}
///   nodes:
///     - id: du-1
///       cells:
///         - {id: 1, total_prb: 50, position: [0, 0],
///            slices: [{id: 0, kind: urllc, dedicated_prb: 20}, ...]}
///   ues:
///     - {id: 1, cell: 1, slice: 0, position: [0, 0],
///        traffic: [{kind: constant, rate_bytes_per_ms: 20000}]}
///   xapps:
///     - {name: slicing-control, overrides: {capacity: 50}}
///   policies:
///     - {at_ms: 2000, op: create, policy: {policy_id: p1, ...}}
///   forecast: {enabled: true, window: 5, horizon_ms: 1000}
///   model_id: m-0123
Scenario parse_scenario(const std::string& yaml, const std::string& source, const std::string& catalog_dir = "catalog");
Scenario load_scenario(const std::string& path, const std::string& catalog_dir = "catalog");

/// Names the harness can deploy.
const std::vector<std::string>& known_xapps();

}  // namespace oran::harness
