#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oran/common/bytes.hpp"
#include "oran/e2sm/rc.hpp"

namespace oran::a1 {

/// The one registered policy type: per-slice objectives and resource hints.
inline constexpr std::uint32_t kSlicingPolicyType = 20008;

struct PolicyScope {
  enum class Kind { ue, ue_group, slice, cell, qos_class };
  Kind kind = Kind::slice;
  std::uint64_t ue_id = 0;
  std::vector<std::uint64_t> ue_ids;
  std::uint32_t slice_id = 0;
  std::uint32_t cell_id = 0;
  std::uint32_t qos_class = 0;
  bool operator==(const PolicyScope&) const = default;
};

struct PolicyStatement {
  enum class Kind { resource, objective };
  Kind kind = Kind::objective;
  std::string name;
  e2sm::Comparator comparator = e2sm::Comparator::le;
  double value = 0.0;
  bool operator==(const PolicyStatement&) const = default;
};

struct Policy {
  std::string policy_id;
  std::uint32_t policy_type_id = kSlicingPolicyType;
  PolicyScope scope;
  std::vector<PolicyStatement> statements;
  bool operator==(const Policy&) const = default;
};

/// Statement names the slicing policy type accepts.
bool is_known_statement(PolicyStatement::Kind kind, std::string_view name);

/// Throws unknown_policy_type for a foreign type id and schema_violation
/// for an empty statement list or an unknown statement name.
void validate(const Policy& policy);

nlohmann::json to_json(const Policy& policy);
/// Throws schema_violation when fields are missing or have the wrong type.
Policy policy_from_json(const nlohmann::json& j);

struct Feedback {
  std::string policy_id;
  bool enforced = false;
  TimeMs at_ms = 0;
  bool operator==(const Feedback&) const = default;
};

/// Enrichment information item; the payload is topic specific JSON.
struct EiMessage {
  std::string topic;
  std::string producer;
  std::uint64_t epoch = 0;
  nlohmann::json payload;
};

/// One A1 frame. `op` is create, update, delete, query, query_result,
/// feedback, ei or error.
struct Message {
  std::string op;
  std::optional<Policy> policy;        // create, update
  std::string policy_id;               // delete, query (empty = all), error
  std::vector<Policy> policies;        // query_result
  std::optional<Feedback> feedback;    // feedback
  std::optional<EiMessage> ei;         // ei
  std::string error;                   // error: Errc name
  std::string detail;
};

Bytes encode(const Message& m);
/// Throws schema_violation on invalid JSON or an unknown op.
Message decode(ByteView frame);

/// Forecast payload: per-slice demand in PRBs plus a confidence flag.
struct Forecast {
  std::vector<double> demand_prb;  // indexed by slice id
  bool low_confidence = false;
  bool operator==(const Forecast&) const = default;
};
nlohmann::json to_json(const Forecast& f);
Forecast forecast_from_json(const nlohmann::json& j);

}  // namespace oran::a1
