#include "oran/a1/a1.hpp"

#include <algorithm>

#include "oran/common/error.hpp"
#include "oran/e2sm/kpm.hpp"

namespace oran::a1 {

using nlohmann::json;

namespace {

constexpr std::pair<PolicyScope::Kind, std::string_view> kScopeNames[] = {
    {PolicyScope::Kind::ue, "ue"},
    {PolicyScope::Kind::ue_group, "ue_group"},
    {PolicyScope::Kind::slice, "slice"},
    {PolicyScope::Kind::cell, "cell"},
    {PolicyScope::Kind::qos_class, "qos_class"},
};

constexpr std::string_view kOps[] = {"create", "update", "delete", "query", "query_result", "feedback", "ei", "error"};

[[noreturn]] void schema(const std::string& what) { fail(Errc::schema_violation, what); }

template <class T>
T field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) schema(std::string("missing field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    schema(std::string("field '") + name + "' has the wrong type");
  }
}

json scope_to_json(const PolicyScope& s) {
  json j;
  for (const auto& [k, name] : kScopeNames) {
    if (k == s.kind) j["kind"] = name;
  }
  switch (s.kind) {
    case PolicyScope::Kind::ue: j["ue_id"] = s.ue_id; break;
    case PolicyScope::Kind::ue_group: j["ue_ids"] = s.ue_ids; break;
    case PolicyScope::Kind::slice: j["slice_id"] = s.slice_id; break;
    case PolicyScope::Kind::cell: j["cell_id"] = s.cell_id; break;
    case PolicyScope::Kind::qos_class: j["qos_class"] = s.qos_class; break;
  }
  return j;
}

PolicyScope scope_from_json(const json& j) {
  const auto kind = field<std::string>(j, "kind");
  PolicyScope s;
  auto it = std::find_if(std::begin(kScopeNames), std::end(kScopeNames), [&](const auto& p) { return p.second == kind; });
  if (it == std::end(kScopeNames)) schema("unknown scope kind '" + kind + "'");
  s.kind = it->first;
  switch (s.kind) {
    case PolicyScope::Kind::ue: s.ue_id = field<std::uint64_t>(j, "ue_id"); break;
    case PolicyScope::Kind::ue_group: s.ue_ids = field<std::vector<std::uint64_t>>(j, "ue_ids"); break;
    case PolicyScope::Kind::slice: s.slice_id = field<std::uint32_t>(j, "slice_id"); break;
    case PolicyScope::Kind::cell: s.cell_id = field<std::uint32_t>(j, "cell_id"); break;
    case PolicyScope::Kind::qos_class: s.qos_class = field<std::uint32_t>(j, "qos_class"); break;
  }
  return s;
}

}  // namespace

bool is_known_statement(PolicyStatement::Kind kind, std::string_view name) {
  if (kind == PolicyStatement::Kind::resource) {
    return name == "dedicated_prb" || name == "min_prb_ratio" || name == "max_prb_ratio" || name == e2sm::kA3OffsetDb;
  }
  if (name == "throughput_bytes_per_s") return true;
  for (auto k : {e2sm::NodeKind::du, e2sm::NodeKind::cu_up, e2sm::NodeKind::cu_cp}) {
    if (e2sm::in_catalog(k, name)) return true;
  }
  return false;
}

void validate(const Policy& p) {
  if (p.policy_type_id != kSlicingPolicyType) {
    fail(Errc::unknown_policy_type, "policy type " + std::to_string(p.policy_type_id) + " is not registered");
  }
  if (p.policy_id.empty()) schema("empty policy_id");
  if (p.statements.empty()) schema("policy " + p.policy_id + " has no statements");
  for (const auto& st : p.statements) {
    if (!is_known_statement(st.kind, st.name)) schema("unknown statement name '" + st.name + "'");
  }
}

json to_json(const Policy& p) {
  json statements = json::array();
  for (const auto& st : p.statements) {
    statements.push_back({{"kind", st.kind == PolicyStatement::Kind::resource ? "resource" : "objective"},
                          {"name", st.name},
                          {"comparator", std::string(e2sm::to_string(st.comparator))},
                          {"value", st.value}});
  }
  return {{"policy_id", p.policy_id},
          {"policy_type_id", p.policy_type_id},
          {"scope", scope_to_json(p.scope)},
          {"statements", statements}};
}

Policy policy_from_json(const json& j) {
  Policy p;
  p.policy_id = field<std::string>(j, "policy_id");
  p.policy_type_id = field<std::uint32_t>(j, "policy_type_id");
  p.scope = scope_from_json(field<json>(j, "scope"));
  const auto statements = field<json>(j, "statements");
  if (!statements.is_array()) schema("statements must be a list");
  for (const auto& sj : statements) {
    PolicyStatement st;
    const auto kind = field<std::string>(sj, "kind");
    if (kind == "resource") {
      st.kind = PolicyStatement::Kind::resource;
    } else if (kind != "objective") {
      schema("unknown statement kind '" + kind + "'");
    }
    st.name = field<std::string>(sj, "name");
    if (!e2sm::parse_comparator(field<std::string>(sj, "comparator"), st.comparator)) schema("unknown comparator");
    st.value = field<double>(sj, "value");
    p.statements.push_back(std::move(st));
  }
  return p;
}

Bytes encode(const Message& m) {
  json j{{"op", m.op}};
  if (m.policy) {
    auto pj = to_json(*m.policy);
    for (auto& [k, v] : pj.items()) j[k] = v;
  }
  if (!m.policy_id.empty()) j["policy_id"] = m.policy_id;
  if (m.op == "query_result") {
    j["policies"] = json::array();
    for (const auto& p : m.policies) j["policies"].push_back(to_json(p));
  }
  if (m.feedback) {
    j["policy_id"] = m.feedback->policy_id;
    j["enforced"] = m.feedback->enforced;
    j["at_ms"] = m.feedback->at_ms;
  }
  if (m.ei) {
    j["topic"] = m.ei->topic;
    j["producer"] = m.ei->producer;
    j["epoch"] = m.ei->epoch;
    j["payload"] = m.ei->payload;
  }
  if (!m.error.empty()) j["error"] = m.error;
  if (!m.detail.empty()) j["detail"] = m.detail;
  return to_bytes(j.dump());
}

Message decode(ByteView frame) {
  const auto j = json::parse(to_string(frame), nullptr, false);
  if (j.is_discarded() || !j.is_object()) schema("A1 frame is not a JSON object");
  Message m;
  m.op = field<std::string>(j, "op");
  if (std::find(std::begin(kOps), std::end(kOps), m.op) == std::end(kOps)) schema("unknown A1 op '" + m.op + "'");
  if (m.op == "create" || m.op == "update") {
    m.policy = policy_from_json(j);
    m.policy_id = m.policy->policy_id;
  } else if (m.op == "delete") {
    m.policy_id = field<std::string>(j, "policy_id");
  } else if (m.op == "query" || m.op == "error") {
    m.policy_id = j.value("policy_id", "");
  } else if (m.op == "query_result") {
    for (const auto& pj : field<json>(j, "policies")) m.policies.push_back(policy_from_json(pj));
  } else if (m.op == "feedback") {
    m.feedback = Feedback{field<std::string>(j, "policy_id"), field<bool>(j, "enforced"), field<TimeMs>(j, "at_ms")};
    m.policy_id = m.feedback->policy_id;
  } else if (m.op == "ei") {
    m.ei = EiMessage{field<std::string>(j, "topic"), field<std::string>(j, "producer"),
                     field<std::uint64_t>(j, "epoch"), field<json>(j, "payload")};
  }
  m.error = j.value("error", "");
  m.detail = j.value("detail", "");
  return m;
}

json to_json(const Forecast& f) { return {{"demand_prb", f.demand_prb}, {"low_confidence", f.low_confidence}}; }

Forecast forecast_from_json(const json& j) {
  return {field<std::vector<double>>(j, "demand_prb"), field<bool>(j, "low_confidence")};
}

}  // namespace oran::a1
