#include "oran/common/error.hpp"

namespace oran {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::malformed_frame: return "MalformedFrame";
    case Errc::unknown_procedure_code: return "UnknownProcedureCode";
    case Errc::invariant_violation: return "InvariantViolation";
    case Errc::unknown_service_model: return "UnknownServiceModel";
    case Errc::malformed_payload: return "MalformedPayload";
    case Errc::unsupported_domain: return "UnsupportedDomain";
    case Errc::unreachable: return "Unreachable";
    case Errc::refused: return "Refused";
    case Errc::closed: return "Closed";
    case Errc::oversize: return "Oversize";
    case Errc::unknown_node: return "UnknownNode";
    case Errc::unknown_function: return "UnknownFunction";
    case Errc::wire_rejected: return "WireRejected";
    case Errc::conflict_rejected: return "ConflictRejected";
    case Errc::insufficient_data: return "InsufficientData";
    case Errc::forbidden: return "Forbidden";
    case Errc::not_found: return "NotFound";
    case Errc::undeclared_topic: return "UndeclaredTopic";
    case Errc::duplicate_name: return "DuplicateName";
    case Errc::not_onboarded: return "NotOnboarded";
    case Errc::unknown_policy_type: return "UnknownPolicyType";
    case Errc::malformed_policy: return "MalformedPolicy";
    case Errc::infeasible_quota: return "InfeasibleQuota";
    case Errc::unknown_target: return "UnknownTarget";
    case Errc::duplicate_id: return "DuplicateId";
    case Errc::unknown_id: return "UnknownId";
    case Errc::schema_violation: return "SchemaViolation";
    case Errc::unknown_topic: return "UnknownTopic";
    case Errc::stale_epoch: return "StaleEpoch";
    case Errc::missing_file: return "MissingFile";
    case Errc::empty_input: return "EmptyInput";
    case Errc::grid_too_large: return "GridTooLarge";
    case Errc::not_validated: return "NotValidated";
    case Errc::immutable_entry: return "ImmutableEntry";
    case Errc::not_published: return "NotPublished";
    case Errc::model_rejected: return "ModelRejected";
    case Errc::scenario_invalid: return "ScenarioInvalid";
    case Errc::malformed_capture: return "MalformedCapture";
    case Errc::parse_error: return "ParseError";
  }
  return "Unknown";
}

}  // namespace oran
