#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oran {

/// Error codes shared by every module. Each value names a failure that
/// callers are expected to distinguish programmatically.
enum class Errc {
  // codec / service models
  malformed_frame,
  unknown_procedure_code,
  invariant_violation,
  unknown_service_model,
  malformed_payload,
  unsupported_domain,
  // transport
  unreachable,
  refused,
  closed,
  oversize,
  // near-RT RIC
  unknown_node,
  unknown_function,
  wire_rejected,
  conflict_rejected,
  insufficient_data,
  forbidden,
  not_found,
  undeclared_topic,
  duplicate_name,
  not_onboarded,
  unknown_policy_type,
  malformed_policy,
  // simulator
  infeasible_quota,
  unknown_target,
  // non-RT RIC
  duplicate_id,
  unknown_id,
  schema_violation,
  unknown_topic,
  stale_epoch,
  missing_file,
  // mlops
  empty_input,
  grid_too_large,
  not_validated,
  immutable_entry,
  not_published,
  model_rejected,
  // harness
  scenario_invalid,
  malformed_capture,
  parse_error,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace oran
