#pragma once

#include <string>

#include "oran/e2/pdu.hpp"

namespace oran::e2 {

/// Wire layout: version(1) = 0x01 | pdu_class(1) | procedure_code(2, BE) |
/// body fields as TLV records in a fixed order. Field tags reuse the E2AP
/// protocol IE identifiers (29 = RICrequestID, 5 = RANfunctionID, ...).
inline constexpr std::uint8_t kWireVersion = 0x01;

/// Throws Error(invariant_violation) when the pdu breaks a type invariant.
void validate(const E2apPdu& pdu);

/// Deterministic encoding; validates first.
Bytes encode(const E2apPdu& pdu);

/// Exact inverse of encode. Throws malformed_frame, unknown_procedure_code
/// or invariant_violation.
E2apPdu decode(ByteView data);

/// Indented, line-oriented rendering using the E2AP listing field names.
std::string render_debug(const E2apPdu& pdu);

}  // namespace oran::e2
