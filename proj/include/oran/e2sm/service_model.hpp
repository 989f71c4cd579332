#pragma once

#include <cstdint>
#include <variant>

#include "oran/common/bytes.hpp"
#include "oran/common/error.hpp"
#include "oran/e2sm/kpm.hpp"
#include "oran/e2sm/rc.hpp"

namespace oran::e2sm {

enum class ModelId : std::uint8_t { kpm = 0x01, rc = 0x02, ni = 0x03 };
std::string_view to_string(ModelId id) noexcept;

/// Opaque interface message forwarded verbatim (X2/Xn/F1 passthrough).
struct NiPassthrough {
  Bytes data;
  bool operator==(const NiPassthrough&) const = default;
};

using Payload = std::variant<KpmFunctionDefinition, KpmEventTrigger, KpmActionDefinition, KpmIndicationHeader,
                             KpmIndicationMessage, RcFunctionDefinition, RcEventTrigger, RcActionDefinition,
                             RcHeader, RcControlMessage, RcControlOutcome, HandoverInsert, NiPassthrough>;

ModelId model_of(const Payload& payload) noexcept;

/// model_id(1) followed by TLV records; the first record names the payload kind.
Bytes sm_encode(const Payload& payload);

/// Same as sm_encode but checks that the payload belongs to `model`.
Bytes sm_encode(ModelId model, const Payload& payload);

struct Decoded {
  ModelId model;
  Payload payload;
};

/// Throws unknown_service_model or malformed_payload.
Decoded sm_decode(ByteView data);

/// Decodes and extracts one alternative; malformed_payload when the bytes
/// carry a different payload kind.
template <class T>
T sm_decode_as(ByteView data) {
  auto d = sm_decode(data);
  if (auto* v = std::get_if<T>(&d.payload)) return std::move(*v);
  fail(Errc::malformed_payload, "unexpected service-model payload kind");
}

}  // namespace oran::e2sm
