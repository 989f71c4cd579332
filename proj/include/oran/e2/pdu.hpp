#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "oran/common/bytes.hpp"

namespace oran::e2 {

struct RicRequestId {
  std::uint32_t requestor_id = 0;
  std::uint32_t instance_id = 0;

  auto operator<=>(const RicRequestId&) const = default;
};

struct RanFunction {
  std::uint32_t function_id = 0;
  std::string name;
  std::uint32_t revision = 0;
  Bytes definition;

  bool operator==(const RanFunction&) const = default;
};

enum class ActionType : std::uint8_t { report = 0, insert = 1, policy = 2 };
enum class SubsequentActionType : std::uint8_t { continue_ = 0, wait = 1 };

enum class TimeToWait : std::uint8_t {
  w1ms, w2ms, w5ms, w10ms, w20ms, w50ms, w100ms, w200ms, w500ms, w1s, w2s, w5s, w10s
};
inline constexpr int kTimeToWaitCount = 13;

TimeMs to_millis(TimeToWait ttw) noexcept;
std::string_view to_string(TimeToWait ttw) noexcept;
std::string_view to_string(ActionType type) noexcept;
std::string_view to_string(SubsequentActionType type) noexcept;

struct SubsequentAction {
  SubsequentActionType type = SubsequentActionType::continue_;
  TimeToWait time_to_wait = TimeToWait::w10ms;

  bool operator==(const SubsequentAction&) const = default;
};

struct RicAction {
  std::uint8_t action_id = 0;
  ActionType type = ActionType::report;
  Bytes definition;
  std::optional<SubsequentAction> subsequent;

  bool operator==(const RicAction&) const = default;
};

enum class CauseKind : std::uint8_t { unsupported = 0, rejected = 1, timeout = 2, conflict = 3 };
std::string_view to_string(CauseKind kind) noexcept;

struct Cause {
  CauseKind kind = CauseKind::rejected;
  std::string detail;

  bool operator==(const Cause&) const = default;
};

enum class IndicationType : std::uint8_t { report = 0, insert = 1 };
std::string_view to_string(IndicationType type) noexcept;

struct SetupRequest {
  std::string node_id;
  std::vector<RanFunction> functions;
  bool operator==(const SetupRequest&) const = default;
};

struct SetupResponse {
  std::vector<std::uint32_t> accepted_ids;
  std::vector<std::uint32_t> rejected_ids;
  bool operator==(const SetupResponse&) const = default;
};

struct SubscriptionRequest {
  RicRequestId request_id;
  std::uint32_t function_id = 0;
  Bytes event_trigger;
  std::vector<RicAction> actions;
  bool operator==(const SubscriptionRequest&) const = default;
};

struct SubscriptionResponse {
  RicRequestId request_id;
  std::vector<std::uint32_t> admitted_action_ids;
  std::vector<std::uint32_t> rejected_action_ids;
  bool operator==(const SubscriptionResponse&) const = default;
};

struct SubscriptionFailure {
  RicRequestId request_id;
  Cause cause;
  bool operator==(const SubscriptionFailure&) const = default;
};

struct SubscriptionDeleteRequest {
  RicRequestId request_id;
  std::uint32_t function_id = 0;
  bool operator==(const SubscriptionDeleteRequest&) const = default;
};

struct SubscriptionDeleteResponse {
  RicRequestId request_id;
  bool operator==(const SubscriptionDeleteResponse&) const = default;
};

struct Indication {
  RicRequestId request_id;
  std::uint32_t function_id = 0;
  std::uint8_t action_id = 0;
  std::optional<std::uint32_t> sequence_number;
  IndicationType indication_type = IndicationType::report;
  Bytes header;
  Bytes message;
  std::optional<Bytes> call_process_id;
  bool operator==(const Indication&) const = default;
};

struct ControlRequest {
  RicRequestId request_id;
  std::uint32_t function_id = 0;
  std::optional<Bytes> call_process_id;
  Bytes header;
  Bytes message;
  bool ack_requested = true;
  bool operator==(const ControlRequest&) const = default;
};

struct ControlAcknowledge {
  RicRequestId request_id;
  Bytes outcome;
  bool operator==(const ControlAcknowledge&) const = default;
};

struct ControlFailure {
  RicRequestId request_id;
  Cause cause;
  bool operator==(const ControlFailure&) const = default;
};

struct ServiceUpdate {
  std::vector<RanFunction> added;
  std::vector<RanFunction> modified;
  std::vector<std::uint32_t> deleted;
  bool operator==(const ServiceUpdate&) const = default;
};

struct ServiceUpdateAcknowledge {
  std::vector<std::uint32_t> accepted_ids;
  std::vector<std::uint32_t> rejected_ids;
  bool operator==(const ServiceUpdateAcknowledge&) const = default;
};

struct ErrorIndication {
  Cause cause;
  bool operator==(const ErrorIndication&) const = default;
};

using PduBody = std::variant<SetupRequest, SetupResponse, SubscriptionRequest, SubscriptionResponse,
                             SubscriptionFailure, SubscriptionDeleteRequest, SubscriptionDeleteResponse,
                             Indication, ControlRequest, ControlAcknowledge, ControlFailure, ServiceUpdate,
                             ServiceUpdateAcknowledge, ErrorIndication>;

enum class PduClass : std::uint8_t { initiating = 0, successful_outcome = 1, unsuccessful_outcome = 2 };
std::string_view to_string(PduClass cls) noexcept;

/// Procedure codes. Subscription (8) and indication (5) follow E2AP; the
/// remaining values are fixed locally.
namespace procedure {
inline constexpr std::uint16_t setup = 1;
inline constexpr std::uint16_t service_update = 2;
inline constexpr std::uint16_t error_indication = 3;
inline constexpr std::uint16_t control = 4;
inline constexpr std::uint16_t indication = 5;
inline constexpr std::uint16_t subscription = 8;
inline constexpr std::uint16_t subscription_delete = 9;
}  // namespace procedure

struct PduHeader {
  PduClass pdu_class;
  std::uint16_t procedure_code;
  bool operator==(const PduHeader&) const = default;
};

/// The code table: the (class, procedure code) pair each body variant must carry.
PduHeader header_for(const PduBody& body) noexcept;

struct E2apPdu {
  PduClass pdu_class = PduClass::initiating;
  std::uint16_t procedure_code = 0;
  PduBody body;

  bool operator==(const E2apPdu&) const = default;
};

/// Builds a pdu whose class and code are taken from the code table.
E2apPdu make_pdu(PduBody body);

std::string_view message_name(const PduBody& body) noexcept;

}  // namespace oran::e2
