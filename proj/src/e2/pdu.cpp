#include "oran/e2/pdu.hpp"

namespace oran::e2 {

TimeMs to_millis(TimeToWait ttw) noexcept {
  static constexpr TimeMs kMillis[kTimeToWaitCount] = {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000};
  return kMillis[static_cast<int>(ttw)];
}

std::string_view to_string(TimeToWait ttw) noexcept {
  static constexpr std::string_view kNames[kTimeToWaitCount] = {
      "w1ms", "w2ms", "w5ms", "w10ms", "w20ms", "w50ms", "w100ms", "w200ms", "w500ms", "w1s", "w2s", "w5s", "w10s"};
  return kNames[static_cast<int>(ttw)];
}

std::string_view to_string(ActionType type) noexcept {
  switch (type) {
    case ActionType::report: return "report";
    case ActionType::insert: return "insert";
    case ActionType::policy: return "policy";
  }
  return "?";
}

std::string_view to_string(SubsequentActionType type) noexcept {
  return type == SubsequentActionType::continue_ ? "continue" : "wait";
}

std::string_view to_string(CauseKind kind) noexcept {
  switch (kind) {
    case CauseKind::unsupported: return "unsupported";
    case CauseKind::rejected: return "rejected";
    case CauseKind::timeout: return "timeout";
    case CauseKind::conflict: return "conflict";
  }
  return "?";
}

std::string_view to_string(IndicationType type) noexcept {
  return type == IndicationType::report ? "report" : "insert";
}

std::string_view to_string(PduClass cls) noexcept {
  switch (cls) {
    case PduClass::initiating: return "initiatingMessage";
    case PduClass::successful_outcome: return "successfulOutcome";
    case PduClass::unsuccessful_outcome: return "unsuccessfulOutcome";
  }
  return "?";
}

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

}  // namespace

PduHeader header_for(const PduBody& body) noexcept {
  using enum PduClass;
  return std::visit(
      Overloaded{
          [](const SetupRequest&) { return PduHeader{initiating, procedure::setup}; },
          [](const SetupResponse&) { return PduHeader{successful_outcome, procedure::setup}; },
          [](const SubscriptionRequest&) { return PduHeader{initiating, procedure::subscription}; },
          [](const SubscriptionResponse&) { return PduHeader{successful_outcome, procedure::subscription}; },
          [](const SubscriptionFailure&) { return PduHeader{unsuccessful_outcome, procedure::subscription}; },
          [](const SubscriptionDeleteRequest&) { return PduHeader{initiating, procedure::subscription_delete}; },
          [](const SubscriptionDeleteResponse&) {
            return PduHeader{successful_outcome, procedure::subscription_delete};
          },
          [](const Indication&) { return PduHeader{initiating, procedure::indication}; },
          [](const ControlRequest&) { return PduHeader{initiating, procedure::control}; },
          [](const ControlAcknowledge&) { return PduHeader{successful_outcome, procedure::control}; },
          [](const ControlFailure&) { return PduHeader{unsuccessful_outcome, procedure::control}; },
          [](const ServiceUpdate&) { return PduHeader{initiating, procedure::service_update}; },
          [](const ServiceUpdateAcknowledge&) { return PduHeader{successful_outcome, procedure::service_update}; },
          [](const ErrorIndication&) { return PduHeader{initiating, procedure::error_indication}; },
      },
      body);
}

E2apPdu make_pdu(PduBody body) {
  auto hdr = header_for(body);
  return E2apPdu{hdr.pdu_class, hdr.procedure_code, std::move(body)};
}

std::string_view message_name(const PduBody& body) noexcept {
  static constexpr std::string_view kNames[] = {
      "E2setupRequest",          "E2setupResponse",           "RICsubscriptionRequest",
      "RICsubscriptionResponse", "RICsubscriptionFailure",    "RICsubscriptionDeleteRequest",
      "RICsubscriptionDeleteResponse", "RICindication",       "RICcontrolRequest",
      "RICcontrolAcknowledge",   "RICcontrolFailure",         "RICserviceUpdate",
      "RICserviceUpdateAcknowledge", "ErrorIndication"};
  static_assert(std::size(kNames) == std::variant_size_v<PduBody>);
  return kNames[body.index()];
}

}  // namespace oran::e2
