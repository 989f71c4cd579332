#include "oran/e2/codec.hpp"

#include <set>
#include <sstream>

#include "oran/e2/tlv.hpp"

namespace oran::e2 {

namespace {

// E2AP protocol IE identifiers used as top-level field tags.
namespace ie {
constexpr std::uint8_t cause = 1;
constexpr std::uint8_t global_node_id = 3;
constexpr std::uint8_t ran_function_id = 5;
constexpr std::uint8_t ran_function_item = 8;
constexpr std::uint8_t functions_accepted = 9;
constexpr std::uint8_t functions_added = 10;
constexpr std::uint8_t functions_deleted = 11;
constexpr std::uint8_t functions_modified = 12;
constexpr std::uint8_t functions_rejected = 13;
constexpr std::uint8_t action_id = 15;
constexpr std::uint8_t actions_admitted = 17;
constexpr std::uint8_t actions_not_admitted = 18;
constexpr std::uint8_t action_item = 19;
constexpr std::uint8_t call_process_id = 20;
constexpr std::uint8_t control_ack_request = 21;
constexpr std::uint8_t control_header = 22;
constexpr std::uint8_t control_message = 23;
constexpr std::uint8_t indication_header = 25;
constexpr std::uint8_t indication_message = 26;
constexpr std::uint8_t indication_sn = 27;
constexpr std::uint8_t indication_type = 28;
constexpr std::uint8_t request_id = 29;
constexpr std::uint8_t subscription_details = 30;
constexpr std::uint8_t control_outcome = 32;
}  // namespace ie

// Tags inside nested containers.
namespace sub {
constexpr std::uint8_t first = 1;
constexpr std::uint8_t second = 2;
constexpr std::uint8_t third = 3;
constexpr std::uint8_t fourth = 4;
}  // namespace sub

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

// ---- encoding helpers -----------------------------------------------------

void put_request_id(TlvWriter& w, const RicRequestId& id) {
  Bytes v;
  put_u32_be(v, id.requestor_id);
  put_u32_be(v, id.instance_id);
  w.raw(ie::request_id, v);
}

void put_id_list(TlvWriter& w, std::uint8_t tag, const std::vector<std::uint32_t>& ids) {
  Bytes v;
  for (auto id : ids) put_u32_be(v, id);
  w.raw(tag, v);
}

void put_functions(TlvWriter& w, std::uint8_t tag, const std::vector<RanFunction>& functions) {
  TlvWriter list;
  for (const auto& f : functions) {
    TlvWriter item;
    item.u32(sub::first, f.function_id).str(sub::second, f.name).u32(sub::third, f.revision).raw(sub::fourth,
                                                                                                  f.definition);
    list.nested(ie::ran_function_item, item);
  }
  w.nested(tag, list);
}

void put_cause(TlvWriter& w, const Cause& cause) {
  TlvWriter c;
  c.u8(sub::first, static_cast<std::uint8_t>(cause.kind)).str(sub::second, cause.detail);
  w.nested(ie::cause, c);
}

void put_actions(TlvWriter& w, const std::vector<RicAction>& actions) {
  TlvWriter list;
  for (const auto& a : actions) {
    TlvWriter item;
    item.u8(sub::first, a.action_id).u8(sub::second, static_cast<std::uint8_t>(a.type)).raw(sub::third, a.definition);
    if (a.subsequent) {
      TlvWriter s;
      s.u8(sub::first, static_cast<std::uint8_t>(a.subsequent->type))
          .u8(sub::second, static_cast<std::uint8_t>(a.subsequent->time_to_wait));
      item.nested(sub::fourth, s);
    }
    list.nested(ie::action_item, item);
  }
  w.nested(sub::second, list);
}

void encode_body(TlvWriter& w, const PduBody& body) {
  std::visit(Overloaded{
                 [&](const SetupRequest& m) {
                   w.str(ie::global_node_id, m.node_id);
                   put_functions(w, ie::functions_added, m.functions);
                 },
                 [&](const SetupResponse& m) {
                   put_id_list(w, ie::functions_accepted, m.accepted_ids);
                   put_id_list(w, ie::functions_rejected, m.rejected_ids);
                 },
                 [&](const SubscriptionRequest& m) {
                   put_request_id(w, m.request_id);
                   w.u32(ie::ran_function_id, m.function_id);
                   TlvWriter details;
                   details.raw(sub::first, m.event_trigger);
                   put_actions(details, m.actions);
                   w.nested(ie::subscription_details, details);
                 },
                 [&](const SubscriptionResponse& m) {
                   put_request_id(w, m.request_id);
                   put_id_list(w, ie::actions_admitted, m.admitted_action_ids);
                   put_id_list(w, ie::actions_not_admitted, m.rejected_action_ids);
                 },
                 [&](const SubscriptionFailure& m) {
                   put_request_id(w, m.request_id);
                   put_cause(w, m.cause);
                 },
                 [&](const SubscriptionDeleteRequest& m) {
                   put_request_id(w, m.request_id);
                   w.u32(ie::ran_function_id, m.function_id);
                 },
                 [&](const SubscriptionDeleteResponse& m) { put_request_id(w, m.request_id); },
                 [&](const Indication& m) {
                   put_request_id(w, m.request_id);
                   w.u32(ie::ran_function_id, m.function_id);
                   w.u8(ie::action_id, m.action_id);
                   if (m.sequence_number) w.u32(ie::indication_sn, *m.sequence_number);
                   w.u8(ie::indication_type, static_cast<std::uint8_t>(m.indication_type));
                   // optional fields never trail the body so that a truncated frame cannot decode
                   if (m.call_process_id) w.raw(ie::call_process_id, *m.call_process_id);
                   w.raw(ie::indication_header, m.header);
                   w.raw(ie::indication_message, m.message);
                 },
                 [&](const ControlRequest& m) {
                   put_request_id(w, m.request_id);
                   w.u32(ie::ran_function_id, m.function_id);
                   if (m.call_process_id) w.raw(ie::call_process_id, *m.call_process_id);
                   w.raw(ie::control_header, m.header);
                   w.raw(ie::control_message, m.message);
                   w.u8(ie::control_ack_request, m.ack_requested ? 1 : 0);
                 },
                 [&](const ControlAcknowledge& m) {
                   put_request_id(w, m.request_id);
                   w.raw(ie::control_outcome, m.outcome);
                 },
                 [&](const ControlFailure& m) {
                   put_request_id(w, m.request_id);
                   put_cause(w, m.cause);
                 },
                 [&](const ServiceUpdate& m) {
                   put_functions(w, ie::functions_added, m.added);
                   put_functions(w, ie::functions_modified, m.modified);
                   put_id_list(w, ie::functions_deleted, m.deleted);
                 },
                 [&](const ServiceUpdateAcknowledge& m) {
                   put_id_list(w, ie::functions_accepted, m.accepted_ids);
                   put_id_list(w, ie::functions_rejected, m.rejected_ids);
                 },
                 [&](const ErrorIndication& m) { put_cause(w, m.cause); },
             },
             body);
}

// ---- decoding helpers -----------------------------------------------------

RicRequestId get_request_id(TlvReader& r) {
  auto v = r.expect(ie::request_id);
  if (v.size() != 8) r.error("RICrequestID expects 8 bytes");
  return RicRequestId{get_u32_be(v), get_u32_be(v.subspan(4))};
}

std::vector<std::uint32_t> get_id_list(TlvReader& r, std::uint8_t tag) {
  auto v = r.expect(tag);
  if (v.size() % 4 != 0) r.error("id list length not a multiple of 4");
  std::vector<std::uint32_t> ids;
  for (std::size_t i = 0; i < v.size(); i += 4) ids.push_back(get_u32_be(v.subspan(i)));
  return ids;
}

std::vector<RanFunction> get_functions(TlvReader& r, std::uint8_t tag) {
  auto list = r.nested(tag);
  std::vector<RanFunction> out;
  while (!list.at_end()) {
    auto item = list.nested(ie::ran_function_item);
    RanFunction f;
    f.function_id = item.u32(sub::first);
    f.name = item.str(sub::second);
    f.revision = item.u32(sub::third);
    f.definition = item.bytes(sub::fourth);
    item.finish();
    out.push_back(std::move(f));
  }
  return out;
}

template <class E>
E get_enum(TlvReader& r, std::uint8_t tag, int count) {
  auto raw = r.u8(tag);
  if (raw >= count) r.error("enum value " + std::to_string(raw) + " out of range");
  return static_cast<E>(raw);
}

Cause get_cause(TlvReader& r) {
  auto c = r.nested(ie::cause);
  Cause cause;
  cause.kind = get_enum<CauseKind>(c, sub::first, 4);
  cause.detail = c.str(sub::second);
  c.finish();
  return cause;
}

std::vector<RicAction> get_actions(TlvReader& r) {
  auto list = r.nested(sub::second);
  std::vector<RicAction> out;
  while (!list.at_end()) {
    auto item = list.nested(ie::action_item);
    RicAction a;
    a.action_id = item.u8(sub::first);
    a.type = get_enum<ActionType>(item, sub::second, 3);
    a.definition = item.bytes(sub::third);
    if (item.peek_tag() == sub::fourth) {
      auto s = item.nested(sub::fourth);
      SubsequentAction sa;
      sa.type = get_enum<SubsequentActionType>(s, sub::first, 2);
      sa.time_to_wait = get_enum<TimeToWait>(s, sub::second, kTimeToWaitCount);
      s.finish();
      a.subsequent = sa;
    }
    item.finish();
    out.push_back(std::move(a));
  }
  return out;
}

std::optional<Bytes> get_optional_bytes(TlvReader& r, std::uint8_t tag) {
  auto v = r.optional(tag);
  if (!v) return std::nullopt;
  return Bytes(v->begin(), v->end());
}

PduBody decode_body(TlvReader& r, PduClass cls, std::uint16_t code) {
  using enum PduClass;
  switch (code) {
    case procedure::setup:
      if (cls == initiating) {
        SetupRequest m;
        m.node_id = r.str(ie::global_node_id);
        m.functions = get_functions(r, ie::functions_added);
        return m;
      }
      if (cls == successful_outcome) {
        SetupResponse m;
        m.accepted_ids = get_id_list(r, ie::functions_accepted);
        m.rejected_ids = get_id_list(r, ie::functions_rejected);
        return m;
      }
      break;
    case procedure::service_update:
      if (cls == initiating) {
        ServiceUpdate m;
        m.added = get_functions(r, ie::functions_added);
        m.modified = get_functions(r, ie::functions_modified);
        m.deleted = get_id_list(r, ie::functions_deleted);
        return m;
      }
      if (cls == successful_outcome) {
        ServiceUpdateAcknowledge m;
        m.accepted_ids = get_id_list(r, ie::functions_accepted);
        m.rejected_ids = get_id_list(r, ie::functions_rejected);
        return m;
      }
      break;
    case procedure::error_indication:
      if (cls == initiating) return ErrorIndication{get_cause(r)};
      break;
    case procedure::control:
      if (cls == initiating) {
        ControlRequest m;
        m.request_id = get_request_id(r);
        m.function_id = r.u32(ie::ran_function_id);
        m.call_process_id = get_optional_bytes(r, ie::call_process_id);
        m.header = r.bytes(ie::control_header);
        m.message = r.bytes(ie::control_message);
        auto ack = r.u8(ie::control_ack_request);
        if (ack > 1) r.error("control ack request flag must be 0 or 1");
        m.ack_requested = ack == 1;
        return m;
      }
      if (cls == successful_outcome) {
        ControlAcknowledge m;
        m.request_id = get_request_id(r);
        m.outcome = r.bytes(ie::control_outcome);
        return m;
      }
      if (cls == unsuccessful_outcome) {
        ControlFailure m;
        m.request_id = get_request_id(r);
        m.cause = get_cause(r);
        return m;
      }
      break;
    case procedure::indication:
      if (cls == initiating) {
        Indication m;
        m.request_id = get_request_id(r);
        m.function_id = r.u32(ie::ran_function_id);
        m.action_id = r.u8(ie::action_id);
        if (r.peek_tag() == ie::indication_sn) m.sequence_number = r.u32(ie::indication_sn);
        m.indication_type = get_enum<IndicationType>(r, ie::indication_type, 2);
        m.call_process_id = get_optional_bytes(r, ie::call_process_id);
        m.header = r.bytes(ie::indication_header);
        m.message = r.bytes(ie::indication_message);
        return m;
      }
      break;
    case procedure::subscription:
      if (cls == initiating) {
        SubscriptionRequest m;
        m.request_id = get_request_id(r);
        m.function_id = r.u32(ie::ran_function_id);
        auto details = r.nested(ie::subscription_details);
        m.event_trigger = details.bytes(sub::first);
        m.actions = get_actions(details);
        details.finish();
        return m;
      }
      if (cls == successful_outcome) {
        SubscriptionResponse m;
        m.request_id = get_request_id(r);
        m.admitted_action_ids = get_id_list(r, ie::actions_admitted);
        m.rejected_action_ids = get_id_list(r, ie::actions_not_admitted);
        return m;
      }
      if (cls == unsuccessful_outcome) {
        SubscriptionFailure m;
        m.request_id = get_request_id(r);
        m.cause = get_cause(r);
        return m;
      }
      break;
    case procedure::subscription_delete:
      if (cls == initiating) {
        SubscriptionDeleteRequest m;
        m.request_id = get_request_id(r);
        m.function_id = r.u32(ie::ran_function_id);
        return m;
      }
      if (cls == successful_outcome) return SubscriptionDeleteResponse{get_request_id(r)};
      break;
    default:
      break;
  }
  fail(Errc::unknown_procedure_code, "procedure code " + std::to_string(code) + " with class " +
                                         std::string(to_string(cls)));
}

// ---- rendering --------------------------------------------------------------

class Renderer {
 public:
  void open(std::string_view name) {
    line(std::string(name) + ":");
    ++depth_;
  }
  void close() { --depth_; }
  void field(std::string_view name, std::string_view value) { line(std::string(name) + ": " + std::string(value)); }
  void field(std::string_view name, std::uint64_t value) { field(name, std::to_string(value)); }
  void bytes(std::string_view name, const Bytes& value) { field(name, value.empty() ? "(empty)" : to_hex(value)); }
  void ids(std::string_view name, const std::vector<std::uint32_t>& ids) {
    std::string v = "[";
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i) v += ", ";
      v += std::to_string(ids[i]);
    }
    field(name, v + "]");
  }
  void request_id(const RicRequestId& id) {
    open("RICrequestID");
    field("ricRequestorID", id.requestor_id);
    field("ricInstanceID", id.instance_id);
    close();
  }
  void cause(const Cause& c) {
    open("Cause");
    field("kind", to_string(c.kind));
    field("detail", c.detail);
    close();
  }
  void functions(std::string_view name, const std::vector<RanFunction>& fs) {
    if (fs.empty()) {
      field(name, "[]");
      return;
    }
    open(name);
    for (const auto& f : fs) {
      open("RANfunction-Item");
      field("ranFunctionID", f.function_id);
      field("ranFunctionName", f.name);
      field("ranFunctionRevision", f.revision);
      bytes("ranFunctionDefinition", f.definition);
      close();
    }
    close();
  }
  std::string str() const { return out_.str(); }

 private:
  void line(const std::string& text) { out_ << std::string(depth_ * 2, ' ') << text << '\n'; }

  std::ostringstream out_;
  int depth_ = 0;
};

void render_body(Renderer& r, const PduBody& body) {
  std::visit(Overloaded{
                 [&](const SetupRequest& m) {
                   r.field("GlobalE2node-ID", m.node_id);
                   r.functions("functions", m.functions);
                 },
                 [&](const SetupResponse& m) {
                   r.ids("RANfunctionsAccepted", m.accepted_ids);
                   r.ids("RANfunctionsRejected", m.rejected_ids);
                 },
                 [&](const SubscriptionRequest& m) {
                   r.request_id(m.request_id);
                   r.field("RANfunctionID", m.function_id);
                   r.open("RICsubscriptionDetails");
                   r.bytes("ricEventTriggerDefinition", m.event_trigger);
                   if (m.actions.empty()) {
                     r.field("ricAction-ToBeSetup-List", "[]");
                   } else {
                     r.open("ricAction-ToBeSetup-List");
                     for (const auto& a : m.actions) {
                       r.open("RICaction-ToBeSetup-Item");
                       r.field("ricActionID", a.action_id);
                       r.field("ricActionType", to_string(a.type));
                       r.bytes("ricActionDefinition", a.definition);
                       if (a.subsequent) {
                         r.open("ricSubsequentAction");
                         r.field("ricSubsequentActionType", to_string(a.subsequent->type));
                         r.field("ricTimeToWait", to_string(a.subsequent->time_to_wait));
                         r.close();
                       }
                       r.close();
                     }
                     r.close();
                   }
                   r.close();
                 },
                 [&](const SubscriptionResponse& m) {
                   r.request_id(m.request_id);
                   r.ids("RICactions-Admitted", m.admitted_action_ids);
                   r.ids("RICactions-NotAdmitted", m.rejected_action_ids);
                 },
                 [&](const SubscriptionFailure& m) {
                   r.request_id(m.request_id);
                   r.cause(m.cause);
                 },
                 [&](const SubscriptionDeleteRequest& m) {
                   r.request_id(m.request_id);
                   r.field("RANfunctionID", m.function_id);
                 },
                 [&](const SubscriptionDeleteResponse& m) { r.request_id(m.request_id); },
                 [&](const Indication& m) {
                   r.request_id(m.request_id);
                   r.field("RANfunctionID", m.function_id);
                   r.field("RICactionID", m.action_id);
                   if (m.sequence_number) r.field("RICindicationSN", *m.sequence_number);
                   r.field("RICindicationType", to_string(m.indication_type));
                   r.bytes("RICindicationHeader", m.header);
                   r.bytes("RICindicationMessage", m.message);
                   if (m.call_process_id) r.bytes("RICcallProcessID", *m.call_process_id);
                 },
                 [&](const ControlRequest& m) {
                   r.request_id(m.request_id);
                   r.field("RANfunctionID", m.function_id);
                   if (m.call_process_id) r.bytes("RICcallProcessID", *m.call_process_id);
                   r.bytes("RICcontrolHeader", m.header);
                   r.bytes("RICcontrolMessage", m.message);
                   r.field("RICcontrolAckRequest", m.ack_requested ? "ack" : "noAck");
                 },
                 [&](const ControlAcknowledge& m) {
                   r.request_id(m.request_id);
                   r.bytes("RICcontrolOutcome", m.outcome);
                 },
                 [&](const ControlFailure& m) {
                   r.request_id(m.request_id);
                   r.cause(m.cause);
                 },
                 [&](const ServiceUpdate& m) {
                   r.functions("RANfunctionsAdded", m.added);
                   r.functions("RANfunctionsModified", m.modified);
                   r.ids("RANfunctionsDeleted", m.deleted);
                 },
                 [&](const ServiceUpdateAcknowledge& m) {
                   r.ids("RANfunctionsAccepted", m.accepted_ids);
                   r.ids("RANfunctionsRejected", m.rejected_ids);
                 },
                 [&](const ErrorIndication& m) { r.cause(m.cause); },
             },
             body);
}

}  // namespace

void validate(const E2apPdu& pdu) {
  auto expected = header_for(pdu.body);
  if (expected.pdu_class != pdu.pdu_class || expected.procedure_code != pdu.procedure_code) {
    fail(Errc::invariant_violation, std::string(message_name(pdu.body)) + " requires procedure code " +
                                        std::to_string(expected.procedure_code) + " (" +
                                        std::string(to_string(expected.pdu_class)) + "), got " +
                                        std::to_string(pdu.procedure_code));
  }
  if (const auto* ind = std::get_if<Indication>(&pdu.body)) {
    if (ind->indication_type == IndicationType::insert && !ind->call_process_id) {
      fail(Errc::invariant_violation, "insert indication without RICcallProcessID");
    }
  }
  if (const auto* req = std::get_if<SubscriptionRequest>(&pdu.body)) {
    std::set<std::uint8_t> seen;
    for (const auto& a : req->actions) {
      if (!seen.insert(a.action_id).second) {
        fail(Errc::invariant_violation, "duplicate action id " + std::to_string(a.action_id));
      }
    }
  }
  if (const auto* setup = std::get_if<SetupRequest>(&pdu.body)) {
    std::set<std::uint32_t> seen;
    for (const auto& f : setup->functions) {
      if (!seen.insert(f.function_id).second) {
        fail(Errc::invariant_violation, "duplicate RAN function id " + std::to_string(f.function_id));
      }
    }
  }
}

Bytes encode(const E2apPdu& pdu) {
  validate(pdu);
  TlvWriter body;
  encode_body(body, pdu.body);
  Bytes out;
  out.reserve(4 + body.bytes().size());
  out.push_back(kWireVersion);
  out.push_back(static_cast<std::uint8_t>(pdu.pdu_class));
  put_u16_be(out, pdu.procedure_code);
  const auto& b = body.bytes();
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

E2apPdu decode(ByteView data) {
  if (data.size() < 4) fail(Errc::malformed_frame, "frame shorter than the 4-byte header");
  if (data[0] != kWireVersion) fail(Errc::malformed_frame, "unsupported version " + std::to_string(data[0]));
  if (data[1] > 2) fail(Errc::malformed_frame, "invalid pdu class " + std::to_string(data[1]));
  const auto cls = static_cast<PduClass>(data[1]);
  const auto code = get_u16_be(data.subspan(2));
  TlvReader reader(data.subspan(4), Errc::malformed_frame);
  E2apPdu pdu{cls, code, decode_body(reader, cls, code)};
  reader.finish();
  validate(pdu);
  return pdu;
}

std::string render_debug(const E2apPdu& pdu) {
  Renderer r;
  r.open("E2AP-PDU");
  r.open(to_string(pdu.pdu_class));
  r.field("procedureCode", pdu.procedure_code);
  r.open(message_name(pdu.body));
  render_body(r, pdu.body);
  r.close();
  r.close();
  r.close();
  return r.str();
}

}  // namespace oran::e2
