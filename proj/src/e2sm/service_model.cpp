#include "oran/e2sm/service_model.hpp"

#include "oran/e2/tlv.hpp"

namespace oran::e2sm {

using e2::TlvReader;
using e2::TlvWriter;

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

constexpr std::uint8_t kKindTag = 0;

// payload kinds, unique within a model
namespace kind {
constexpr std::uint8_t function_definition = 1;
constexpr std::uint8_t event_trigger = 2;
constexpr std::uint8_t action_definition = 3;
constexpr std::uint8_t header = 4;
constexpr std::uint8_t message = 5;
constexpr std::uint8_t outcome = 6;
constexpr std::uint8_t handover_insert = 7;
constexpr std::uint8_t passthrough = 1;
}  // namespace kind

template <class E>
E read_enum(TlvReader& r, std::uint8_t tag, int count) {
  auto raw = r.u8(tag);
  if (raw >= count) r.error("enum value " + std::to_string(raw) + " out of range");
  return static_cast<E>(raw);
}

void put_scope(TlvWriter& w, std::uint8_t tag, const KpmScope& s) {
  TlvWriter n;
  n.u8(1, static_cast<std::uint8_t>(s.kind)).u32(2, s.cell_id).u32(3, s.slice_id).u64(4, s.ue_id);
  w.nested(tag, n);
}

KpmScope get_scope(TlvReader& r, std::uint8_t tag) {
  auto n = r.nested(tag);
  KpmScope s;
  s.kind = read_enum<KpmScope::Kind>(n, 1, 4);
  s.cell_id = n.u32(2);
  s.slice_id = n.u32(3);
  s.ue_id = n.u64(4);
  n.finish();
  return s;
}

void put_strings(TlvWriter& w, std::uint8_t tag, const std::vector<std::string>& items) {
  TlvWriter list;
  for (const auto& s : items) list.str(1, s);
  w.nested(tag, list);
}

std::vector<std::string> get_strings(TlvReader& r, std::uint8_t tag) {
  auto list = r.nested(tag);
  std::vector<std::string> out;
  while (!list.at_end()) out.push_back(list.str(1));
  return out;
}

template <class E>
void put_enum_list(TlvWriter& w, std::uint8_t tag, const std::vector<E>& items) {
  Bytes v;
  for (auto e : items) v.push_back(static_cast<std::uint8_t>(e));
  w.raw(tag, v);
}

template <class E>
std::vector<E> get_enum_list(TlvReader& r, std::uint8_t tag, int count) {
  auto v = r.expect(tag);
  std::vector<E> out;
  for (auto b : v) {
    if (b >= count) r.error("enum list value out of range");
    out.push_back(static_cast<E>(b));
  }
  return out;
}

void put_control(TlvWriter& w, std::uint8_t tag, const RcControl& c);
RcControl get_control(TlvReader& r, std::uint8_t tag);

void put_control(TlvWriter& w, std::uint8_t tag, const RcControl& c) {
  TlvWriter n;
  n.u8(1, static_cast<std::uint8_t>(c.value.index()));
  std::visit(Overloaded{
                 [&](const SlicePrbQuota& q) {
                   n.u32(2, q.cell_id).u32(3, q.slice_id).u32(4, q.dedicated_prb).f64(5, q.min_ratio).f64(6,
                                                                                                     q.max_ratio);
                 },
                 [&](const HandoverCommand& h) { n.u64(2, h.ue_id).u64(3, h.target_cell_global_id); },
                 [&](const HandoverDeny& h) { n.u64(2, h.ue_id); },
                 [&](const SliceScheduler& s) {
                   n.u32(2, s.cell_id).u32(3, s.slice_id).u8(4, static_cast<std::uint8_t>(s.scheduler));
                 },
                 [&](const ControlPolicy& p) {
                   n.str(2, p.trigger.metric)
                       .u8(3, static_cast<std::uint8_t>(p.trigger.comparator))
                       .f64(4, p.trigger.threshold);
                   put_control(n, 5, *p.action);
                 },
                 [&](const OffsetPolicy& o) { n.str(2, o.parameter_name).f64(3, o.delta); },
             },
             c.value);
  w.nested(tag, n);
}

RcControl get_control(TlvReader& r, std::uint8_t tag) {
  auto n = r.nested(tag);
  RcControl c;
  switch (n.u8(1)) {
    case 0: {
      SlicePrbQuota q;
      q.cell_id = n.u32(2);
      q.slice_id = n.u32(3);
      q.dedicated_prb = n.u32(4);
      q.min_ratio = n.f64(5);
      q.max_ratio = n.f64(6);
      c.value = q;
      break;
    }
    case 1: c.value = HandoverCommand{n.u64(2), n.u64(3)}; break;
    case 2: c.value = HandoverDeny{n.u64(2)}; break;
    case 3: {
      SliceScheduler s;
      s.cell_id = n.u32(2);
      s.slice_id = n.u32(3);
      s.scheduler = read_enum<SchedulerKind>(n, 4, 2);
      c.value = s;
      break;
    }
    case 4: {
      TriggerCondition t;
      t.metric = n.str(2);
      t.comparator = read_enum<Comparator>(n, 3, 5);
      t.threshold = n.f64(4);
      c.value = ControlPolicy{t, get_control(n, 5)};
      break;
    }
    case 5: {
      OffsetPolicy o;
      o.parameter_name = n.str(2);
      o.delta = n.f64(3);
      c.value = o;
      break;
    }
    default: n.error("unknown RC control variant");
  }
  n.finish();
  return c;
}

void put_controls(TlvWriter& w, std::uint8_t tag, const std::vector<RcControl>& controls) {
  TlvWriter list;
  for (const auto& c : controls) put_control(list, 1, c);
  w.nested(tag, list);
}

std::vector<RcControl> get_controls(TlvReader& r, std::uint8_t tag) {
  auto list = r.nested(tag);
  std::vector<RcControl> out;
  while (!list.at_end()) out.push_back(get_control(list, 1));
  return out;
}

void check(const Payload& payload) {
  std::visit(Overloaded{
                 [](const KpmEventTrigger& t) {
                   if (t.report_period_ms == 0) fail(Errc::invariant_violation, "report period must be positive");
                 },
                 [](const KpmActionDefinition& d) { validate(d); },
                 [](const RcControlMessage& m) {
                   for (const auto& c : m.controls) validate(c);
                 },
                 [](const RcActionDefinition& d) {
                   for (const auto& c : d.policies) validate(c);
                 },
                 [](const auto&) {},
             },
             payload);
}

}  // namespace

std::string_view to_string(ModelId id) noexcept {
  switch (id) {
    case ModelId::kpm: return "E2SM-KPM";
    case ModelId::rc: return "E2SM-RC";
    case ModelId::ni: return "E2SM-NI";
  }
  return "?";
}

ModelId model_of(const Payload& payload) noexcept {
  return std::visit(Overloaded{
                        [](const KpmFunctionDefinition&) { return ModelId::kpm; },
                        [](const KpmEventTrigger&) { return ModelId::kpm; },
                        [](const KpmActionDefinition&) { return ModelId::kpm; },
                        [](const KpmIndicationHeader&) { return ModelId::kpm; },
                        [](const KpmIndicationMessage&) { return ModelId::kpm; },
                        [](const NiPassthrough&) { return ModelId::ni; },
                        [](const auto&) { return ModelId::rc; },
                    },
                    payload);
}

Bytes sm_encode(ModelId model, const Payload& payload) {
  if (model_of(payload) != model) {
    fail(Errc::invariant_violation, "payload does not belong to " + std::string(to_string(model)));
  }
  return sm_encode(payload);
}

Bytes sm_encode(const Payload& payload) {
  check(payload);
  TlvWriter w;
  std::visit(Overloaded{
                 [&](const KpmFunctionDefinition& d) {
                   w.u8(kKindTag, kind::function_definition);
                   put_enum_list(w, 1, d.containers);
                 },
                 [&](const KpmEventTrigger& t) { w.u8(kKindTag, kind::event_trigger).u32(1, t.report_period_ms); },
                 [&](const KpmActionDefinition& d) {
                   w.u8(kKindTag, kind::action_definition).u8(1, static_cast<std::uint8_t>(d.node_kind));
                   put_scope(w, 2, d.scope);
                   put_strings(w, 3, d.metrics);
                 },
                 [&](const KpmIndicationHeader& h) {
                   w.u8(kKindTag, kind::header).str(1, h.node_id).i64(2, h.collection_start);
                 },
                 [&](const KpmIndicationMessage& m) {
                   w.u8(kKindTag, kind::message);
                   TlvWriter list;
                   for (const auto& rec : m.records) {
                     TlvWriter item;
                     item.str(1, rec.metric);
                     put_scope(item, 2, rec.scope);
                     item.i64(3, rec.timestamp).f64(4, rec.value);
                     list.nested(1, item);
                   }
                   w.nested(1, list);
                 },
                 [&](const RcFunctionDefinition& d) {
                   w.u8(kKindTag, kind::function_definition);
                   put_enum_list(w, 1, d.supported_domains);
                   put_strings(w, 2, d.tunables);
                   TlvWriter cells;
                   for (const auto& c : d.cells) {
                     TlvWriter item;
                     item.u32(1, c.cell_id).u64(2, c.global_id);
                     cells.nested(1, item);
                   }
                   w.nested(3, cells);
                 },
                 [&](const RcEventTrigger& t) {
                   w.u8(kKindTag, kind::event_trigger).u8(1, static_cast<std::uint8_t>(t.event));
                 },
                 [&](const RcActionDefinition& d) {
                   w.u8(kKindTag, kind::action_definition).u8(1, static_cast<std::uint8_t>(d.domain));
                   put_controls(w, 2, d.policies);
                 },
                 [&](const RcHeader& h) { w.u8(kKindTag, kind::header).u8(1, static_cast<std::uint8_t>(h.domain)); },
                 [&](const RcControlMessage& m) {
                   w.u8(kKindTag, kind::message);
                   put_controls(w, 1, m.controls);
                 },
                 [&](const RcControlOutcome& o) { w.u8(kKindTag, kind::outcome).u32(1, o.applied).str(2, o.detail); },
                 [&](const HandoverInsert& h) {
                   w.u8(kKindTag, kind::handover_insert)
                       .u64(1, h.ue_id)
                       .u32(2, h.serving_cell_id)
                       .u32(3, h.candidate_target_cell_id)
                       .f64(4, h.serving_rsrp_dbm)
                       .f64(5, h.target_rsrp_dbm)
                       .raw(6, h.call_process_id)
                       .u32(7, h.slice_id);
                 },
                 [&](const NiPassthrough& p) { w.u8(kKindTag, kind::passthrough).raw(1, p.data); },
             },
             payload);
  Bytes out;
  out.reserve(1 + w.bytes().size());
  out.push_back(static_cast<std::uint8_t>(model_of(payload)));
  out.insert(out.end(), w.bytes().begin(), w.bytes().end());
  return out;
}

Decoded sm_decode(ByteView data) {
  if (data.empty()) fail(Errc::malformed_payload, "empty service-model payload");
  const auto id = data[0];
  if (id < 0x01 || id > 0x03) fail(Errc::unknown_service_model, "model id " + std::to_string(id));
  const auto model = static_cast<ModelId>(id);
  TlvReader r(data.subspan(1), Errc::malformed_payload);
  const auto k = r.u8(kKindTag);
  Payload payload;
  switch (model) {
    case ModelId::kpm:
      switch (k) {
        case kind::function_definition:
          payload = KpmFunctionDefinition{get_enum_list<NodeKind>(r, 1, 3)};
          break;
        case kind::event_trigger: payload = KpmEventTrigger{r.u32(1)}; break;
        case kind::action_definition: {
          KpmActionDefinition d;
          d.node_kind = read_enum<NodeKind>(r, 1, 3);
          d.scope = get_scope(r, 2);
          d.metrics = get_strings(r, 3);
          payload = std::move(d);
          break;
        }
        case kind::header: {
          KpmIndicationHeader h;
          h.node_id = r.str(1);
          h.collection_start = r.i64(2);
          payload = std::move(h);
          break;
        }
        case kind::message: {
          KpmIndicationMessage m;
          auto list = r.nested(1);
          while (!list.at_end()) {
            auto item = list.nested(1);
            KpmRecord rec;
            rec.metric = item.str(1);
            rec.scope = get_scope(item, 2);
            rec.timestamp = item.i64(3);
            rec.value = item.f64(4);
            item.finish();
            m.records.push_back(std::move(rec));
          }
          payload = std::move(m);
          break;
        }
        default: r.error("unknown KPM payload kind " + std::to_string(k));
      }
      break;
    case ModelId::rc:
      switch (k) {
        case kind::function_definition: {
          RcFunctionDefinition d;
          d.supported_domains = get_enum_list<RcDomain>(r, 1, kRcDomainCount);
          d.tunables = get_strings(r, 2);
          auto cells = r.nested(3);
          while (!cells.at_end()) {
            auto item = cells.nested(1);
            RcCell c;
            c.cell_id = item.u32(1);
            c.global_id = item.u64(2);
            item.finish();
            d.cells.push_back(c);
          }
          payload = std::move(d);
          break;
        }
        case kind::event_trigger: payload = RcEventTrigger{read_enum<RcEventTrigger::Event>(r, 1, 1)}; break;
        case kind::action_definition: {
          RcActionDefinition d;
          d.domain = read_enum<RcDomain>(r, 1, kRcDomainCount);
          d.policies = get_controls(r, 2);
          payload = std::move(d);
          break;
        }
        case kind::header: payload = RcHeader{read_enum<RcDomain>(r, 1, kRcDomainCount)}; break;
        case kind::message: payload = RcControlMessage{get_controls(r, 1)}; break;
        case kind::outcome: {
          RcControlOutcome o;
          o.applied = r.u32(1);
          o.detail = r.str(2);
          payload = std::move(o);
          break;
        }
        case kind::handover_insert: {
          HandoverInsert h;
          h.ue_id = r.u64(1);
          h.serving_cell_id = r.u32(2);
          h.candidate_target_cell_id = r.u32(3);
          h.serving_rsrp_dbm = r.f64(4);
          h.target_rsrp_dbm = r.f64(5);
          h.call_process_id = r.bytes(6);
          h.slice_id = r.u32(7);
          payload = std::move(h);
          break;
        }
        default: r.error("unknown RC payload kind " + std::to_string(k));
      }
      break;
    case ModelId::ni:
      if (k != kind::passthrough) r.error("unknown NI payload kind " + std::to_string(k));
      payload = NiPassthrough{r.bytes(1)};
      break;
  }
  r.finish();
  return Decoded{model, std::move(payload)};
}

}  // namespace oran::e2sm
