#include "oran/e2sm/rc.hpp"

#include "oran/common/error.hpp"

namespace oran::e2sm {

namespace {
template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

constexpr std::string_view kDomainNames[kRcDomainCount] = {
    "radio_bearer", "radio_resource_allocation", "connected_mobility", "radio_access",
    "dual_connectivity", "carrier_aggregation", "idle_mobility"};
}  // namespace

std::string_view to_string(RcDomain domain) noexcept { return kDomainNames[static_cast<int>(domain)]; }

bool parse_domain(std::string_view text, RcDomain& out) noexcept {
  for (int i = 0; i < kRcDomainCount; ++i) {
    if (kDomainNames[i] == text) {
      out = static_cast<RcDomain>(i);
      return true;
    }
  }
  return false;
}

bool is_supported(RcDomain domain) noexcept {
  return domain == RcDomain::radio_resource_allocation || domain == RcDomain::connected_mobility;
}

std::string_view to_string(Comparator cmp) noexcept {
  switch (cmp) {
    case Comparator::lt: return "lt";
    case Comparator::le: return "le";
    case Comparator::gt: return "gt";
    case Comparator::ge: return "ge";
    case Comparator::eq: return "eq";
  }
  return "?";
}

bool parse_comparator(std::string_view text, Comparator& out) noexcept {
  static constexpr std::pair<std::string_view, Comparator> kTable[] = {
      {"lt", Comparator::lt}, {"<", Comparator::lt},  {"le", Comparator::le}, {"<=", Comparator::le},
      {"gt", Comparator::gt}, {">", Comparator::gt},  {"ge", Comparator::ge}, {">=", Comparator::ge},
      {"eq", Comparator::eq}, {"==", Comparator::eq}};
  for (const auto& [name, cmp] : kTable) {
    if (name == text) {
      out = cmp;
      return true;
    }
  }
  return false;
}

bool compare(double lhs, Comparator cmp, double rhs) noexcept {
  switch (cmp) {
    case Comparator::lt: return lhs < rhs;
    case Comparator::le: return lhs <= rhs;
    case Comparator::gt: return lhs > rhs;
    case Comparator::ge: return lhs >= rhs;
    case Comparator::eq: return lhs == rhs;
  }
  return false;
}

std::string_view to_string(SchedulerKind kind) noexcept {
  return kind == SchedulerKind::round_robin ? "round_robin" : "highest_buffer_first";
}

bool is_registered_tunable(std::string_view name) noexcept { return name == kA3OffsetDb; }

RcDomain domain_of(const RcControl& control) {
  return std::visit(Overloaded{
                        [](const SlicePrbQuota&) { return RcDomain::radio_resource_allocation; },
                        [](const SliceScheduler&) { return RcDomain::radio_resource_allocation; },
                        [](const HandoverCommand&) { return RcDomain::connected_mobility; },
                        [](const HandoverDeny&) { return RcDomain::connected_mobility; },
                        [](const ControlPolicy& p) { return domain_of(*p.action); },
                        [](const OffsetPolicy&) { return RcDomain::connected_mobility; },
                    },
                    control.value);
}

ControlTarget target_of(const RcControl& control) {
  return std::visit(Overloaded{
                        [](const SlicePrbQuota& q) {
                          return ControlTarget{q.cell_id, q.slice_id, 0, "dedicated_prb"};
                        },
                        [](const SliceScheduler& s) {
                          return ControlTarget{s.cell_id, s.slice_id, 0, "scheduler"};
                        },
                        [](const HandoverCommand& h) { return ControlTarget{0, -1, h.ue_id, "serving_cell"}; },
                        [](const HandoverDeny& h) { return ControlTarget{0, -1, h.ue_id, "serving_cell"}; },
                        [](const ControlPolicy& p) { return target_of(*p.action); },
                        [](const OffsetPolicy& o) { return ControlTarget{0, -1, 0, o.parameter_name}; },
                    },
                    control.value);
}

void validate(const RcControl& control) {
  std::visit(Overloaded{
                 [](const SlicePrbQuota& q) {
                   if (!(q.min_ratio >= 0.0 && q.max_ratio <= 1.0 && q.min_ratio <= q.max_ratio)) {
                     fail(Errc::invariant_violation, "slice quota ratios must satisfy 0 <= min <= max <= 1");
                   }
                 },
                 [](const HandoverCommand&) {},
                 [](const HandoverDeny&) {},
                 [](const SliceScheduler&) {},
                 [](const ControlPolicy& p) {
                   if (std::holds_alternative<ControlPolicy>(p.action->value)) {
                     fail(Errc::invariant_violation, "control policies cannot nest");
                   }
                   validate(*p.action);
                 },
                 [](const OffsetPolicy& o) {
                   if (!is_registered_tunable(o.parameter_name)) {
                     fail(Errc::invariant_violation, "unregistered tunable '" + o.parameter_name + "'");
                   }
                 },
             },
             control.value);
}

}  // namespace oran::e2sm
