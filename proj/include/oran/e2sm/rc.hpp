#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "oran/common/bytes.hpp"

namespace oran::e2sm {

/// RAN control domains. Only radio resource allocation and connected-mode
/// mobility are implemented; the rest decode but are rejected when applied.
enum class RcDomain : std::uint8_t {
  radio_bearer = 0,
  radio_resource_allocation = 1,
  connected_mobility = 2,
  radio_access = 3,
  dual_connectivity = 4,
  carrier_aggregation = 5,
  idle_mobility = 6,
};
inline constexpr int kRcDomainCount = 7;
std::string_view to_string(RcDomain domain) noexcept;
bool parse_domain(std::string_view text, RcDomain& out) noexcept;
bool is_supported(RcDomain domain) noexcept;

enum class Comparator : std::uint8_t { lt = 0, le = 1, gt = 2, ge = 3, eq = 4 };
std::string_view to_string(Comparator cmp) noexcept;
bool parse_comparator(std::string_view text, Comparator& out) noexcept;
bool compare(double lhs, Comparator cmp, double rhs) noexcept;

enum class SchedulerKind : std::uint8_t { round_robin = 0, highest_buffer_first = 1 };
std::string_view to_string(SchedulerKind kind) noexcept;

/// Tunables an OffsetPolicy may adjust.
inline constexpr std::string_view kA3OffsetDb = "a3_offset_db";
bool is_registered_tunable(std::string_view name) noexcept;

/// Value-semantic owning pointer, used for the recursive ControlPolicy action.
template <class T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT(google-explicit-constructor)
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;
  ~Box() = default;

  const T& operator*() const { return *ptr_; }
  const T* operator->() const { return ptr_.get(); }
  bool operator==(const Box& other) const { return *ptr_ == *other.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

struct SlicePrbQuota {
  std::uint32_t cell_id = 0;
  std::uint32_t slice_id = 0;
  std::uint32_t dedicated_prb = 0;
  double min_ratio = 0.0;
  double max_ratio = 1.0;
  bool operator==(const SlicePrbQuota&) const = default;
};

struct HandoverCommand {
  std::uint64_t ue_id = 0;
  std::uint64_t target_cell_global_id = 0;
  bool operator==(const HandoverCommand&) const = default;
};

/// Reply to a handover insert that refuses the suspended procedure.
struct HandoverDeny {
  std::uint64_t ue_id = 0;
  bool operator==(const HandoverDeny&) const = default;
};

/// Selects the intra-slice scheduler of one slice.
struct SliceScheduler {
  std::uint32_t cell_id = 0;
  std::uint32_t slice_id = 0;
  SchedulerKind scheduler = SchedulerKind::round_robin;
  bool operator==(const SliceScheduler&) const = default;
};

struct TriggerCondition {
  std::string metric;
  Comparator comparator = Comparator::gt;
  double threshold = 0.0;
  bool operator==(const TriggerCondition&) const = default;
};

struct RcControl;

/// Node-local rule: when the trigger holds for the action's target, apply the action.
struct ControlPolicy {
  TriggerCondition trigger;
  Box<RcControl> action;
  bool operator==(const ControlPolicy&) const = default;
};

/// Adds delta to a registered tunable on every cell of the node.
struct OffsetPolicy {
  std::string parameter_name;
  double delta = 0.0;
  bool operator==(const OffsetPolicy&) const = default;
};

struct RcControl {
  std::variant<SlicePrbQuota, HandoverCommand, HandoverDeny, SliceScheduler, ControlPolicy, OffsetPolicy> value;
  bool operator==(const RcControl&) const = default;
};

RcDomain domain_of(const RcControl& control);

/// Identifier of the parameter a control writes, used for conflict detection.
struct ControlTarget {
  std::uint32_t cell_id = 0;
  std::int64_t slice_id = -1;  // -1 means every slice / not slice specific
  std::uint64_t ue_id = 0;
  std::string parameter;
  auto operator<=>(const ControlTarget&) const = default;
};
ControlTarget target_of(const RcControl& control);

/// Throws invariant_violation on malformed controls (ratios, unknown tunable).
void validate(const RcControl& control);

/// Cell served by the node; handover commands address cells by global id.
struct RcCell {
  std::uint32_t cell_id = 0;
  std::uint64_t global_id = 0;
  bool operator==(const RcCell&) const = default;
};

struct RcFunctionDefinition {
  std::vector<RcDomain> supported_domains;
  std::vector<std::string> tunables;
  std::vector<RcCell> cells;
  bool operator==(const RcFunctionDefinition&) const = default;
};

/// Insert trigger. The only event modelled is the A3 handover event.
struct RcEventTrigger {
  enum class Event : std::uint8_t { a3 = 0 };
  Event event = Event::a3;
  bool operator==(const RcEventTrigger&) const = default;
};

/// Action definition for insert (domain only) or policy (rule attached) actions.
struct RcActionDefinition {
  RcDomain domain = RcDomain::connected_mobility;
  std::vector<RcControl> policies;
  bool operator==(const RcActionDefinition&) const = default;
};

struct RcHeader {
  RcDomain domain = RcDomain::radio_resource_allocation;
  bool operator==(const RcHeader&) const = default;
};

/// Control message; all items are applied atomically by the node.
struct RcControlMessage {
  std::vector<RcControl> controls;
  bool operator==(const RcControlMessage&) const = default;
};

struct RcControlOutcome {
  std::uint32_t applied = 0;
  std::string detail;
  bool operator==(const RcControlOutcome&) const = default;
};

struct HandoverInsert {
  std::uint64_t ue_id = 0;
  std::uint32_t serving_cell_id = 0;
  std::uint32_t candidate_target_cell_id = 0;
  double serving_rsrp_dbm = 0.0;
  double target_rsrp_dbm = 0.0;
  Bytes call_process_id;
  std::uint32_t slice_id = 0;
  bool operator==(const HandoverInsert&) const = default;
};

}  // namespace oran::e2sm
