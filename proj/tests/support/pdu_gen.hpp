#pragma once

// Generator of random valid E2AP pdus for roundtrip properties.

#include <random>

#include "oran/e2/pdu.hpp"

namespace oran::testing {

class PduGen {
 public:
  explicit PduGen(std::uint64_t seed) : rng_(seed) {}

  e2::E2apPdu next() {
    switch (pick(14)) {
      case 0: return e2::make_pdu(e2::SetupRequest{text(), functions()});
      case 1: return e2::make_pdu(e2::SetupResponse{ids(), ids()});
      case 2: {
        e2::SubscriptionRequest m{request_id(), u32(), bytes(), {}};
        const auto n = pick(4);
        for (std::uint32_t i = 0; i < n; ++i) m.actions.push_back(action(static_cast<std::uint8_t>(i * 3 + pick(3))));
        return e2::make_pdu(std::move(m));
      }
      case 3: return e2::make_pdu(e2::SubscriptionResponse{request_id(), ids(), ids()});
      case 4: return e2::make_pdu(e2::SubscriptionFailure{request_id(), cause()});
      case 5: return e2::make_pdu(e2::SubscriptionDeleteRequest{request_id(), u32()});
      case 6: return e2::make_pdu(e2::SubscriptionDeleteResponse{request_id()});
      case 7: {
        e2::Indication m;
        m.request_id = request_id();
        m.function_id = u32();
        m.action_id = static_cast<std::uint8_t>(pick(256));
        if (pick(2)) m.sequence_number = u32();
        m.indication_type = pick(2) ? e2::IndicationType::insert : e2::IndicationType::report;
        m.header = bytes();
        m.message = bytes();
        if (m.indication_type == e2::IndicationType::insert || pick(2)) m.call_process_id = bytes();
        return e2::make_pdu(std::move(m));
      }
      case 8: {
        e2::ControlRequest m;
        m.request_id = request_id();
        m.function_id = u32();
        if (pick(2)) m.call_process_id = bytes();
        m.header = bytes();
        m.message = bytes();
        m.ack_requested = pick(2) == 1;
        return e2::make_pdu(std::move(m));
      }
      case 9: return e2::make_pdu(e2::ControlAcknowledge{request_id(), bytes()});
      case 10: return e2::make_pdu(e2::ControlFailure{request_id(), cause()});
      case 11: return e2::make_pdu(e2::ServiceUpdate{functions(), functions(), ids()});
      case 12: return e2::make_pdu(e2::ServiceUpdateAcknowledge{ids(), ids()});
      default: return e2::make_pdu(e2::ErrorIndication{cause()});
    }
  }

  std::uint32_t pick(std::uint32_t n) { return static_cast<std::uint32_t>(rng_() % n); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(rng_()); }

  Bytes bytes(std::uint32_t max_len = 48) {
    Bytes b(pick(max_len + 1));
    for (auto& x : b) x = static_cast<std::uint8_t>(rng_());
    return b;
  }

  std::string text() {
    std::string s(pick(12), 'a');
    for (auto& c : s) c = static_cast<char>('a' + pick(26));
    return s;
  }

  e2::RicRequestId request_id() { return {u32(), u32()}; }

  std::vector<std::uint32_t> ids() {
    std::vector<std::uint32_t> v(pick(5));
    for (auto& x : v) x = u32();
    return v;
  }

  std::vector<e2::RanFunction> functions() {
    std::vector<e2::RanFunction> v;
    const auto n = pick(4);
    for (std::uint32_t i = 0; i < n; ++i) v.push_back({i * 7 + pick(7), text(), pick(10), bytes()});
    return v;
  }

  e2::RicAction action(std::uint8_t id) {
    e2::RicAction a;
    a.action_id = id;
    a.type = static_cast<e2::ActionType>(pick(3));
    a.definition = bytes();
    if (pick(2)) {
      a.subsequent = e2::SubsequentAction{static_cast<e2::SubsequentActionType>(pick(2)),
                                          static_cast<e2::TimeToWait>(pick(e2::kTimeToWaitCount))};
    }
    return a;
  }

  e2::Cause cause() { return {static_cast<e2::CauseKind>(pick(4)), text()}; }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace oran::testing
