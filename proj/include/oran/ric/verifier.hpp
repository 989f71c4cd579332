#pragma once

#include <deque>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "oran/e2sm/kpm.hpp"

namespace oran::ric {

enum class Verdict { improved, degraded, neutral, insufficient_data };
std::string_view to_string(Verdict v) noexcept;

struct TimedValue {
  TimeMs t = 0;
  double value = 0.0;
};

struct VerifyParams {
  TimeMs window_ms = 2000;
  double threshold = 0.05;  // relative change
  std::size_t min_samples = 3;
};

struct VerifyResult {
  Verdict verdict = Verdict::neutral;
  double before = 0.0;
  double after = 0.0;
  double change = 0.0;  // relative, signed
  std::size_t before_samples = 0;
  std::size_t after_samples = 0;
};

/// Compares the mean over [t - V, t) with the mean over (t, t + V].
/// `higher_is_better` orients the verdict.
VerifyResult verify(const std::vector<TimedValue>& samples, TimeMs t, bool higher_is_better,
                    const VerifyParams& params);

/// Direction of improvement for a catalog metric.
bool higher_is_better(std::string_view metric);

/// Per-(node, scope, metric) KPM history with a bounded retention.
class KpmHistory {
 public:
  explicit KpmHistory(TimeMs retention_ms = 10000) : retention_ms_(retention_ms) {}

  void add(const std::string& node, const e2sm::KpmRecord& record);
  std::vector<TimedValue> series(const std::string& node, const e2sm::KpmScope& scope,
                                 const std::string& metric) const;

 private:
  using Key = std::tuple<std::string, e2sm::KpmScope, std::string>;
  TimeMs retention_ms_;
  std::map<Key, std::deque<TimedValue>> data_;
};

/// Verdict on one metric after one acknowledged control.
struct VerificationRecord {
  std::uint64_t ticket = 0;
  std::string xapp;
  std::string node;
  e2sm::KpmScope scope;
  std::string metric;
  TimeMs control_at = 0;
  VerifyResult result;
};

}  // namespace oran::ric
