#include "oran/ric/verifier.hpp"

#include <cmath>

namespace oran::ric {

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::improved: return "improved";
    case Verdict::degraded: return "degraded";
    case Verdict::neutral: return "neutral";
    case Verdict::insufficient_data: return "insufficient_data";
  }
  return "?";
}

VerifyResult verify(const std::vector<TimedValue>& samples, TimeMs t, bool higher_is_better,
                    const VerifyParams& params) {
  VerifyResult r;
  double sum_before = 0.0, sum_after = 0.0;
  for (const auto& s : samples) {
    if (s.t >= t - params.window_ms && s.t < t) {
      sum_before += s.value;
      ++r.before_samples;
    } else if (s.t > t && s.t <= t + params.window_ms) {
      sum_after += s.value;
      ++r.after_samples;
    }
  }
  if (r.before_samples < params.min_samples || r.after_samples < params.min_samples) {
    r.verdict = Verdict::insufficient_data;
    return r;
  }
  r.before = sum_before / static_cast<double>(r.before_samples);
  r.after = sum_after / static_cast<double>(r.after_samples);
  if (r.before == 0.0) {
    r.change = r.after == 0.0 ? 0.0 : std::copysign(INFINITY, r.after);
  } else {
    r.change = (r.after - r.before) / std::fabs(r.before);
  }
  const double gain = higher_is_better ? r.change : -r.change;
  if (gain > params.threshold) {
    r.verdict = Verdict::improved;
  } else if (gain < -params.threshold) {
    r.verdict = Verdict::degraded;
  } else {
    r.verdict = Verdict::neutral;
  }
  return r;
}

bool higher_is_better(std::string_view metric) {
  using namespace e2sm::metric;
  return !(metric == buffer_bytes || metric == latency_proxy_ms || metric == pdcp_queue_bytes ||
           metric == prb_requested);
}

void KpmHistory::add(const std::string& node, const e2sm::KpmRecord& record) {
  auto& q = data_[{node, record.scope, record.metric}];
  q.push_back({record.timestamp, record.value});
  while (!q.empty() && q.front().t < record.timestamp - retention_ms_) q.pop_front();
}

std::vector<TimedValue> KpmHistory::series(const std::string& node, const e2sm::KpmScope& scope,
                                           const std::string& metric) const {
  auto it = data_.find({node, scope, metric});
  if (it == data_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

}  // namespace oran::ric
