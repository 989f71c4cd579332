#include "oran/common/slicing.hpp"

#include <algorithm>

namespace oran {

std::string_view to_string(SliceKind kind) noexcept {
  switch (kind) {
    case SliceKind::urllc: return "urllc";
    case SliceKind::embb: return "embb";
    case SliceKind::mmtc: return "mmtc";
  }
  return "?";
}

bool parse_slice_kind(std::string_view text, SliceKind& out) noexcept {
  for (auto k : {SliceKind::urllc, SliceKind::embb, SliceKind::mmtc}) {
    if (to_string(k) == text) {
      out = k;
      return true;
    }
  }
  return false;
}

std::vector<double> priority_weights(const SlicingObjectives& obj, std::size_t slices) {
  std::vector<double> w(slices, 1.0);
  const auto n = static_cast<double>(obj.priority.size());
  for (std::size_t rank = 0; rank < obj.priority.size(); ++rank) {
    const auto id = obj.priority[rank];
    if (id < slices) w[id] = std::max(1.0, n - static_cast<double>(rank));
  }
  return w;
}

double shortfall_cost(const std::vector<double>& weights, const std::vector<std::uint32_t>& demand,
                      const std::vector<std::uint32_t>& grant) {
  double cost = 0.0;
  for (std::size_t i = 0; i < demand.size(); ++i) {
    const auto g = i < grant.size() ? grant[i] : 0;
    if (demand[i] > g) cost += weights[i] * static_cast<double>(demand[i] - g);
  }
  return cost;
}

std::uint64_t partition_count(std::uint32_t capacity, std::size_t slices) {
  if (slices == 0) return capacity == 0 ? 1 : 0;
  // C(capacity + slices - 1, slices - 1), built up to stay exact
  std::uint64_t c = 1;
  for (std::uint64_t k = 1; k < slices; ++k) c = c * (capacity + k) / k;
  return c;
}

SplitSearch optimal_split(const std::vector<std::uint32_t>& demand, std::uint32_t capacity,
                          const std::vector<double>& weights) {
  SplitSearch best;
  std::uint64_t total = 0;
  for (auto d : demand) total += d;
  if (total <= capacity) {
    best.split = demand;
    return best;
  }
  const auto n = demand.size();
  if (n == 0) return best;
  std::vector<std::uint32_t> g(n, 0);
  bool have = false;
  // enumerate compositions of capacity in lexicographic order
  auto rec = [&](auto&& self, std::size_t i, std::uint32_t left) -> void {
    if (i + 1 == n) {
      g[i] = left;
      const double c = shortfall_cost(weights, demand, g);
      ++best.evaluated;
      if (!have || c < best.cost) {
        best.cost = c;
        best.split = g;
        have = true;
      }
      return;
    }
    for (std::uint32_t x = 0; x <= left; ++x) {
      g[i] = x;
      self(self, i + 1, left - x);
    }
  };
  rec(rec, 0, capacity);
  return best;
}

}  // namespace oran
