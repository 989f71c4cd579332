#include "oran/sim/runtime.hpp"

#include "oran/common/error.hpp"

namespace oran::sim {

RanRuntime::RanRuntime(SimConfig config, const Connector& connect) : sim_(std::move(config)) {
  for (const auto& node : sim_.nodes()) {
    e2_.push_back(std::make_unique<E2NodeAgent>(sim_, node.node_id, connect(node.node_id, Interface::e2)));
    o1_.push_back(std::make_unique<O1Agent>(sim_, node.node_id, connect(node.node_id, Interface::o1)));
  }
}

void RanRuntime::start() {
  for (auto& a : e2_) a->start();
  for (auto& a : o1_) a->start();
}

void RanRuntime::advance() {
  for (const auto& event : sim_.tick()) agent(event.node_id).on_a3(event);
  for (auto& a : e2_) a->on_tick();
  for (auto& a : o1_) a->on_tick();
}

std::size_t RanRuntime::poll() {
  std::size_t n = 0;
  for (auto& a : e2_) n += a->poll();
  for (auto& a : o1_) n += a->poll();
  return n;
}

E2NodeAgent& RanRuntime::agent(const std::string& node_id) {
  for (auto& a : e2_) {
    if (a->node_id() == node_id) return *a;
  }
  fail(Errc::unknown_node, node_id);
}

O1Agent& RanRuntime::o1(const std::string& node_id) {
  for (auto& a : o1_) {
    if (a->node_id() == node_id) return *a;
  }
  fail(Errc::unknown_node, node_id);
}

std::uint64_t RanRuntime::state_hash() const {
  Fnv1a h;
  h.add_u64(sim_.state_hash());
  for (const auto& a : e2_) a->hash_into(h);
  return h.digest();
}

}  // namespace oran::sim
