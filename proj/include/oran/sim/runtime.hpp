#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "oran/sim/e2_agent.hpp"
#include "oran/sim/o1_agent.hpp"
#include "oran/sim/ran_sim.hpp"

namespace oran::sim {

enum class Interface { e2, o1 };

/// Opens the connection a node uses for one interface.
using Connector = std::function<std::unique_ptr<transport::Connection>(const std::string& node_id, Interface iface)>;

/// The simulated RAN with one E2 and one O1 agent per node.
class RanRuntime {
 public:
  RanRuntime(SimConfig config, const Connector& connect);

  /// Sends E2 setup requests and first heartbeats.
  void start();
  /// One TTI: sim tick, A3 dispatch, agent timers in node order.
  void advance();
  /// Drains inbound messages of every agent. Returns the number handled.
  std::size_t poll();

  RanSim& sim() noexcept { return sim_; }
  const RanSim& sim() const noexcept { return sim_; }
  std::vector<std::unique_ptr<E2NodeAgent>>& agents() noexcept { return e2_; }
  E2NodeAgent& agent(const std::string& node_id);
  O1Agent& o1(const std::string& node_id);

  /// Sim state plus agent protocol state.
  std::uint64_t state_hash() const;

 private:
  RanSim sim_;
  std::vector<std::unique_ptr<E2NodeAgent>> e2_;
  std::vector<std::unique_ptr<O1Agent>> o1_;
};

}  // namespace oran::sim
