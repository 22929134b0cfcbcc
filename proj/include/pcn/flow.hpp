#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace pcn::flow {

using Amount = std::int64_t;
using NodeId = std::size_t;

struct Arc {
  NodeId src = 0;
  NodeId dst = 0;
  Amount capacity = 0;
  Amount cost = 0;
};

/// Directed integer network. supply[v] > 0 means v produces flow, < 0 means
/// v consumes it; an empty supply vector means every node is balanced.
struct FlowNetwork {
  std::size_t node_count = 0;
  std::vector<Arc> arcs;
  std::vector<Amount> supply;

  NodeId add_node() { return node_count++; }
  std::size_t add_arc(NodeId src, NodeId dst, Amount capacity, Amount cost = 0);
  Amount supply_of(NodeId v) const { return supply.empty() ? 0 : supply.at(v); }
  /// Throws std::invalid_argument on negative capacities, dangling arcs or
  /// unbalanced supplies.
  void validate() const;
};

/// Per-arc flow values aligned with FlowNetwork::arcs.
using Flow = std::vector<Amount>;

struct MaxFlowResult {
  Amount value = 0;
  Flow flow;
  /// Source side of the canonical minimum cut: nodes reachable from the
  /// source in the final residual graph.
  std::vector<bool> source_side;
};

/// Dinic blocking-flow max flow. Costs and supplies are ignored.
MaxFlowResult max_flow(const FlowNetwork& net, NodeId source, NodeId sink);

/// Capacity of the arcs leaving the given node set.
Amount cut_capacity(const FlowNetwork& net, const std::vector<bool>& source_side);

struct TransshipmentResult {
  bool feasible = false;
  Flow flow;  // meaningful when feasible
  /// When infeasible: a node set X whose supply exceeds the capacity leaving
  /// it, i.e. supply(X) > cap(delta+(X)).
  std::vector<bool> certificate;
};

/// Finds a flow meeting all supplies and demands via a super-source /
/// super-sink max flow.
TransshipmentResult feasible_transshipment(const FlowNetwork& net);

/// Checks capacity bounds and conservation against the declared supplies.
bool is_feasible_flow(const FlowNetwork& net, const Flow& flow);

Amount flow_cost(const FlowNetwork& net, const Flow& flow);

/// Minimum-cost circulation (supplies must be empty or zero) by cycle
/// canceling with Bellman-Ford negative-cycle detection, starting from the
/// zero circulation.
Flow min_cost_circulation(const FlowNetwork& net);

/// Improves a feasible flow to minimum cost by canceling negative residual
/// cycles. The supplies it satisfies are preserved.
Flow cancel_negative_cycles(const FlowNetwork& net, Flow flow);

/// Minimum-cost flow meeting the supplies, or nullopt if none exists.
std::optional<Flow> min_cost_transshipment(const FlowNetwork& net);

/// True iff the residual graph of flow has a negative-cost directed cycle.
bool has_negative_residual_cycle(const FlowNetwork& net, const Flow& flow);

}  // namespace pcn::flow
