#include "pcn/flow.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace pcn::flow {

std::size_t FlowNetwork::add_arc(NodeId src, NodeId dst, Amount capacity, Amount cost) {
  arcs.push_back({src, dst, capacity, cost});
  return arcs.size() - 1;
}

void FlowNetwork::validate() const {
  for (const auto& a : arcs) {
    if (a.src >= node_count || a.dst >= node_count) throw std::invalid_argument("arc references unknown node");
    if (a.capacity < 0) throw std::invalid_argument("arc capacity must be nonnegative");
  }
  if (!supply.empty()) {
    if (supply.size() != node_count) throw std::invalid_argument("supply vector has wrong length");
    if (std::accumulate(supply.begin(), supply.end(), Amount{0}) != 0) {
      throw std::invalid_argument("supplies must sum to zero");
    }
  }
}

namespace {

// Residual graph with paired edges: edge i and i ^ 1 are reverses.
class Residual {
 public:
  struct Edge {
    NodeId to;
    Amount cap;
    Amount cost;
  };

  explicit Residual(std::size_t n) : adj_(n) {}

  void add(NodeId u, NodeId v, Amount cap, Amount cost = 0) {
    adj_[u].push_back(edges_.size());
    edges_.push_back({v, cap, cost});
    adj_[v].push_back(edges_.size());
    edges_.push_back({u, 0, -cost});
  }

  std::size_t size() const { return adj_.size(); }
  std::vector<Edge>& edges() { return edges_; }
  const std::vector<std::size_t>& out(NodeId u) const { return adj_[u]; }

  Amount dinic(NodeId s, NodeId t) {
    Amount total = 0;
    while (bfs(s, t)) {
      it_.assign(size(), 0);
      while (Amount pushed = dfs(s, t, std::numeric_limits<Amount>::max())) total += pushed;
    }
    return total;
  }

  std::vector<bool> reachable(NodeId s) const {
    std::vector<bool> seen(size(), false);
    std::vector<NodeId> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      for (auto id : adj_[u]) {
        const auto& e = edges_[id];
        if (e.cap > 0 && !seen[e.to]) {
          seen[e.to] = true;
          stack.push_back(e.to);
        }
      }
    }
    return seen;
  }

 private:
  bool bfs(NodeId s, NodeId t) {
    level_.assign(size(), -1);
    std::queue<NodeId> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      auto u = q.front();
      q.pop();
      for (auto id : adj_[u]) {
        const auto& e = edges_[id];
        if (e.cap > 0 && level_[e.to] < 0) {
          level_[e.to] = level_[u] + 1;
          q.push(e.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  Amount dfs(NodeId u, NodeId t, Amount limit) {
    if (u == t) return limit;
    for (auto& i = it_[u]; i < adj_[u].size(); ++i) {
      auto id = adj_[u][i];
      auto& e = edges_[id];
      if (e.cap <= 0 || level_[e.to] != level_[u] + 1) continue;
      if (Amount got = dfs(e.to, t, std::min(limit, e.cap))) {
        e.cap -= got;
        edges_[id ^ 1].cap += got;
        return got;
      }
    }
    return 0;
  }

  std::vector<std::vector<std::size_t>> adj_;
  std::vector<Edge> edges_;
  std::vector<int> level_;
  std::vector<std::size_t> it_;
};

}  // namespace

MaxFlowResult max_flow(const FlowNetwork& net, NodeId source, NodeId sink) {
  net.validate();
  if (source >= net.node_count || sink >= net.node_count) throw std::invalid_argument("source or sink absent");
  if (source == sink) throw std::invalid_argument("source and sink must differ");
  Residual r(net.node_count);
  for (const auto& a : net.arcs) r.add(a.src, a.dst, a.capacity);
  MaxFlowResult out;
  out.value = r.dinic(source, sink);
  out.flow.resize(net.arcs.size());
  for (std::size_t i = 0; i < net.arcs.size(); ++i) out.flow[i] = r.edges()[2 * i + 1].cap;
  out.source_side = r.reachable(source);
  return out;
}

Amount cut_capacity(const FlowNetwork& net, const std::vector<bool>& source_side) {
  Amount cap = 0;
  for (const auto& a : net.arcs) {
    if (source_side.at(a.src) && !source_side.at(a.dst)) cap += a.capacity;
  }
  return cap;
}

TransshipmentResult feasible_transshipment(const FlowNetwork& net) {
  net.validate();
  const auto n = net.node_count;
  Residual r(n + 2);
  const NodeId s = n;
  const NodeId t = n + 1;
  for (const auto& a : net.arcs) r.add(a.src, a.dst, a.capacity);
  Amount required = 0;
  for (NodeId v = 0; v < n; ++v) {
    auto b = net.supply_of(v);
    if (b > 0) {
      r.add(s, v, b);
      required += b;
    } else if (b < 0) {
      r.add(v, t, -b);
    }
  }
  TransshipmentResult out;
  const Amount value = r.dinic(s, t);
  out.feasible = value == required;
  if (out.feasible) {
    out.flow.resize(net.arcs.size());
    for (std::size_t i = 0; i < net.arcs.size(); ++i) out.flow[i] = r.edges()[2 * i + 1].cap;
  } else {
    auto side = r.reachable(s);
    out.certificate.assign(side.begin(), side.begin() + static_cast<std::ptrdiff_t>(n));
  }
  return out;
}

bool is_feasible_flow(const FlowNetwork& net, const Flow& flow) {
  if (flow.size() != net.arcs.size()) return false;
  std::vector<Amount> balance(net.node_count, 0);
  for (std::size_t i = 0; i < net.arcs.size(); ++i) {
    const auto& a = net.arcs[i];
    if (flow[i] < 0 || flow[i] > a.capacity) return false;
    balance[a.src] += flow[i];
    balance[a.dst] -= flow[i];
  }
  for (NodeId v = 0; v < net.node_count; ++v) {
    if (balance[v] != net.supply_of(v)) return false;
  }
  return true;
}

Amount flow_cost(const FlowNetwork& net, const Flow& flow) {
  Amount c = 0;
  for (std::size_t i = 0; i < net.arcs.size(); ++i) c += net.arcs[i].cost * flow.at(i);
  return c;
}

namespace {

struct ResidualArc {
  NodeId from;
  NodeId to;
  std::size_t arc;
  bool forward;
  Amount cost;
};

std::vector<ResidualArc> residual_arcs(const FlowNetwork& net, const Flow& flow) {
  std::vector<ResidualArc> out;
  for (std::size_t i = 0; i < net.arcs.size(); ++i) {
    const auto& a = net.arcs[i];
    if (flow[i] < a.capacity) out.push_back({a.src, a.dst, i, true, a.cost});
    if (flow[i] > 0) out.push_back({a.dst, a.src, i, false, -a.cost});
  }
  return out;
}

// Bellman-Ford from a virtual root joined to every node with cost 0. Returns
// the residual arcs of one negative cycle, or an empty vector.
std::vector<ResidualArc> find_negative_cycle(std::size_t n, const std::vector<ResidualArc>& arcs) {
  std::vector<Amount> dist(n, 0);
  std::vector<std::ptrdiff_t> pred(n, -1);
  std::ptrdiff_t relaxed = -1;
  for (std::size_t round = 0; round < n; ++round) {
    relaxed = -1;
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      const auto& a = arcs[i];
      if (dist[a.from] + a.cost < dist[a.to]) {
        dist[a.to] = dist[a.from] + a.cost;
        pred[a.to] = static_cast<std::ptrdiff_t>(i);
        relaxed = static_cast<std::ptrdiff_t>(a.to);
      }
    }
    if (relaxed < 0) return {};
  }
  // A relaxation in round n means a negative cycle; walk back n steps to land on it.
  auto v = static_cast<NodeId>(relaxed);
  for (std::size_t i = 0; i < n; ++i) {
    if (pred[v] < 0) throw std::logic_error("broken predecessor chain in negative-cycle search");
    v = arcs[static_cast<std::size_t>(pred[v])].from;
  }
  std::vector<ResidualArc> cycle;
  auto u = v;
  do {
    const auto& a = arcs[static_cast<std::size_t>(pred[u])];
    cycle.push_back(a);
    u = a.from;
  } while (u != v);
  std::reverse(cycle.begin(), cycle.end());
  return cycle;
}

}  // namespace

Flow cancel_negative_cycles(const FlowNetwork& net, Flow flow) {
  net.validate();
  if (flow.size() != net.arcs.size()) throw std::invalid_argument("flow size mismatch");
  while (true) {
    auto cycle = find_negative_cycle(net.node_count, residual_arcs(net, flow));
    if (cycle.empty()) return flow;
    Amount push = std::numeric_limits<Amount>::max();
    for (const auto& a : cycle) {
      auto room = a.forward ? net.arcs[a.arc].capacity - flow[a.arc] : flow[a.arc];
      push = std::min(push, room);
    }
    for (const auto& a : cycle) flow[a.arc] += a.forward ? push : -push;
  }
}

Flow min_cost_circulation(const FlowNetwork& net) {
  for (auto b : net.supply) {
    if (b != 0) throw std::invalid_argument("circulation problems take no supplies");
  }
  return cancel_negative_cycles(net, Flow(net.arcs.size(), 0));
}

std::optional<Flow> min_cost_transshipment(const FlowNetwork& net) {
  auto start = feasible_transshipment(net);
  if (!start.feasible) return std::nullopt;
  return cancel_negative_cycles(net, std::move(start.flow));
}

bool has_negative_residual_cycle(const FlowNetwork& net, const Flow& flow) {
  return !find_negative_cycle(net.node_count, residual_arcs(net, flow)).empty();
}

}  // namespace pcn::flow
