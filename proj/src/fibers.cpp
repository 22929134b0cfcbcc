#include "pcn/fibers.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "pcn/feasibility.hpp"

namespace pcn {

namespace {

void require_two_party(const ChannelGraph& g, const char* what) {
  if (!g.all_two_party()) throw std::invalid_argument(std::string(what) + " needs a 2-party graph");
}

struct Forest {
  std::vector<bool> in_tree;                 // per channel
  std::vector<std::size_t> order;            // BFS order of nodes
  std::vector<std::optional<std::size_t>> parent_edge;
  std::vector<NodeIndex> parent;
  std::vector<std::size_t> depth;
};

Forest spanning_forest(const ChannelGraph& g) {
  const auto n = g.node_count();
  Forest f;
  f.in_tree.assign(g.channel_count(), false);
  f.parent_edge.assign(n, std::nullopt);
  f.parent.resize(n);
  std::iota(f.parent.begin(), f.parent.end(), NodeIndex{0});
  f.depth.assign(n, 0);
  std::vector<bool> seen(n, false);
  for (NodeIndex root = 0; root < n; ++root) {
    if (seen[root]) continue;
    seen[root] = true;
    std::queue<NodeIndex> q;
    q.push(root);
    while (!q.empty()) {
      auto u = q.front();
      q.pop();
      f.order.push_back(u);
      for (auto e : g.incident(u)) {
        for (auto v : g.channel(e).endpoints) {
          if (seen[v]) continue;
          seen[v] = true;
          f.in_tree[e] = true;
          f.parent_edge[v] = e;
          f.parent[v] = u;
          f.depth[v] = f.depth[u] + 1;
          q.push(v);
        }
      }
    }
  }
  return f;
}

// Product of (capacity + 1) over the listed channels is at most limit.
bool within_bound(const ChannelGraph& g, const std::vector<std::size_t>& channels, std::uint64_t limit) {
  std::uint64_t space = 1;
  for (auto e : channels) {
    const auto width = static_cast<std::uint64_t>(g.channel(e).capacity) + 1;
    if (space > limit / width) return false;
    space *= width;
  }
  return space <= limit;
}

int direction(const ChannelGraph& g, std::size_t e, NodeIndex from) {
  return g.channel(e).endpoints[0] == from ? 1 : -1;
}

}  // namespace

bool Circulation::is_strict() const {
  for (std::size_t e = 0; e < forward.size(); ++e) {
    if (forward[e] != 0 && backward[e] != 0) return false;
  }
  return true;
}

std::vector<Coins> Circulation::net() const {
  std::vector<Coins> d(forward.size());
  for (std::size_t e = 0; e < d.size(); ++e) d[e] = forward[e] - backward[e];
  return d;
}

Circulation Circulation::from_net(const std::vector<Coins>& net) {
  auto c = zero(net.size());
  for (std::size_t e = 0; e < net.size(); ++e) {
    if (net[e] > 0) c.forward[e] = net[e];
    else c.backward[e] = -net[e];
  }
  return c;
}

void validate_circulation(const ChannelGraph& g, const LiquidityState& lam, const Circulation& f) {
  require_two_party(g, "circulations");
  const auto m = g.channel_count();
  if (f.forward.size() != m || f.backward.size() != m) {
    throw std::invalid_argument("circulation size does not match the channel count");
  }
  std::vector<Coins> excess(g.node_count(), 0);
  for (std::size_t e = 0; e < m; ++e) {
    if (f.forward[e] < 0 || f.backward[e] < 0) throw std::invalid_argument("circulation has a negative arc value");
    if (f.forward[e] > lam.at(e, 0) || f.backward[e] > lam.at(e, 1)) {
      throw std::invalid_argument("circulation exceeds liquidity on channel " + g.channel(e).id);
    }
    const auto& ends = g.channel(e).endpoints;
    excess[ends[0]] += f.backward[e] - f.forward[e];
    excess[ends[1]] += f.forward[e] - f.backward[e];
  }
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    if (excess[v] != 0) throw std::invalid_argument("circulation violates conservation at " + g.node_id(v));
  }
}

LiquidityState apply_circulation(const ChannelGraph& g, const LiquidityState& lam, const Circulation& f) {
  validate_circulation(g, lam, f);
  auto values = lam.values();
  for (std::size_t e = 0; e < g.channel_count(); ++e) {
    values[e][0] += f.backward[e] - f.forward[e];
    values[e][1] += f.forward[e] - f.backward[e];
  }
  LiquidityState out(g, std::move(values));
  if (!(wealth_of(g, out) == wealth_of(g, lam))) throw std::logic_error("circulation changed the wealth vector");
  return out;
}

Circulation circulation_between(const ChannelGraph& g, const LiquidityState& from, const LiquidityState& to) {
  require_two_party(g, "circulations");
  if (!(wealth_of(g, from) == wealth_of(g, to))) throw std::invalid_argument("states have different wealth");
  std::vector<Coins> net(g.channel_count());
  for (std::size_t e = 0; e < net.size(); ++e) net[e] = from.at(e, 0) - to.at(e, 0);
  return Circulation::from_net(net);
}

std::vector<LiquidityState> fiber_enumerate(const ChannelGraph& g, const WealthVector& omega,
                                            std::uint64_t max_states) {
  if (omega.size() != g.node_count()) throw std::invalid_argument("wealth vector size does not match the graph");
  std::vector<LiquidityState> out;
  if (omega.total() != g.total_capacity()) return out;

  if (!g.all_two_party()) {
    std::uint64_t volume = 0;
    try {
      volume = state_space_volume(g);
    } catch (const std::overflow_error&) {
      volume = std::numeric_limits<std::uint64_t>::max();
    }
    if (volume > max_states) throw std::length_error("state space exceeds the enumeration bound");
    for_each_state(g, [&](const std::vector<std::vector<Coins>>& values) {
      std::vector<Coins> w(g.node_count(), 0);
      for (std::size_t e = 0; e < values.size(); ++e) {
        for (std::size_t i = 0; i < values[e].size(); ++i) w[g.channel(e).endpoints[i]] += values[e][i];
      }
      if (w == omega.values()) out.emplace_back(g, values);
      return true;
    });
    return out;
  }

  // Free coordinates live on the non-tree channels; the tree coordinates
  // follow by peeling leaves.
  const auto forest = spanning_forest(g);
  std::vector<std::size_t> free;
  for (std::size_t e = 0; e < g.channel_count(); ++e) {
    if (!forest.in_tree[e]) free.push_back(e);
  }
  if (!within_bound(g, free, max_states)) throw std::length_error("fiber search space exceeds the enumeration bound");

  std::vector<Coins> first(g.channel_count(), 0);
  std::vector<Coins> rest(g.node_count());
  while (true) {
    for (NodeIndex v = 0; v < g.node_count(); ++v) rest[v] = omega[v];
    for (auto e : free) {
      const auto& ends = g.channel(e).endpoints;
      rest[ends[0]] -= first[e];
      rest[ends[1]] -= g.channel(e).capacity - first[e];
    }
    bool ok = true;
    for (auto it = forest.order.rbegin(); ok && it != forest.order.rend(); ++it) {
      const auto v = *it;
      if (!forest.parent_edge[v]) {
        ok = rest[v] == 0;
        continue;
      }
      const auto e = *forest.parent_edge[v];
      const auto cap = g.channel(e).capacity;
      if (rest[v] < 0 || rest[v] > cap) {
        ok = false;
        break;
      }
      first[e] = g.channel(e).endpoints[0] == v ? rest[v] : cap - rest[v];
      rest[forest.parent[v]] -= cap - rest[v];
    }
    if (ok) out.push_back(LiquidityState::from_first_endpoint(g, first));

    std::size_t i = 0;
    while (i < free.size() && first[free[i]] == g.channel(free[i]).capacity) first[free[i++]] = 0;
    if (i == free.size()) break;
    ++first[free[i]];
  }
  std::sort(out.begin(), out.end(), [](const LiquidityState& a, const LiquidityState& b) {
    return a.first_endpoint_coordinates() < b.first_endpoint_coordinates();
  });
  return out;
}

std::vector<Circulation> strict_circulations_enumerate(const ChannelGraph& g, const LiquidityState& lam,
                                                       std::uint64_t max_states) {
  require_two_party(g, "circulations");
  const auto m = g.channel_count();
  std::vector<std::size_t> all(m);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (!within_bound(g, all, max_states)) throw std::length_error("circulation search space exceeds the enumeration bound");

  // Net flow per channel ranges over [-lambda(e, second), lambda(e, first)].
  std::vector<Coins> net(m);
  for (std::size_t e = 0; e < m; ++e) net[e] = -lam.at(e, 1);
  std::vector<Circulation> out;
  std::vector<Coins> excess(g.node_count());
  while (true) {
    std::fill(excess.begin(), excess.end(), 0);
    for (std::size_t e = 0; e < m; ++e) {
      excess[g.channel(e).endpoints[0]] -= net[e];
      excess[g.channel(e).endpoints[1]] += net[e];
    }
    if (std::all_of(excess.begin(), excess.end(), [](Coins x) { return x == 0; })) {
      out.push_back(Circulation::from_net(net));
    }
    std::size_t e = m;
    while (e > 0) {
      --e;
      if (net[e] < lam.at(e, 0)) {
        ++net[e];
        break;
      }
      net[e] = -lam.at(e, 1);
      if (e == 0) return out;
    }
    if (m == 0) return out;
  }
}

std::size_t component_count(const ChannelGraph& g) {
  std::vector<NodeIndex> parent(g.node_count());
  std::iota(parent.begin(), parent.end(), NodeIndex{0});
  auto find = [&](NodeIndex v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::size_t components = g.node_count();
  for (const auto& c : g.channels()) {
    for (std::size_t i = 1; i < c.endpoints.size(); ++i) {
      auto a = find(c.endpoints[0]);
      auto b = find(c.endpoints[i]);
      if (a != b) {
        parent[a] = b;
        --components;
      }
    }
  }
  return components;
}

std::size_t circuit_rank(const ChannelGraph& g) {
  require_two_party(g, "circuit rank");
  return g.channel_count() + component_count(g) - g.node_count();
}

CycleBasis fundamental_cycles(const ChannelGraph& g) {
  require_two_party(g, "cycle bases");
  const auto forest = spanning_forest(g);
  CycleBasis basis;
  for (std::size_t e = 0; e < g.channel_count(); ++e) {
    if (forest.in_tree[e]) {
      basis.tree.push_back(e);
      continue;
    }
    // a -> b along e, then b back to a through the tree.
    const auto a = g.channel(e).endpoints[0];
    const auto b = g.channel(e).endpoints[1];
    std::vector<CycleBasis::Step> up_from_b;
    std::vector<CycleBasis::Step> up_from_a;
    auto x = b;
    auto y = a;
    while (x != y) {
      if (forest.depth[x] >= forest.depth[y]) {
        auto pe = *forest.parent_edge[x];
        up_from_b.push_back({pe, direction(g, pe, x)});
        x = forest.parent[x];
      } else {
        auto pe = *forest.parent_edge[y];
        up_from_a.push_back({pe, -direction(g, pe, y)});
        y = forest.parent[y];
      }
    }
    std::vector<CycleBasis::Step> cycle{{e, 1}};
    cycle.insert(cycle.end(), up_from_b.begin(), up_from_b.end());
    cycle.insert(cycle.end(), up_from_a.rbegin(), up_from_a.rend());
    basis.cycles.push_back(std::move(cycle));
  }
  return basis;
}

}  // namespace pcn
