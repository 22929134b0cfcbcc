#pragma once

// Shared test networks and exhaustive oracles. Nothing here calls into the
// algorithms under test.

#include <cstdint>
#include <vector>

#include "pcn/network.hpp"
#include "pcn/random.hpp"

namespace pcn::testing {

/// x, y, z with e=(x,y):3, f=(y,z):7, g=(x,z):11.
inline ChannelGraph triangle() {
  NetworkDescription d;
  d.nodes = {"x", "y", "z"};
  d.channels = {{{"x", "y"}, 3, "e"}, {{"y", "z"}, 7, "f"}, {{"x", "z"}, 11, "g"}};
  return ChannelGraph::build(d);
}

/// Alice - Bob (10), Bob - Carol (11).
inline ChannelGraph alice_bob_carol() {
  NetworkDescription d;
  d.nodes = {"alice", "bob", "carol"};
  d.channels = {{{"alice", "bob"}, 10, ""}, {{"bob", "carol"}, 11, ""}};
  return ChannelGraph::build(d);
}

/// Triangle state for parameter t: (e_x, f_y, g_x) = (t, 3 + t, 5 - t).
inline LiquidityState triangle_state(Coins t) {
  std::vector<Coins> first{t, 3 + t, 5 - t};
  return LiquidityState::from_first_endpoint(triangle(), first);
}

/// Random connected 2-party graph: random spanning tree plus extra edges,
/// capacities uniform in [1, max_cap]. No parallel channels.
inline ChannelGraph random_connected(Rng& rng, std::size_t n, std::size_t m, Coins max_cap) {
  std::vector<std::pair<std::vector<NodeIndex>, Coins>> ch;
  std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
  for (NodeIndex v = 1; v < n; ++v) {
    auto u = static_cast<NodeIndex>(rng.below(v));
    used[u][v] = used[v][u] = true;
    ch.push_back({{u, v}, rng.between(1, max_cap)});
  }
  const std::size_t max_edges = n * (n - 1) / 2;
  while (ch.size() < m && ch.size() < max_edges) {
    auto u = static_cast<NodeIndex>(rng.below(n));
    auto v = static_cast<NodeIndex>(rng.below(n));
    if (u == v || used[u][v]) continue;
    used[u][v] = used[v][u] = true;
    ch.push_back({{u, v}, rng.between(1, max_cap)});
  }
  return ChannelGraph::from_indices(n, ch);
}

/// Random hypergraph with channel sizes in [2, max_k].
inline ChannelGraph random_hypergraph(Rng& rng, std::size_t n, std::size_t m, std::size_t max_k, Coins max_cap) {
  std::vector<std::pair<std::vector<NodeIndex>, Coins>> ch;
  for (std::size_t i = 0; i < m; ++i) {
    auto k = static_cast<std::size_t>(rng.between(2, static_cast<std::int64_t>(std::min(max_k, n))));
    std::vector<NodeIndex> members;
    while (members.size() < k) {
      auto v = static_cast<NodeIndex>(rng.below(n));
      bool dup = false;
      for (auto w : members) dup = dup || w == v;
      if (!dup) members.push_back(v);
    }
    ch.push_back({members, rng.between(1, max_cap)});
  }
  return ChannelGraph::from_indices(n, ch);
}

/// All wealth vectors reachable from some liquidity state, by direct
/// odometer over first-endpoint coordinates (2-party graphs only).
inline std::vector<std::vector<Coins>> all_states_first(const ChannelGraph& g) {
  std::vector<std::vector<Coins>> out;
  std::vector<Coins> x(g.channel_count(), 0);
  while (true) {
    out.push_back(x);
    std::size_t e = 0;
    while (e < x.size() && x[e] == g.channel(e).capacity) x[e++] = 0;
    if (e == x.size()) break;
    ++x[e];
  }
  return out;
}

inline std::vector<Coins> wealth_from_first(const ChannelGraph& g, const std::vector<Coins>& first) {
  std::vector<Coins> w(g.node_count(), 0);
  for (std::size_t e = 0; e < g.channel_count(); ++e) {
    w[g.channel(e).endpoints[0]] += first[e];
    w[g.channel(e).endpoints[1]] += g.channel(e).capacity - first[e];
  }
  return w;
}

}  // namespace pcn::testing
