#pragma once

#include <cstdint>
#include <vector>

#include "pcn/network.hpp"

namespace pcn {

/// Flow on the liquidity network of a 2-party graph. forward[e] runs from the
/// first endpoint of channel e to the second, backward[e] the other way.
struct Circulation {
  std::vector<Coins> forward;
  std::vector<Coins> backward;

  static Circulation zero(std::size_t channels) {
    return {std::vector<Coins>(channels, 0), std::vector<Coins>(channels, 0)};
  }
  /// Strict: no channel carries flow in both directions.
  bool is_strict() const;
  /// Net flow per channel, first endpoint to second.
  std::vector<Coins> net() const;
  /// Strict circulation with the given net flow per channel.
  static Circulation from_net(const std::vector<Coins>& net);

  bool operator==(const Circulation&) const = default;
};

/// Throws std::invalid_argument when f exceeds the arc capacities of
/// L(g, lam) or violates conservation at some node.
void validate_circulation(const ChannelGraph& g, const LiquidityState& lam, const Circulation& f);

/// lambda'(e, u) = lambda(e, u) + f(v, u) - f(u, v). The result is checked to
/// be a valid state with the same wealth.
LiquidityState apply_circulation(const ChannelGraph& g, const LiquidityState& lam, const Circulation& f);

/// Circulation taking `from` to `to`; both must have the same wealth.
Circulation circulation_between(const ChannelGraph& g, const LiquidityState& from, const LiquidityState& to);

/// Every liquidity state projecting to omega, lexicographic in the per-channel
/// coordinates. Throws std::length_error when the state space exceeds
/// max_states.
std::vector<LiquidityState> fiber_enumerate(const ChannelGraph& g, const WealthVector& omega,
                                            std::uint64_t max_states = 10'000'000);

/// Every strict circulation on L(g, lam) (2-party graphs). Throws
/// std::length_error when the search space exceeds max_states.
std::vector<Circulation> strict_circulations_enumerate(const ChannelGraph& g, const LiquidityState& lam,
                                                       std::uint64_t max_states = 10'000'000);

/// Number of connected components of the (hyper)graph.
std::size_t component_count(const ChannelGraph& g);

/// m - n + #components for 2-party graphs.
std::size_t circuit_rank(const ChannelGraph& g);

/// Spanning forest of a 2-party graph: tree channel indices, plus for each
/// non-tree channel its fundamental cycle as signed channel steps
/// (+1 = traversed first endpoint to second).
struct CycleBasis {
  std::vector<std::size_t> tree;
  struct Step {
    std::size_t channel;
    int sign;
  };
  std::vector<std::vector<Step>> cycles;
};

CycleBasis fundamental_cycles(const ChannelGraph& g);

}  // namespace pcn
