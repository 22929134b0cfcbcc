#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pcn/network.hpp"

namespace pcn {

/// A node set together with the wealth it holds and its admissible range.
struct CutCertificate {
  std::vector<bool> members;
  Coins wealth = 0;
  Coins lo = 0;
  Coins hi = 0;
};

struct FeasibilityResult {
  bool feasible = false;
  std::optional<LiquidityState> witness;
  std::optional<CutCertificate> certificate;
};

struct CutInterval {
  Coins lo = 0;
  Coins hi = 0;
  Coins width() const { return hi - lo; }
};

/// Admissible total wealth of a node set S: lo sums channels entirely inside
/// S, hi adds every channel straddling S at full capacity.
CutInterval cut_interval(const ChannelGraph& g, const std::vector<bool>& s);

/// Membership of omega in the feasible wealth region, decided by a bipartite
/// transshipment: every channel ships its capacity to its members and every
/// node absorbs exactly its wealth. Works for hyperchannels unchanged.
FeasibilityResult is_feasible(const ChannelGraph& g, const WealthVector& omega);

/// Exhaustive scan of all liquidity states. Throws std::length_error when
/// the state space exceeds max_states.
bool is_feasible_bruteforce(const ChannelGraph& g, const WealthVector& omega,
                            std::uint64_t max_states = 10'000'000);

/// Wealth after payer sends amount to payee.
WealthVector shifted_wealth(const WealthVector& omega, NodeIndex payer, NodeIndex payee, Coins amount);

/// Feasibility of the wealth that results from the payment. Throws when the
/// payer cannot cover the amount.
FeasibilityResult payment_feasible(const ChannelGraph& g, const WealthVector& omega, NodeIndex payer,
                                   NodeIndex payee, Coins amount);

/// Visits every liquidity state of g in lexicographic order of the per-channel
/// coordinates. Returning false from visit stops the scan.
template <typename Visit>
void for_each_state(const ChannelGraph& g, Visit&& visit);

/// All compositions of total into parts nonnegative parts, lexicographic.
std::vector<std::vector<Coins>> compositions(Coins total, std::size_t parts);

}  // namespace pcn

#include "pcn/detail/state_scan.hpp"
