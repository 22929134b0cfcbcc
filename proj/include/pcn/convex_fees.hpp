#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pcn/depletion.hpp"
#include "pcn/network.hpp"
#include "pcn/random.hpp"

namespace pcn {

enum class TierKind { linear, quadratic, custom };

/// Next-unit prices per channel side. price[e][i][t] is what
/// channel(e).endpoints[i] charges for the unit that takes its local
/// liquidity on e from t to t - 1; t runs over 0..c_e. Prices never increase
/// with local liquidity.
struct TierSchedule {
  TierKind kind = TierKind::custom;
  std::vector<std::vector<std::vector<std::int64_t>>> price;

  /// Constant price per side.
  static TierSchedule linear(const ChannelGraph& g, const FeeSchedule& ppm);
  static TierSchedule linear(const ChannelGraph& g, Ppm ppm);
  /// Total fee for sending x units out of a full side is F(x) =
  /// floor(ppm x^2 / c); the unit at local liquidity t costs
  /// F(c - t + 1) - F(c - t). Throws when rounding breaks monotonicity
  /// (small ppm relative to c).
  static TierSchedule quadratic(const ChannelGraph& g, const FeeSchedule& ppm);
  static TierSchedule quadratic(const ChannelGraph& g, Ppm ppm);
  static TierSchedule custom(const ChannelGraph& g, std::vector<std::vector<std::vector<std::int64_t>>> price);

  std::int64_t at(std::size_t e, std::size_t slot, Coins t) const { return price[e][slot][static_cast<std::size_t>(t)]; }
  /// Throws std::invalid_argument on shape mismatch, negative or increasing prices.
  void validate(const ChannelGraph& g) const;
};

std::string to_string(TierKind kind);
TierKind parse_tier_kind(const std::string& s);

/// Phi(lambda): sum over sides of p(1) + ... + p(lambda(e, u)).
std::int64_t potential_phi(const ChannelGraph& g, const LiquidityState& lam, const TierSchedule& tiers);

/// An oriented simple cycle v_0 -> v_1 -> ... -> v_0 over 2-party channels
/// and the interval of amounts that can be pushed along it.
struct CycleState {
  std::vector<NodeIndex> nodes;
  std::vector<std::size_t> channels;  // channels[i] joins nodes[i] and nodes[i+1]
  Coins x_min = 0;
  Coins x_max = 0;
};

/// Throws std::invalid_argument if a step has no channel or a channel repeats.
CycleState cycle_state(const ChannelGraph& g, const LiquidityState& lam, const std::vector<NodeIndex>& cycle);

/// State after pushing x units along the cycle orientation.
LiquidityState push_along(const ChannelGraph& g, const LiquidityState& lam, const CycleState& c, Coins x);

/// Phi(lambda_{x+1}) - Phi(lambda_x). Throws std::out_of_range unless
/// x_min <= x < x_max.
std::int64_t delta_C(const ChannelGraph& g, const LiquidityState& lam, const TierSchedule& tiers,
                     const std::vector<NodeIndex>& cycle, Coins x);

enum class EquilibriumKind { interior, boundary_min, boundary_max };

struct CycleEquilibrium {
  EquilibriumKind kind = EquilibriumKind::interior;
  Coins x_min = 0;
  Coins x_max = 0;
  /// Every x in [x_min, x_max] where Phi(lambda_x) is largest, ascending.
  std::vector<Coins> optimal;
  /// First x with delta(x) >= 0 >= delta(x + 1), when such a sign change exists.
  std::optional<std::pair<Coins, Coins>> bracket;
};

CycleEquilibrium cycle_equilibrium(const ChannelGraph& g, const LiquidityState& lam, const TierSchedule& tiers,
                                   const std::vector<NodeIndex>& cycle);

std::string to_string(EquilibriumKind kind);

enum class Demand {
  circular,         // node (step mod n) pays its successor in node order
  circular_random,  // a uniform random node pays its successor
  uniform,          // uniform random ordered pair
};

std::string to_string(Demand d);
Demand parse_demand(const std::string& s);

struct SimulationConfig {
  std::size_t steps = 10'000;
  Demand demand = Demand::circular;
  /// Senders see current tier prices and skip empty sides. Otherwise they
  /// price every hop at the balanced level and learn about empty sides only
  /// from failed attempts.
  bool disclose = true;
  /// Attempts per payment; each failure removes the failing hop.
  std::size_t max_attempts = 3;
};

struct StepRecord {
  std::size_t step = 0;
  NodeIndex source = 0;
  NodeIndex target = 0;
  bool success = false;
  std::size_t attempts = 0;
  std::size_t hops = 0;
  std::int64_t fee = 0;
  /// (node, fee) per hop of a successful payment.
  std::vector<std::pair<NodeIndex, std::int64_t>> credits;
  /// First-endpoint liquidity per channel after the step.
  std::vector<Coins> liquidity;
};

struct SimulationSeries {
  LiquidityState initial;
  std::vector<StepRecord> steps;
  /// Per channel: units forwarded in each direction (first to second, second to first).
  std::vector<std::pair<std::uint64_t, std::uint64_t>> channel_flow;
  /// Fees credited to each node as the sending side of a hop.
  std::vector<std::int64_t> node_fees;
};

/// Unit payments routed on the cheapest path by hop prices; each hop is
/// charged the current price of its sending side and the fee is credited
/// to that side. Only 2-party graphs.
SimulationSeries routing_simulation(const ChannelGraph& g, const LiquidityState& start, const TierSchedule& tiers,
                                    const SimulationConfig& config, Rng& rng);

/// First step s, a multiple of window, where the mean first-endpoint
/// liquidity over [s, s + window) is within tol * c_e of the mean over
/// [s - window, s) on every channel.
std::optional<std::size_t> steady_state_start(const ChannelGraph& g, const SimulationSeries& series,
                                              std::size_t window = 500, double tol = 0.01);

struct LiquiditySummary {
  std::size_t from_step = 0;
  bool steady = false;
  std::vector<double> median_relative;     // per channel, first endpoint
  std::vector<std::int64_t> node_fees;     // over the summarized steps
  std::int64_t network_fees = 0;
  std::size_t payments = 0;
  std::size_t successes = 0;
  double band_40_60 = 0.0;  // fraction of channel-steps with relative liquidity in [0.4, 0.6]
  double band_10_90 = 0.0;
};

/// Summary over the steps from the detected steady state on (the second
/// half of the run when none is detected). Throws on an empty series.
LiquiditySummary summarize_liquidity(const ChannelGraph& g, const SimulationSeries& series,
                                     std::size_t window = 500, double tol = 0.01);

/// n nodes on a single cycle: channel i joins i and i + 1 mod n.
ChannelGraph cycle_benchmark(std::size_t n = 3, Coins cap = 100);

}  // namespace pcn
