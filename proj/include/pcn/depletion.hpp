#pragma once

#include <cstdint>
#include <vector>

#include "pcn/network.hpp"
#include "pcn/random.hpp"

namespace pcn {

using Ppm = std::int64_t;

/// Linear per-unit fee rates: ppm[e][i] is charged by channel(e).endpoints[i]
/// for forwarding out of its side of e.
struct FeeSchedule {
  std::vector<std::vector<Ppm>> ppm;

  static FeeSchedule zero(const ChannelGraph& g);
  /// Rates uniform in [lo, hi]; symmetric draws one rate per channel.
  static FeeSchedule random(const ChannelGraph& g, Rng& rng, Ppm lo = 1, Ppm hi = 1000, bool symmetric = false);

  void validate(const ChannelGraph& g) const;
  Ppm of(const ChannelGraph& g, std::size_t e, NodeIndex v) const;
  bool is_symmetric() const;
};

struct PotentialReport {
  std::int64_t p_G = 0;
  std::vector<std::int64_t> per_node;
  std::size_t depleted_channels = 0;
  std::size_t circuit_rank = 0;
};

/// Channels in which some member holds nothing.
std::size_t depleted_channel_count(const LiquidityState& lam);
bool is_depleted(const LiquidityState& lam, std::size_t e);

/// Circuit rank; hypergraphs use the rank of their 2-section.
std::size_t cycle_rank(const ChannelGraph& g);

PotentialReport fee_potential(const ChannelGraph& g, const LiquidityState& lam, const FeeSchedule& fees);

struct MaximizeResult {
  LiquidityState state;
  PotentialReport report;
};

/// State of maximum fee potential in the fiber of omega. 2-party graphs are
/// solved as a min-cost circulation on the liquidity network of a witness,
/// hypergraphs as a min-cost transshipment. Throws std::invalid_argument when
/// omega is infeasible.
MaximizeResult maximize_potential(const ChannelGraph& g, const WealthVector& omega, const FeeSchedule& fees);

/// Sum over consecutive (v_i, v_i+1) of fee(e_i, v_i) - fee(e_i, v_i+1).
/// The walk closes back to its first node; a repeated first node at the end
/// is accepted. Throws std::invalid_argument if a step has no channel.
std::int64_t cycle_fee_gap(const ChannelGraph& g, const FeeSchedule& fees, const std::vector<NodeIndex>& cycle);

/// Fee gaps of a cycle basis of the non-depleted channels. All zero iff
/// every cycle of non-depleted channels has zero gap.
std::vector<std::int64_t> nondepleted_cycle_gaps(const ChannelGraph& g, const LiquidityState& lam,
                                                 const FeeSchedule& fees);

/// Every member gets floor(c / k); the remainder goes one coin at a time to
/// the members with the lowest node index.
LiquidityState balanced_state(const ChannelGraph& g);

/// Uniform random labeled spanning tree (Pruefer code) plus m - n + 1 extra
/// distinct node pairs, capacities uniform in [cap_lo, cap_hi].
ChannelGraph random_connected_graph(std::size_t n, std::size_t m, Coins cap_lo, Coins cap_hi, Rng& rng);

struct DepletionEnsemble {
  std::size_t n = 20;
  /// Channel count drawn uniformly from [m_min, m_max] for every trial.
  std::size_t m_min = 19;
  std::size_t m_max = 30;
  Coins cap_lo = 1;
  Coins cap_hi = 100;
  Ppm fee_lo = 1;
  Ppm fee_hi = 1000;
  bool symmetric_fees = false;

  void validate() const;
};

struct DepletionTrial {
  std::size_t trial = 0;
  std::size_t m = 0;
  std::size_t circuit_rank = 0;
  std::size_t depleted = 0;
  std::int64_t p_G = 0;
  /// Every cycle of non-depleted channels at the optimum has zero fee gap.
  bool gaps_zero = true;
};

struct DepletionSummary {
  std::vector<DepletionTrial> trials;
  /// Pearson correlation of depleted count against circuit rank; NaN when
  /// either column is constant.
  double pearson = 0.0;
};

/// Trial i draws its graph, fees and target from Rng(seed).split(i), so the
/// table does not depend on the thread count.
DepletionSummary depletion_experiment(const DepletionEnsemble& ensemble, std::size_t trials, std::uint64_t seed,
                                      std::size_t threads = 1);

/// One trial of the experiment on a given graph: target wealth from the
/// balanced state, potential maximized under the given fees.
DepletionTrial depletion_trial(const ChannelGraph& g, const FeeSchedule& fees);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pcn
