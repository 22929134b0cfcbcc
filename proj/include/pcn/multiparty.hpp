#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pcn/network.hpp"
#include "pcn/random.hpp"
#include "pcn/rational.hpp"

namespace pcn {

/// m random k-party channels of capacity c on n nodes.
struct RandomTopologySpec {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t k = 2;
  Coins c = 1;

  void validate() const;
  /// True when fewer than m distinct k-sets exist, so a draw must repeat one.
  bool duplicates_forced() const;
};

/// Probability that a uniformly random pair straddles a cut of size s:
/// 2 s (n - s) / (n (n - 1)).
Rational q2(std::size_t n, std::size_t s);

/// Probability that a uniformly random k-set straddles a cut of size s:
/// 1 - [C(s, k) + C(n - s, k)] / C(n, k).
Rational qk(std::size_t n, std::size_t k, std::size_t s);

/// Expected capacity crossing a fixed cut of size s: m c qk(n, k, s).
Rational expected_cut_width(const RandomTopologySpec& spec, std::size_t s);

struct CutWidthReport {
  std::size_t s = 0;
  std::size_t k = 0;
  Rational q_closed;
  double q_mc = 0.0;
  double q_standard_error = 0.0;
  Rational expected_width_closed;
  double expected_width_mc = 0.0;
  std::uint64_t samples = 0;
  bool duplicates_forced = false;
};

/// Node sets of a topology draw, one bitmask per channel (bit v = node v).
using Topology = std::vector<std::uint64_t>;

/// m k-subsets, distinct within the draw unless duplicates are forced.
Topology sample_topology(const RandomTopologySpec& spec, Rng& rng);

/// Uniform k-subset of {0..n-1} as a bitmask.
std::uint64_t random_subset(std::size_t n, std::size_t k, Rng& rng);

inline bool straddles(std::uint64_t members, std::uint64_t cut) {
  return (members & cut) != 0 && (members & ~cut) != 0;
}

/// Monte Carlo straddle rate for the cut {0..s-1}, next to the closed form.
CutWidthReport mc_cut_width(const RandomTopologySpec& spec, std::size_t s, std::uint64_t samples, Rng& rng);

/// Coupled draw: each k-set P_e and a uniform pair E_e inside it.
struct CoupledTopology {
  Topology k_party;
  Topology pairs;
};

CoupledTopology sample_coupled(const RandomTopologySpec& spec, Rng& rng);

/// Channel graphs realizing a coupled draw: (k-party, 2-party).
std::pair<ChannelGraph, ChannelGraph> realize(const RandomTopologySpec& spec, const CoupledTopology& t);

struct DominanceReport {
  std::uint64_t samples = 0;
  std::uint64_t indicator_checks = 0;
  std::uint64_t indicator_violations = 0;
  std::uint64_t cut_capacity_violations = 0;
  std::uint64_t min_cut_violations = 0;
  std::uint64_t maxflow_checks = 0;
  std::uint64_t maxflow_violations = 0;
  double mean_min_cut_k = 0.0;
  double mean_min_cut_2 = 0.0;

  bool clean() const {
    return indicator_violations == 0 && cut_capacity_violations == 0 && min_cut_violations == 0 &&
           maxflow_violations == 0;
  }
};

/// For each coupled sample checks, on every listed cut, that a straddling
/// pair implies a straddling k-set, that k-party cut capacity dominates the
/// paired capacity, that the minimum over the listed cuts keeps the order,
/// and that s-t max flow on the k-party realization dominates the paired
/// one for a random (s, t). An empty cut list means all 2^n - 2 cuts.
DominanceReport coupled_dominance_check(const RandomTopologySpec& spec, const std::vector<std::uint64_t>& cuts,
                                        std::uint64_t samples, Rng& rng);

/// Max flow between two nodes of a (hyper)graph: every channel can move its
/// full capacity between any two of its members.
Coins hypergraph_max_flow(const ChannelGraph& g, NodeIndex source, NodeIndex sink);

}  // namespace pcn
