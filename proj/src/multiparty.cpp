#include "pcn/multiparty.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "pcn/flow.hpp"

namespace pcn {

namespace {

BigInt big_binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  BigInt r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

void RandomTopologySpec::validate() const {
  if (k < 2 || k > n) throw std::invalid_argument("party size must satisfy 2 <= k <= n");
  if (c <= 0) throw std::invalid_argument("channel capacity must be positive");
  if (n > 64) throw std::invalid_argument("topology sampling supports at most 64 nodes");
}

bool RandomTopologySpec::duplicates_forced() const { return big_binomial(n, k) < m; }

Rational q2(std::size_t n, std::size_t s) {
  if (n < 2 || s < 1 || s >= n) throw std::invalid_argument("q2 needs n >= 2 and 1 <= s <= n-1");
  return Rational(BigInt(2 * s * (n - s)), BigInt(n * (n - 1)));
}

Rational qk(std::size_t n, std::size_t k, std::size_t s) {
  if (s < 1 || s >= n) throw std::invalid_argument("qk needs 1 <= s <= n-1");
  if (k < 1 || k > n) throw std::invalid_argument("qk needs 1 <= k <= n");
  Rational inside(big_binomial(s, k) + big_binomial(n - s, k), big_binomial(n, k));
  return 1 - inside;
}

Rational expected_cut_width(const RandomTopologySpec& spec, std::size_t s) {
  spec.validate();
  return Rational(BigInt(spec.m) * spec.c) * qk(spec.n, spec.k, s);
}

std::uint64_t random_subset(std::size_t n, std::size_t k, Rng& rng) {
  // Floyd's algorithm on bit positions.
  std::uint64_t mask = 0;
  for (std::size_t j = n - k; j < n; ++j) {
    auto t = rng.below(j + 1);
    auto bit = std::uint64_t{1} << t;
    mask |= (mask & bit) ? (std::uint64_t{1} << j) : bit;
  }
  return mask;
}

Topology sample_topology(const RandomTopologySpec& spec, Rng& rng) {
  spec.validate();
  const bool distinct = !spec.duplicates_forced();
  Topology t;
  t.reserve(spec.m);
  std::set<std::uint64_t> seen;
  while (t.size() < spec.m) {
    auto mask = random_subset(spec.n, spec.k, rng);
    if (distinct && !seen.insert(mask).second) continue;
    t.push_back(mask);
  }
  return t;
}

CutWidthReport mc_cut_width(const RandomTopologySpec& spec, std::size_t s, std::uint64_t samples, Rng& rng) {
  spec.validate();
  if (samples == 0) throw std::invalid_argument("sample count must be at least 1");
  if (spec.m == 0) throw std::invalid_argument("straddle rate needs at least one channel");
  CutWidthReport r;
  r.s = s;
  r.k = spec.k;
  r.q_closed = qk(spec.n, spec.k, s);
  r.expected_width_closed = expected_cut_width(spec, s);
  r.samples = samples;
  r.duplicates_forced = spec.duplicates_forced();
  const std::uint64_t cut = (std::uint64_t{1} << s) - 1;
  double sum = 0;
  double sum_sq = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    std::size_t hits = 0;
    for (auto members : sample_topology(spec, rng)) hits += straddles(members, cut) ? 1 : 0;
    const double frac = static_cast<double>(hits) / static_cast<double>(spec.m);
    sum += frac;
    sum_sq += frac * frac;
  }
  const auto N = static_cast<double>(samples);
  r.q_mc = sum / N;
  const double var = samples > 1 ? std::max(0.0, (sum_sq - N * r.q_mc * r.q_mc) / (N - 1)) : 0.0;
  r.q_standard_error = std::sqrt(var / N);
  r.expected_width_mc = r.q_mc * static_cast<double>(spec.m) * static_cast<double>(spec.c);
  return r;
}

CoupledTopology sample_coupled(const RandomTopologySpec& spec, Rng& rng) {
  CoupledTopology t;
  t.k_party = sample_topology(spec, rng);
  t.pairs.reserve(t.k_party.size());
  for (auto members : t.k_party) {
    std::vector<std::size_t> nodes;
    for (std::size_t v = 0; v < spec.n; ++v) {
      if (members >> v & 1) nodes.push_back(v);
    }
    auto pick = random_subset(nodes.size(), 2, rng);
    std::uint64_t pair = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (pick >> i & 1) pair |= std::uint64_t{1} << nodes[i];
    }
    t.pairs.push_back(pair);
  }
  return t;
}

std::pair<ChannelGraph, ChannelGraph> realize(const RandomTopologySpec& spec, const CoupledTopology& t) {
  auto build = [&](const Topology& top) {
    std::vector<std::pair<std::vector<NodeIndex>, Coins>> ch;
    for (auto members : top) {
      std::vector<NodeIndex> ends;
      for (std::size_t v = 0; v < spec.n; ++v) {
        if (members >> v & 1) ends.push_back(v);
      }
      ch.push_back({ends, spec.c});
    }
    return ChannelGraph::from_indices(spec.n, ch);
  };
  return {build(t.k_party), build(t.pairs)};
}

Coins hypergraph_max_flow(const ChannelGraph& g, NodeIndex source, NodeIndex sink) {
  flow::FlowNetwork net;
  net.node_count = g.node_count();
  const Coins unbounded = std::max<Coins>(1, g.total_capacity());
  for (const auto& c : g.channels()) {
    auto in = net.add_node();
    auto out = net.add_node();
    net.add_arc(in, out, c.capacity);
    for (auto v : c.endpoints) {
      net.add_arc(v, in, unbounded);
      net.add_arc(out, v, unbounded);
    }
  }
  return flow::max_flow(net, source, sink).value;
}

DominanceReport coupled_dominance_check(const RandomTopologySpec& spec, const std::vector<std::uint64_t>& cuts,
                                        std::uint64_t samples, Rng& rng) {
  spec.validate();
  std::vector<std::uint64_t> all_cuts = cuts;
  if (all_cuts.empty()) {
    if (spec.n > 20) throw std::invalid_argument("exhaustive cut lists need n <= 20");
    for (std::uint64_t s = 1; s + 1 < (std::uint64_t{1} << spec.n); ++s) all_cuts.push_back(s);
  }
  DominanceReport r;
  r.samples = samples;
  double sum_k = 0;
  double sum_2 = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    auto t = sample_coupled(spec, rng);
    Coins min_k = std::numeric_limits<Coins>::max();
    Coins min_2 = std::numeric_limits<Coins>::max();
    for (auto cut : all_cuts) {
      Coins cap_k = 0;
      Coins cap_2 = 0;
      for (std::size_t e = 0; e < t.k_party.size(); ++e) {
        const bool a = straddles(t.k_party[e], cut);
        const bool b = straddles(t.pairs[e], cut);
        ++r.indicator_checks;
        if (b && !a) ++r.indicator_violations;
        cap_k += a ? spec.c : 0;
        cap_2 += b ? spec.c : 0;
      }
      if (cap_k < cap_2) ++r.cut_capacity_violations;
      min_k = std::min(min_k, cap_k);
      min_2 = std::min(min_2, cap_2);
    }
    if (min_k < min_2) ++r.min_cut_violations;
    sum_k += static_cast<double>(min_k);
    sum_2 += static_cast<double>(min_2);

    if (spec.n >= 2) {
      auto s = static_cast<NodeIndex>(rng.below(spec.n));
      auto d = static_cast<NodeIndex>(rng.below(spec.n - 1));
      if (d >= s) ++d;
      auto [gk, g2] = realize(spec, t);
      ++r.maxflow_checks;
      if (hypergraph_max_flow(gk, s, d) < hypergraph_max_flow(g2, s, d)) ++r.maxflow_violations;
    }
  }
  if (samples > 0) {
    r.mean_min_cut_k = sum_k / static_cast<double>(samples);
    r.mean_min_cut_2 = sum_2 / static_cast<double>(samples);
  }
  return r;
}

}  // namespace pcn
