#include "pcn/depletion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include <boost/math/statistics/bivariate_statistics.hpp>

#include "pcn/feasibility.hpp"
#include "pcn/fibers.hpp"
#include "pcn/flow.hpp"
#include "pcn/parallel.hpp"

namespace pcn {

FeeSchedule FeeSchedule::zero(const ChannelGraph& g) {
  FeeSchedule f;
  for (const auto& c : g.channels()) f.ppm.emplace_back(c.endpoints.size(), 0);
  return f;
}

FeeSchedule FeeSchedule::random(const ChannelGraph& g, Rng& rng, Ppm lo, Ppm hi, bool symmetric) {
  if (lo < 0 || hi < lo) throw std::invalid_argument("fee range must satisfy 0 <= lo <= hi");
  FeeSchedule f;
  for (const auto& c : g.channels()) {
    std::vector<Ppm> rates(c.endpoints.size());
    if (symmetric) {
      std::fill(rates.begin(), rates.end(), rng.between(lo, hi));
    } else {
      for (auto& r : rates) r = rng.between(lo, hi);
    }
    f.ppm.push_back(std::move(rates));
  }
  return f;
}

void FeeSchedule::validate(const ChannelGraph& g) const {
  if (ppm.size() != g.channel_count()) throw std::invalid_argument("fee schedule does not match the channel count");
  for (std::size_t e = 0; e < ppm.size(); ++e) {
    if (ppm[e].size() != g.channel(e).endpoints.size()) {
      throw std::invalid_argument("fee schedule does not match the members of channel " + g.channel(e).id);
    }
    for (auto r : ppm[e]) {
      if (r < 0) throw std::invalid_argument("fee rates must be nonnegative");
    }
  }
}

Ppm FeeSchedule::of(const ChannelGraph& g, std::size_t e, NodeIndex v) const {
  auto slot = g.channel(e).slot_of(v);
  if (!slot) throw std::invalid_argument("node is not a member of the channel");
  return ppm.at(e).at(*slot);
}

bool FeeSchedule::is_symmetric() const {
  return std::all_of(ppm.begin(), ppm.end(), [](const std::vector<Ppm>& r) {
    return std::adjacent_find(r.begin(), r.end(), std::not_equal_to<>()) == r.end();
  });
}

bool is_depleted(const LiquidityState& lam, std::size_t e) {
  const auto& v = lam.values().at(e);
  return std::find(v.begin(), v.end(), Coins{0}) != v.end();
}

std::size_t depleted_channel_count(const LiquidityState& lam) {
  std::size_t count = 0;
  for (std::size_t e = 0; e < lam.values().size(); ++e) count += is_depleted(lam, e) ? 1 : 0;
  return count;
}

std::size_t cycle_rank(const ChannelGraph& g) {
  if (g.all_two_party()) return circuit_rank(g);
  std::set<std::pair<NodeIndex, NodeIndex>> pairs;
  for (const auto& c : g.channels()) {
    for (std::size_t i = 0; i < c.endpoints.size(); ++i) {
      for (std::size_t j = i + 1; j < c.endpoints.size(); ++j) {
        pairs.insert(std::minmax(c.endpoints[i], c.endpoints[j]));
      }
    }
  }
  return pairs.size() + component_count(g) - g.node_count();
}

PotentialReport fee_potential(const ChannelGraph& g, const LiquidityState& lam, const FeeSchedule& fees) {
  fees.validate(g);
  PotentialReport r;
  r.per_node.assign(g.node_count(), 0);
  for (std::size_t e = 0; e < g.channel_count(); ++e) {
    const auto& c = g.channel(e);
    for (std::size_t i = 0; i < c.endpoints.size(); ++i) r.per_node[c.endpoints[i]] += fees.ppm[e][i] * lam.at(e, i);
  }
  for (auto p : r.per_node) r.p_G += p;
  r.depleted_channels = depleted_channel_count(lam);
  r.circuit_rank = cycle_rank(g);
  return r;
}

namespace {

LiquidityState maximize_two_party(const ChannelGraph& g, const LiquidityState& start, const FeeSchedule& fees) {
  // Arc 2e runs first -> second endpoint; moving a unit u -> v on e changes
  // the potential by fee(e, v) - fee(e, u).
  flow::FlowNetwork net;
  net.node_count = g.node_count();
  for (std::size_t e = 0; e < g.channel_count(); ++e) {
    const auto& ends = g.channel(e).endpoints;
    const auto gain = fees.ppm[e][1] - fees.ppm[e][0];
    net.add_arc(ends[0], ends[1], start.at(e, 0), -gain);
    net.add_arc(ends[1], ends[0], start.at(e, 1), gain);
  }
  auto f = flow::min_cost_circulation(net);
  if (flow::has_negative_residual_cycle(net, f)) throw std::logic_error("potential maximization left an improving cycle");
  Circulation c = Circulation::zero(g.channel_count());
  for (std::size_t e = 0; e < g.channel_count(); ++e) {
    c.forward[e] = f[2 * e];
    c.backward[e] = f[2 * e + 1];
  }
  return apply_circulation(g, start, Circulation::from_net(c.net()));
}

LiquidityState maximize_hyper(const ChannelGraph& g, const WealthVector& omega, const FeeSchedule& fees) {
  const auto n = g.node_count();
  const auto m = g.channel_count();
  flow::FlowNetwork net;
  net.node_count = n + m;
  net.supply.assign(n + m, 0);
  std::vector<std::vector<std::size_t>> member_arc(m);
  for (std::size_t e = 0; e < m; ++e) {
    const auto& c = g.channel(e);
    net.supply[n + e] = c.capacity;
    for (std::size_t i = 0; i < c.endpoints.size(); ++i) {
      member_arc[e].push_back(net.add_arc(n + e, c.endpoints[i], c.capacity, -fees.ppm[e][i]));
    }
  }
  for (NodeIndex v = 0; v < n; ++v) net.supply[v] = -omega[v];
  auto f = flow::min_cost_transshipment(net);
  if (!f) throw std::invalid_argument("wealth vector is not feasible");
  std::vector<std::vector<Coins>> values(m);
  for (std::size_t e = 0; e < m; ++e) {
    for (auto a : member_arc[e]) values[e].push_back((*f)[a]);
  }
  return LiquidityState(g, std::move(values));
}

}  // namespace

MaximizeResult maximize_potential(const ChannelGraph& g, const WealthVector& omega, const FeeSchedule& fees) {
  fees.validate(g);
  auto feasible = is_feasible(g, omega);
  if (!feasible.feasible) throw std::invalid_argument("wealth vector is not feasible");
  auto state = g.all_two_party() ? maximize_two_party(g, *feasible.witness, fees) : maximize_hyper(g, omega, fees);
  auto report = fee_potential(g, state, fees);
  return {std::move(state), std::move(report)};
}

std::int64_t cycle_fee_gap(const ChannelGraph& g, const FeeSchedule& fees, const std::vector<NodeIndex>& cycle) {
  fees.validate(g);
  auto walk = cycle;
  if (walk.size() > 1 && walk.front() == walk.back()) walk.pop_back();
  if (walk.size() < 2) throw std::invalid_argument("a cycle needs at least two nodes");
  std::int64_t gap = 0;
  for (std::size_t i = 0; i < walk.size(); ++i) {
    const auto u = walk[i];
    const auto v = walk[(i + 1) % walk.size()];
    auto e = g.find_channel(u, v);
    if (!e) throw std::invalid_argument("no channel between " + g.node_id(u) + " and " + g.node_id(v));
    gap += fees.of(g, *e, u) - fees.of(g, *e, v);
  }
  return gap;
}

std::vector<std::int64_t> nondepleted_cycle_gaps(const ChannelGraph& g, const LiquidityState& lam,
                                                 const FeeSchedule& fees) {
  fees.validate(g);
  std::vector<std::pair<std::vector<NodeIndex>, Coins>> kept;
  std::vector<std::size_t> original;
  for (std::size_t e = 0; e < g.channel_count(); ++e) {
    if (is_depleted(lam, e)) continue;
    kept.push_back({g.channel(e).endpoints, g.channel(e).capacity});
    original.push_back(e);
  }
  auto sub = ChannelGraph::from_indices(g.node_count(), kept);
  std::vector<std::int64_t> gaps;
  for (const auto& cycle : fundamental_cycles(sub).cycles) {
    std::int64_t gap = 0;
    for (auto s : cycle) {
      const auto e = original[s.channel];
      // Traversed from endpoint 0 to 1 when sign is +1.
      gap += s.sign * (fees.ppm[e][0] - fees.ppm[e][1]);
    }
    gaps.push_back(gap);
  }
  return gaps;
}

LiquidityState balanced_state(const ChannelGraph& g) {
  std::vector<std::vector<Coins>> values;
  for (const auto& c : g.channels()) {
    const auto k = static_cast<Coins>(c.endpoints.size());
    std::vector<Coins> split(c.endpoints.size(), c.capacity / k);
    std::vector<std::size_t> by_index(c.endpoints.size());
    for (std::size_t i = 0; i < by_index.size(); ++i) by_index[i] = i;
    std::sort(by_index.begin(), by_index.end(),
              [&](std::size_t a, std::size_t b) { return c.endpoints[a] < c.endpoints[b]; });
    for (Coins r = 0; r < c.capacity % k; ++r) ++split[by_index[static_cast<std::size_t>(r)]];
    values.push_back(std::move(split));
  }
  return LiquidityState(g, std::move(values));
}

ChannelGraph random_connected_graph(std::size_t n, std::size_t m, Coins cap_lo, Coins cap_hi, Rng& rng) {
  if (n < 2) throw std::invalid_argument("random graphs need at least two nodes");
  if (m + 1 < n || m > n * (n - 1) / 2) throw std::invalid_argument("channel count must lie in [n-1, n(n-1)/2]");
  if (cap_lo < 1 || cap_hi < cap_lo) throw std::invalid_argument("capacity range must satisfy 1 <= lo <= hi");

  std::vector<std::pair<std::vector<NodeIndex>, Coins>> ch;
  std::set<std::pair<NodeIndex, NodeIndex>> used;
  auto add = [&](NodeIndex u, NodeIndex v) {
    used.insert(std::minmax(u, v));
    ch.push_back({{std::min(u, v), std::max(u, v)}, rng.between(cap_lo, cap_hi)});
  };

  std::vector<NodeIndex> code(n - 2);
  for (auto& c : code) c = static_cast<NodeIndex>(rng.below(n));
  std::vector<std::size_t> degree(n, 1);
  for (auto c : code) ++degree[c];
  for (auto c : code) {
    NodeIndex leaf = 0;
    while (degree[leaf] != 1) ++leaf;
    add(leaf, c);
    --degree[leaf];
    --degree[c];
  }
  NodeIndex a = n, b = n;
  for (NodeIndex v = 0; v < n; ++v) {
    if (degree[v] != 1) continue;
    (a == n ? a : b) = v;
  }
  add(a, b);

  while (ch.size() < m) {
    auto u = static_cast<NodeIndex>(rng.below(n));
    auto v = static_cast<NodeIndex>(rng.below(n));
    if (u == v || used.count(std::minmax(u, v))) continue;
    add(u, v);
  }
  return ChannelGraph::from_indices(n, ch);
}

void DepletionEnsemble::validate() const {
  if (n < 2) throw std::invalid_argument("ensemble needs at least two nodes");
  if (m_min + 1 < n || m_max < m_min || m_max > n * (n - 1) / 2) {
    throw std::invalid_argument("channel range must satisfy n-1 <= m_min <= m_max <= n(n-1)/2");
  }
  if (cap_lo < 1 || cap_hi < cap_lo) throw std::invalid_argument("capacity range must satisfy 1 <= lo <= hi");
  if (fee_lo < 0 || fee_hi < fee_lo) throw std::invalid_argument("fee range must satisfy 0 <= lo <= hi");
}

DepletionTrial depletion_trial(const ChannelGraph& g, const FeeSchedule& fees) {
  const auto omega = wealth_of(g, balanced_state(g));
  auto best = maximize_potential(g, omega, fees);
  DepletionTrial t;
  t.m = g.channel_count();
  t.circuit_rank = best.report.circuit_rank;
  t.depleted = best.report.depleted_channels;
  t.p_G = best.report.p_G;
  if (g.all_two_party()) {
    for (auto gap : nondepleted_cycle_gaps(g, best.state, fees)) t.gaps_zero = t.gaps_zero && gap == 0;
  }
  return t;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("correlation needs two equal columns of length >= 2");
  const bool flat_x = std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) == x.end();
  const bool flat_y = std::adjacent_find(y.begin(), y.end(), std::not_equal_to<>()) == y.end();
  if (flat_x || flat_y) return std::numeric_limits<double>::quiet_NaN();
  return boost::math::statistics::correlation_coefficient(x, y);
}

DepletionSummary depletion_experiment(const DepletionEnsemble& ensemble, std::size_t trials, std::uint64_t seed,
                                      std::size_t threads) {
  ensemble.validate();
  DepletionSummary s;
  s.trials.resize(trials);
  const Rng master(seed);
  parallel_for(trials, static_cast<unsigned>(threads), [&](std::uint64_t i) {
    auto rng = master.split(i);
    const auto m = static_cast<std::size_t>(
        rng.between(static_cast<std::int64_t>(ensemble.m_min), static_cast<std::int64_t>(ensemble.m_max)));
    auto g = random_connected_graph(ensemble.n, m, ensemble.cap_lo, ensemble.cap_hi, rng);
    auto fees = FeeSchedule::random(g, rng, ensemble.fee_lo, ensemble.fee_hi, ensemble.symmetric_fees);
    s.trials[i] = depletion_trial(g, fees);
    s.trials[i].trial = i;
  });
  if (trials >= 2) {
    std::vector<double> rank, depleted;
    for (const auto& t : s.trials) {
      rank.push_back(static_cast<double>(t.circuit_rank));
      depleted.push_back(static_cast<double>(t.depleted));
    }
    s.pearson = pearson(depleted, rank);
  } else {
    s.pearson = std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

}  // namespace pcn
