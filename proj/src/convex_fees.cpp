#include "pcn/convex_fees.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>
#include <tuple>

namespace pcn {

namespace {

using PriceTable = std::vector<std::vector<std::vector<std::int64_t>>>;

std::vector<std::int64_t> quadratic_prices(Coins c, Ppm ppm) {
  auto F = [&](Coins x) { return ppm * x * x / c; };
  std::vector<std::int64_t> p(static_cast<std::size_t>(c) + 1);
  for (Coins t = 0; t <= c; ++t) p[static_cast<std::size_t>(t)] = F(c - t + 1) - F(c - t);
  return p;
}

TierSchedule build(const ChannelGraph& g, const FeeSchedule& ppm, TierKind kind) {
  ppm.validate(g);
  TierSchedule s;
  s.kind = kind;
  for (std::size_t e = 0; e < g.channel_count(); ++e) {
    const auto c = g.channel(e).capacity;
    std::vector<std::vector<std::int64_t>> sides;
    for (auto rate : ppm.ppm[e]) {
      sides.push_back(kind == TierKind::linear ? std::vector<std::int64_t>(static_cast<std::size_t>(c) + 1, rate)
                                               : quadratic_prices(c, rate));
    }
    s.price.push_back(std::move(sides));
  }
  s.validate(g);
  return s;
}

FeeSchedule uniform_rates(const ChannelGraph& g, Ppm ppm) {
  auto f = FeeSchedule::zero(g);
  for (auto& side : f.ppm) std::fill(side.begin(), side.end(), ppm);
  return f;
}

}  // namespace

TierSchedule TierSchedule::linear(const ChannelGraph& g, const FeeSchedule& ppm) {
  return build(g, ppm, TierKind::linear);
}
TierSchedule TierSchedule::linear(const ChannelGraph& g, Ppm ppm) { return linear(g, uniform_rates(g, ppm)); }
TierSchedule TierSchedule::quadratic(const ChannelGraph& g, const FeeSchedule& ppm) {
  return build(g, ppm, TierKind::quadratic);
}
TierSchedule TierSchedule::quadratic(const ChannelGraph& g, Ppm ppm) { return quadratic(g, uniform_rates(g, ppm)); }

TierSchedule TierSchedule::custom(const ChannelGraph& g, PriceTable price) {
  TierSchedule s;
  s.kind = TierKind::custom;
  s.price = std::move(price);
  s.validate(g);
  return s;
}

void TierSchedule::validate(const ChannelGraph& g) const {
  if (price.size() != g.channel_count()) throw std::invalid_argument("tier schedule does not match the channel count");
  for (std::size_t e = 0; e < price.size(); ++e) {
    const auto& c = g.channel(e);
    if (price[e].size() != c.endpoints.size()) {
      throw std::invalid_argument("tier schedule does not match the members of channel " + c.id);
    }
    for (const auto& p : price[e]) {
      if (p.size() != static_cast<std::size_t>(c.capacity) + 1) {
        throw std::invalid_argument("tier prices of channel " + c.id + " must cover liquidity 0..capacity");
      }
      for (std::size_t t = 0; t < p.size(); ++t) {
        if (p[t] < 0) throw std::invalid_argument("tier prices must be nonnegative");
        if (t > 0 && p[t] > p[t - 1]) {
          throw std::invalid_argument("tier prices on channel " + c.id + " increase with local liquidity");
        }
      }
    }
  }
}

std::string to_string(TierKind kind) {
  switch (kind) {
    case TierKind::linear: return "linear";
    case TierKind::quadratic: return "quadratic";
    case TierKind::custom: return "custom";
  }
  return "custom";
}

TierKind parse_tier_kind(const std::string& s) {
  if (s == "linear") return TierKind::linear;
  if (s == "quadratic") return TierKind::quadratic;
  throw std::invalid_argument("unknown schedule '" + s + "' (expected linear or quadratic)");
}

std::int64_t potential_phi(const ChannelGraph& g, const LiquidityState& lam, const TierSchedule& tiers) {
  std::int64_t phi = 0;
  for (std::size_t e = 0; e < g.channel_count(); ++e) {
    for (std::size_t i = 0; i < g.channel(e).endpoints.size(); ++i) {
      for (Coins t = 1; t <= lam.at(e, i); ++t) phi += tiers.at(e, i, t);
    }
  }
  return phi;
}

CycleState cycle_state(const ChannelGraph& g, const LiquidityState& lam, const std::vector<NodeIndex>& cycle) {
  CycleState s;
  s.nodes = cycle;
  if (s.nodes.size() > 1 && s.nodes.front() == s.nodes.back()) s.nodes.pop_back();
  if (s.nodes.size() < 2) throw std::invalid_argument("a cycle needs at least two nodes");
  Coins out_min = std::numeric_limits<Coins>::max();
  Coins in_min = std::numeric_limits<Coins>::max();
  std::set<std::size_t> seen;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    const auto u = s.nodes[i];
    const auto v = s.nodes[(i + 1) % s.nodes.size()];
    auto e = g.find_channel(u, v);
    if (!e) throw std::invalid_argument("no channel between " + g.node_id(u) + " and " + g.node_id(v));
    if (!seen.insert(*e).second) throw std::invalid_argument("cycle uses channel " + g.channel(*e).id + " twice");
    s.channels.push_back(*e);
    out_min = std::min(out_min, lam.of(g, *e, u));
    in_min = std::min(in_min, lam.of(g, *e, v));
  }
  s.x_min = -in_min;
  s.x_max = out_min;
  return s;
}

LiquidityState push_along(const ChannelGraph& g, const LiquidityState& lam, const CycleState& c, Coins x) {
  if (x < c.x_min || x > c.x_max) throw std::out_of_range("push outside the feasible interval of the cycle");
  auto values = lam.values();
  for (std::size_t i = 0; i < c.channels.size(); ++i) {
    const auto e = c.channels[i];
    const auto from = *g.channel(e).slot_of(c.nodes[i]);
    values[e][from] -= x;
    values[e][1 - from] += x;
  }
  return LiquidityState(g, std::move(values));
}

std::int64_t delta_C(const ChannelGraph& g, const LiquidityState& lam, const TierSchedule& tiers,
                     const std::vector<NodeIndex>& cycle, Coins x) {
  const auto c = cycle_state(g, lam, cycle);
  if (x < c.x_min || x >= c.x_max) throw std::out_of_range("delta needs x and x + 1 inside the feasible interval");
  std::int64_t d = 0;
  for (std::size_t i = 0; i < c.channels.size(); ++i) {
    const auto e = c.channels[i];
    const auto from = *g.channel(e).slot_of(c.nodes[i]);
    const auto to = 1 - from;
    d += tiers.at(e, to, lam.at(e, to) + x + 1) - tiers.at(e, from, lam.at(e, from) - x);
  }
  return d;
}

CycleEquilibrium cycle_equilibrium(const ChannelGraph& g, const LiquidityState& lam, const TierSchedule& tiers,
                                   const std::vector<NodeIndex>& cycle) {
  const auto c = cycle_state(g, lam, cycle);
  CycleEquilibrium r;
  r.x_min = c.x_min;
  r.x_max = c.x_max;
  std::vector<std::int64_t> delta;
  for (Coins x = c.x_min; x < c.x_max; ++x) delta.push_back(delta_C(g, lam, tiers, cycle, x));
  // Phi along the cycle is maximal where the step gain changes sign.
  for (Coins x = c.x_min; x <= c.x_max; ++x) {
    const auto i = static_cast<std::size_t>(x - c.x_min);
    const bool rising_in = x == c.x_min || delta[i - 1] >= 0;
    const bool falling_out = x == c.x_max || delta[i] <= 0;
    if (rising_in && falling_out) r.optimal.push_back(x);
  }
  for (std::size_t i = 0; i + 1 < delta.size(); ++i) {
    if (delta[i] >= 0 && delta[i + 1] <= 0) {
      r.bracket = {c.x_min + static_cast<Coins>(i), c.x_min + static_cast<Coins>(i) + 1};
      break;
    }
  }
  if (c.x_min < c.x_max && r.optimal == std::vector<Coins>{c.x_max} && delta.back() > 0) {
    r.kind = EquilibriumKind::boundary_max;
  } else if (c.x_min < c.x_max && r.optimal == std::vector<Coins>{c.x_min} && delta.front() < 0) {
    r.kind = EquilibriumKind::boundary_min;
  } else {
    r.kind = EquilibriumKind::interior;
  }
  return r;
}

std::string to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::interior: return "interior";
    case EquilibriumKind::boundary_min: return "boundary_min";
    case EquilibriumKind::boundary_max: return "boundary_max";
  }
  return "interior";
}

std::string to_string(Demand d) {
  switch (d) {
    case Demand::circular: return "circular";
    case Demand::circular_random: return "circular-random";
    case Demand::uniform: return "uniform";
  }
  return "circular";
}

Demand parse_demand(const std::string& s) {
  if (s == "circular") return Demand::circular;
  if (s == "circular-random") return Demand::circular_random;
  if (s == "uniform") return Demand::uniform;
  throw std::invalid_argument("unknown demand '" + s + "' (expected circular, circular-random or uniform)");
}

namespace {

struct Hop {
  std::size_t channel;
  std::size_t slot;  // sending side
};

// Cheapest path by (price, hops); nullopt if the target is unreachable.
std::optional<std::vector<Hop>> cheapest_path(const ChannelGraph& g, const std::vector<std::vector<Coins>>& values,
                                              const TierSchedule& tiers, bool disclose,
                                              const std::set<std::pair<std::size_t, std::size_t>>& excluded,
                                              NodeIndex source, NodeIndex target) {
  using Key = std::tuple<std::int64_t, std::size_t, NodeIndex>;
  const auto n = g.node_count();
  const Key inf{std::numeric_limits<std::int64_t>::max(), 0, 0};
  std::vector<Key> best(n, inf);
  std::vector<std::optional<Hop>> via(n);
  std::priority_queue<Key, std::vector<Key>, std::greater<>> q;
  best[source] = {0, 0, source};
  q.push(best[source]);
  while (!q.empty()) {
    auto [cost, hops, u] = q.top();
    q.pop();
    if (Key{cost, hops, u} != best[u]) continue;
    if (u == target) break;
    for (auto e : g.incident(u)) {
      const auto slot = *g.channel(e).slot_of(u);
      if (excluded.count({e, slot})) continue;
      const auto local = values[e][slot];
      Coins priced_at = local;
      if (disclose) {
        if (local < 1) continue;
      } else {
        priced_at = (g.channel(e).capacity + 1) / 2;
      }
      const auto v = g.channel(e).endpoints[1 - slot];
      Key cand{cost + tiers.at(e, slot, priced_at), hops + 1, v};
      if (std::tie(std::get<0>(cand), std::get<1>(cand)) < std::tie(std::get<0>(best[v]), std::get<1>(best[v]))) {
        best[v] = cand;
        via[v] = Hop{e, slot};
        q.push(cand);
      }
    }
  }
  if (source != target && !via[target]) return std::nullopt;
  std::vector<Hop> path;
  for (auto v = target; v != source;) {
    auto h = *via[v];
    path.push_back(h);
    v = g.channel(h.channel).endpoints[h.slot];
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

SimulationSeries routing_simulation(const ChannelGraph& g, const LiquidityState& start, const TierSchedule& tiers,
                                    const SimulationConfig& config, Rng& rng) {
  if (!g.all_two_party()) throw std::invalid_argument("routing simulation needs a 2-party graph");
  if (g.node_count() < 2) throw std::invalid_argument("routing simulation needs at least two nodes");
  if (config.max_attempts == 0) throw std::invalid_argument("at least one attempt per payment is required");
  tiers.validate(g);
  SimulationSeries s;
  s.initial = start;
  s.channel_flow.assign(g.channel_count(), {0, 0});
  s.node_fees.assign(g.node_count(), 0);
  auto values = start.values();
  const auto n = g.node_count();
  for (std::size_t step = 0; step < config.steps; ++step) {
    StepRecord r;
    r.step = step;
    if (config.demand == Demand::circular) {
      r.source = step % n;
      r.target = (r.source + 1) % n;
    } else if (config.demand == Demand::circular_random) {
      r.source = static_cast<NodeIndex>(rng.below(n));
      r.target = (r.source + 1) % n;
    } else {
      r.source = static_cast<NodeIndex>(rng.below(n));
      r.target = static_cast<NodeIndex>(rng.below(n - 1));
      if (r.target >= r.source) ++r.target;
    }
    std::set<std::pair<std::size_t, std::size_t>> excluded;
    while (r.attempts < config.max_attempts) {
      auto path = cheapest_path(g, values, tiers, config.disclose, excluded, r.source, r.target);
      if (!path) break;
      ++r.attempts;
      auto blocked = std::find_if(path->begin(), path->end(), [&](const Hop& h) { return values[h.channel][h.slot] < 1; });
      if (blocked != path->end()) {
        excluded.insert({blocked->channel, blocked->slot});
        continue;
      }
      for (const auto& h : *path) {
        const auto price = tiers.at(h.channel, h.slot, values[h.channel][h.slot]);
        r.fee += price;
        s.node_fees[g.channel(h.channel).endpoints[h.slot]] += price;
        r.credits.push_back({g.channel(h.channel).endpoints[h.slot], price});
        --values[h.channel][h.slot];
        ++values[h.channel][1 - h.slot];
        auto& flow = s.channel_flow[h.channel];
        ++(h.slot == 0 ? flow.first : flow.second);
      }
      r.success = true;
      r.hops = path->size();
      break;
    }
    r.liquidity.resize(g.channel_count());
    for (std::size_t e = 0; e < g.channel_count(); ++e) r.liquidity[e] = values[e][0];
    s.steps.push_back(std::move(r));
  }
  return s;
}

std::optional<std::size_t> steady_state_start(const ChannelGraph& g, const SimulationSeries& series,
                                              std::size_t window, double tol) {
  if (window == 0) throw std::invalid_argument("steady-state window must be positive");
  const auto m = g.channel_count();
  auto mean = [&](std::size_t from) {
    std::vector<double> avg(m, 0.0);
    for (std::size_t t = from; t < from + window; ++t) {
      for (std::size_t e = 0; e < m; ++e) avg[e] += static_cast<double>(series.steps[t].liquidity[e]);
    }
    for (auto& a : avg) a /= static_cast<double>(window);
    return avg;
  };
  for (std::size_t s = window; s + window <= series.steps.size(); s += window) {
    auto before = mean(s - window);
    auto after = mean(s);
    bool calm = true;
    for (std::size_t e = 0; e < m; ++e) {
      calm = calm && std::abs(after[e] - before[e]) < tol * static_cast<double>(g.channel(e).capacity);
    }
    if (calm) return s;
  }
  return std::nullopt;
}

LiquiditySummary summarize_liquidity(const ChannelGraph& g, const SimulationSeries& series, std::size_t window,
                                     double tol) {
  if (series.steps.empty()) throw std::invalid_argument("cannot summarize an empty series");
  LiquiditySummary out;
  auto start = steady_state_start(g, series, window, tol);
  out.steady = start.has_value();
  out.from_step = start.value_or(series.steps.size() / 2);
  const auto m = g.channel_count();
  out.node_fees.assign(g.node_count(), 0);
  std::vector<std::vector<double>> rel(m);
  std::size_t in_narrow = 0;
  std::size_t in_wide = 0;
  for (std::size_t t = out.from_step; t < series.steps.size(); ++t) {
    const auto& r = series.steps[t];
    ++out.payments;
    out.successes += r.success ? 1 : 0;
    out.network_fees += r.fee;
    for (const auto& [v, fee] : r.credits) out.node_fees[v] += fee;
    for (std::size_t e = 0; e < m; ++e) {
      const double x = static_cast<double>(r.liquidity[e]) / static_cast<double>(g.channel(e).capacity);
      rel[e].push_back(x);
      in_narrow += (x >= 0.4 && x <= 0.6) ? 1 : 0;
      in_wide += (x >= 0.1 && x <= 0.9) ? 1 : 0;
    }
  }
  for (std::size_t e = 0; e < m; ++e) {
    auto& v = rel[e];
    std::sort(v.begin(), v.end());
    const auto k = v.size();
    out.median_relative.push_back(k % 2 ? v[k / 2] : (v[k / 2 - 1] + v[k / 2]) / 2.0);
  }
  const double samples = static_cast<double>(out.payments * m);
  out.band_40_60 = samples > 0 ? static_cast<double>(in_narrow) / samples : 0.0;
  out.band_10_90 = samples > 0 ? static_cast<double>(in_wide) / samples : 0.0;
  return out;
}

ChannelGraph cycle_benchmark(std::size_t n, Coins cap) {
  if (n < 3) throw std::invalid_argument("a cycle needs at least three nodes");
  std::vector<std::pair<std::vector<NodeIndex>, Coins>> ch;
  for (NodeIndex v = 0; v < n; ++v) ch.push_back({{v, (v + 1) % n}, cap});
  return ChannelGraph::from_indices(n, ch);
}

}  // namespace pcn
