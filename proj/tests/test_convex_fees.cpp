#include "doctest.h"

#include <cmath>

#include "fixtures.hpp"
#include "pcn/convex_fees.hpp"
#include "pcn/depletion.hpp"

using namespace pcn;

namespace {

// Phi by summing every unit of every side separately.
std::int64_t phi_oracle(const ChannelGraph& g, const LiquidityState& lam, const TierSchedule& tiers) {
  std::int64_t phi = 0;
  for (std::size_t e = 0; e < g.channel_count(); ++e) {
    for (std::size_t i = 0; i < 2; ++i) {
      std::int64_t side = 0;
      for (Coins t = lam.at(e, i); t >= 1; --t) side += tiers.price[e][i][static_cast<std::size_t>(t)];
      phi += side;
    }
  }
  return phi;
}

TierSchedule random_tiers(const ChannelGraph& g, Rng& rng) {
  std::vector<std::vector<std::vector<std::int64_t>>> price;
  for (const auto& c : g.channels()) {
    std::vector<std::vector<std::int64_t>> sides;
    for (int i = 0; i < 2; ++i) {
      std::vector<std::int64_t> p(static_cast<std::size_t>(c.capacity) + 1);
      std::int64_t level = rng.between(0, 60);
      for (auto& x : p) {
        x = level;
        level = std::max<std::int64_t>(0, level - rng.between(0, 5));
      }
      sides.push_back(p);
    }
    price.push_back(sides);
  }
  return TierSchedule::custom(g, price);
}

}  // namespace

TEST_CASE("tier schedules") {
  auto g = cycle_benchmark(3, 100);
  auto lin = TierSchedule::linear(g, 100);
  CHECK(lin.at(0, 0, 0) == 100);
  CHECK(lin.at(2, 1, 100) == 100);

  auto quad = TierSchedule::quadratic(g, 100);
  // At half capacity the next unit costs ppm + ppm / c.
  CHECK(quad.at(0, 0, 50) == 101);
  for (Coins t = 0; t <= 100; ++t) {
    const Coins x = 100 - t;  // units already sent out of a full side
    CHECK(quad.at(1, 1, t) == ((x + 1) * (x + 1) - x * x));
  }

  auto odd = ChannelGraph::from_indices(2, {{{0, 1}, 7}});
  auto q = TierSchedule::quadratic(odd, 30);
  for (Coins t = 0; t <= 7; ++t) {
    auto F = [](Coins x) { return 30 * x * x / 7; };
    CHECK(q.at(0, 0, t) == F(8 - t) - F(7 - t));
  }
  CHECK_THROWS_AS(TierSchedule::quadratic(ChannelGraph::from_indices(2, {{{0, 1}, 9}}), 1), std::invalid_argument);
  CHECK_THROWS_AS(TierSchedule::custom(odd, {{{1, 2, 2, 2, 2, 2, 2, 2}, {0, 0, 0, 0, 0, 0, 0, 0}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(TierSchedule::custom(odd, {{{1, 1}, {0, 0}}}), std::invalid_argument);
  CHECK(parse_tier_kind("quadratic") == TierKind::quadratic);
  CHECK_THROWS_AS(parse_tier_kind("cubic"), std::invalid_argument);
}

TEST_CASE("potential_phi") {
  auto g = testing::triangle();
  std::vector<Coins> zero{0, 0, 0};
  auto lin = TierSchedule::linear(g, 9);
  // Every coin is counted once at the constant price.
  CHECK(potential_phi(g, testing::triangle_state(2), lin) == 9 * 21);

  auto empty = ChannelGraph::from_indices(2, {{{0, 1}, 4}});
  std::vector<Coins> first{0};
  auto lam = LiquidityState::from_first_endpoint(empty, first);
  auto t = TierSchedule::custom(empty, {{{5, 5, 4, 3, 2}, {0, 0, 0, 0, 0}}});
  CHECK(potential_phi(empty, lam, t) == 0);

  Rng rng(301);
  for (int trial = 0; trial < 100; ++trial) {
    auto rg = testing::random_connected(rng, 5, 7, 12);
    auto tiers = random_tiers(rg, rng);
    std::vector<Coins> x(rg.channel_count());
    for (std::size_t e = 0; e < x.size(); ++e) x[e] = rng.between(0, rg.channel(e).capacity);
    auto s = LiquidityState::from_first_endpoint(rg, x);
    CHECK(potential_phi(rg, s, tiers) == phi_oracle(rg, s, tiers));
  }
}

TEST_CASE("cycle interval") {
  auto g = testing::triangle();
  // x -> y -> z: x holds 0 on e, so nothing can move forward.
  auto c = cycle_state(g, testing::triangle_state(0), {0, 1, 2});
  CHECK(c.x_max == 0);
  CHECK(c.x_min == -3);
  auto back = cycle_state(g, testing::triangle_state(0), {0, 2, 1});
  CHECK(back.x_min == 0);
  CHECK(back.x_max == 3);
  CHECK(push_along(g, testing::triangle_state(0), back, 2) == testing::triangle_state(2));
  CHECK_THROWS_AS(cycle_state(g, testing::triangle_state(0), {0, 1, 0, 2}), std::invalid_argument);
  auto path = testing::alice_bob_carol();
  std::vector<Coins> first{2, 3};
  CHECK_THROWS_AS(cycle_state(path, LiquidityState::from_first_endpoint(path, first), {0, 1, 2}),
                  std::invalid_argument);
}

TEST_CASE("delta_C: identity with Phi and monotonicity") {
  Rng rng(302);
  int instances = 0;
  while (instances < 100) {
    const auto n = static_cast<std::size_t>(rng.between(3, 5));
    auto g = cycle_benchmark(n, 1);
    std::vector<std::pair<std::vector<NodeIndex>, Coins>> ch;
    for (NodeIndex v = 0; v < n; ++v) ch.push_back({{v, (v + 1) % n}, rng.between(1, 15)});
    g = ChannelGraph::from_indices(n, ch);
    auto tiers = random_tiers(g, rng);
    std::vector<Coins> x(n);
    for (std::size_t e = 0; e < n; ++e) x[e] = rng.between(0, g.channel(e).capacity);
    auto lam = LiquidityState::from_first_endpoint(g, x);
    std::vector<NodeIndex> cycle(n);
    for (NodeIndex v = 0; v < n; ++v) cycle[v] = v;
    if (rng.below(2)) std::reverse(cycle.begin(), cycle.end());
    auto c = cycle_state(g, lam, cycle);
    std::int64_t prev = std::numeric_limits<std::int64_t>::max();
    for (Coins k = c.x_min; k < c.x_max; ++k) {
      const auto d = delta_C(g, lam, tiers, cycle, k);
      CHECK(d == phi_oracle(g, push_along(g, lam, c, k + 1), tiers) - phi_oracle(g, push_along(g, lam, c, k), tiers));
      CHECK(d <= prev);
      prev = d;
    }
    CHECK_THROWS_AS(delta_C(g, lam, tiers, cycle, c.x_max), std::out_of_range);
    ++instances;
  }
}

TEST_CASE("delta_C with constant tiers is constant") {
  auto g = testing::triangle();
  FeeSchedule fees{{{10, 1}, {7, 3}, {2, 20}}};
  auto lin = TierSchedule::linear(g, fees);
  auto lam = testing::triangle_state(0);
  for (Coins k = 0; k < 3; ++k) CHECK(delta_C(g, lam, lin, {0, 2, 1}, k) == delta_C(g, lam, lin, {0, 2, 1}, 0));
  // Constant prices: the gain is minus the fee gap of the orientation.
  CHECK(delta_C(g, lam, lin, {0, 2, 1}, 0) == -cycle_fee_gap(g, fees, {0, 2, 1}));
}

TEST_CASE("cycle_equilibrium") {
  auto g = cycle_benchmark(3, 100);
  auto balanced = balanced_state(g);
  auto quad = cycle_equilibrium(g, balanced, TierSchedule::quadratic(g, 100), {0, 1, 2});
  CHECK(quad.kind == EquilibriumKind::interior);
  REQUIRE(!quad.optimal.empty());
  for (auto x : quad.optimal) CHECK(std::abs(x) <= 1);
  REQUIRE(quad.bracket);

  // Brute-force scan of Phi over the interval.
  auto tiers = TierSchedule::quadratic(g, 100);
  auto c = cycle_state(g, balanced, {0, 1, 2});
  std::int64_t best = std::numeric_limits<std::int64_t>::min();
  std::vector<Coins> arg;
  for (Coins x = c.x_min; x <= c.x_max; ++x) {
    auto phi = potential_phi(g, push_along(g, balanced, c, x), tiers);
    if (phi > best) arg.clear();
    if (phi >= best) {
      best = phi;
      arg.push_back(x);
    }
  }
  CHECK(arg == quad.optimal);

  FeeSchedule gap{{{10, 1}, {7, 3}, {2, 20}}};
  auto lin = cycle_equilibrium(g, balanced, TierSchedule::linear(g, gap), {0, 1, 2});
  CHECK(cycle_fee_gap(g, gap, {0, 1, 2}) != 0);
  CHECK(lin.kind != EquilibriumKind::interior);
  CHECK(lin.optimal.size() == 1);
  CHECK((lin.optimal[0] == lin.x_min || lin.optimal[0] == lin.x_max));

  auto flat = cycle_equilibrium(g, balanced, TierSchedule::linear(g, 100), {0, 1, 2});
  CHECK(flat.kind == EquilibriumKind::interior);
  CHECK(flat.optimal.size() == static_cast<std::size_t>(flat.x_max - flat.x_min + 1));

  std::vector<Coins> stuck{0, 100, 50};
  auto degenerate = cycle_equilibrium(g, LiquidityState::from_first_endpoint(g, stuck), TierSchedule::quadratic(g, 100),
                                      {0, 1, 2});
  CHECK(degenerate.x_min == 0);
  CHECK(degenerate.x_max == 0);
  CHECK(degenerate.kind == EquilibriumKind::interior);
  CHECK(degenerate.optimal == std::vector<Coins>{0});
}

TEST_CASE("cycle_equilibrium agrees with a Phi scan on random tiers") {
  Rng rng(303);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::pair<std::vector<NodeIndex>, Coins>> ch;
    for (NodeIndex v = 0; v < 4; ++v) ch.push_back({{v, (v + 1) % 4}, rng.between(1, 12)});
    auto g = ChannelGraph::from_indices(4, ch);
    auto tiers = random_tiers(g, rng);
    std::vector<Coins> x(4);
    for (std::size_t e = 0; e < 4; ++e) x[e] = rng.between(0, g.channel(e).capacity);
    auto lam = LiquidityState::from_first_endpoint(g, x);
    auto eq = cycle_equilibrium(g, lam, tiers, {0, 1, 2, 3});
    auto c = cycle_state(g, lam, {0, 1, 2, 3});
    std::int64_t best = std::numeric_limits<std::int64_t>::min();
    std::vector<Coins> arg;
    for (Coins k = c.x_min; k <= c.x_max; ++k) {
      auto phi = phi_oracle(g, push_along(g, lam, c, k), tiers);
      if (phi > best) arg.clear();
      if (phi >= best) {
        best = phi;
        arg.push_back(k);
      }
    }
    CHECK(eq.optimal == arg);
  }
}

TEST_CASE("routing_simulation basics") {
  auto g = cycle_benchmark(3, 100);
  Rng rng(304);
  SimulationConfig cfg;
  cfg.steps = 0;
  auto none = routing_simulation(g, balanced_state(g), TierSchedule::linear(g, 100), cfg, rng);
  CHECK(none.steps.empty());
  CHECK(none.initial == balanced_state(g));
  CHECK_THROWS_AS(summarize_liquidity(g, none), std::invalid_argument);

  cfg.steps = 2000;
  cfg.demand = Demand::uniform;
  auto s = routing_simulation(g, balanced_state(g), TierSchedule::quadratic(g, 100), cfg, rng);
  REQUIRE(s.steps.size() == 2000);
  std::int64_t total = 0;
  for (const auto& r : s.steps) {
    total += r.fee;
    CHECK(r.source != r.target);
    CHECK(r.liquidity.size() == 3);
  }
  std::int64_t credited = 0;
  for (auto f : s.node_fees) credited += f;
  CHECK(credited == total);

  Rng a(9), b(9);
  auto s1 = routing_simulation(g, balanced_state(g), TierSchedule::quadratic(g, 100), cfg, a);
  auto s2 = routing_simulation(g, balanced_state(g), TierSchedule::quadratic(g, 100), cfg, b);
  for (std::size_t i = 0; i < s1.steps.size(); ++i) CHECK(s1.steps[i].liquidity == s2.steps[i].liquidity);
}

TEST_CASE("summarize_liquidity on a constant series") {
  auto g = cycle_benchmark(3, 100);
  SimulationSeries s;
  s.initial = balanced_state(g);
  for (std::size_t t = 0; t < 1500; ++t) {
    StepRecord r;
    r.step = t;
    r.liquidity = {50, 50, 50};
    s.steps.push_back(r);
  }
  auto sum = summarize_liquidity(g, s);
  CHECK(sum.steady);
  CHECK(sum.from_step == 500);
  for (auto m : sum.median_relative) CHECK(m == 0.5);
  CHECK(sum.band_40_60 == 1.0);
}

TEST_CASE("linear versus quadratic on the three-node cycle") {
  auto g = cycle_benchmark(3, 100);
  SimulationConfig lin_cfg;
  lin_cfg.disclose = false;
  SimulationConfig quad_cfg;
  Rng r1(2024), r2(2024);
  auto lin = routing_simulation(g, balanced_state(g), TierSchedule::linear(g, 100), lin_cfg, r1);
  auto quad = routing_simulation(g, balanced_state(g), TierSchedule::quadratic(g, 100), quad_cfg, r2);
  auto ls = summarize_liquidity(g, lin);
  auto qs = summarize_liquidity(g, quad);
  bool depleted = false;
  for (auto m : ls.median_relative) depleted = depleted || m < 0.1 || m > 0.9;
  CHECK(depleted);
  for (auto m : qs.median_relative) CHECK((m >= 0.25 && m <= 0.75));
  std::int64_t lin_total = 0, quad_total = 0;
  for (const auto& r : lin.steps) lin_total += r.fee;
  for (const auto& r : quad.steps) quad_total += r.fee;
  const double diff = std::abs(double(lin_total - quad_total)) / std::max(double(lin_total), double(quad_total));
  CHECK(diff < 0.25);
  MESSAGE("linear medians " << ls.median_relative[0] << " " << ls.median_relative[1] << " " << ls.median_relative[2]
                            << ", quadratic " << qs.median_relative[0] << " " << qs.median_relative[1] << " "
                            << qs.median_relative[2] << ", fees " << lin_total << " vs " << quad_total);
}
