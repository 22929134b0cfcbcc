#include "doctest.h"

#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "pcn/replenishment.hpp"

using namespace pcn;

namespace {

std::vector<double> coords_from_first(const ChannelGraph& g, const std::vector<Coins>& first) {
  std::vector<double> x;
  for (std::size_t e = 0; e < g.channel_count(); ++e) {
    x.push_back(static_cast<double>(first[e]));
    x.push_back(static_cast<double>(g.channel(e).capacity - first[e]));
  }
  return x;
}

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

std::vector<std::vector<Coins>> fiber_of(const ChannelGraph& g, const LiquidityState& lam) {
  const auto omega = testing::wealth_from_first(g, lam.first_endpoint_coordinates());
  std::vector<std::vector<Coins>> out;
  for (const auto& x : testing::all_states_first(g)) {
    if (testing::wealth_from_first(g, x) == omega) out.push_back(x);
  }
  return out;
}

// x lies on the real fiber: box and wealth of every node.
void check_on_polytope(const ChannelGraph& g, const LiquidityState& lam, const std::vector<double>& x) {
  std::vector<double> w(g.node_count(), 0.0);
  for (std::size_t e = 0; e < g.channel_count(); ++e) {
    const auto c = static_cast<double>(g.channel(e).capacity);
    CHECK(x[2 * e] >= -1e-9);
    CHECK(x[2 * e + 1] >= -1e-9);
    CHECK(x[2 * e] + x[2 * e + 1] == doctest::Approx(c).epsilon(1e-9));
    w[g.channel(e).endpoints[0]] += x[2 * e];
    w[g.channel(e).endpoints[1]] += x[2 * e + 1];
  }
  const auto omega = testing::wealth_from_first(g, lam.first_endpoint_coordinates());
  for (std::size_t v = 0; v < g.node_count(); ++v) CHECK(std::abs(w[v] - static_cast<double>(omega[v])) < 1e-6);
}

// The fiber polytope has integral vertices, so x is the projection iff
// (x - x0) . (q - x) >= 0 for every integer fiber point q.
void check_projection(const ChannelGraph& g, const std::vector<std::vector<Coins>>& fiber, const std::vector<double>& x,
                      const std::vector<double>& x0) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& f : fiber) {
    auto q = coords_from_first(g, f);
    double ip = 0;
    for (std::size_t i = 0; i < x.size(); ++i) ip += (x[i] - x0[i]) * (q[i] - x[i]);
    worst = std::min(worst, ip);
  }
  CHECK(worst >= -1e-6);
}

double brute_best(const ChannelGraph& g, const std::vector<std::vector<Coins>>& fiber, const std::vector<double>& x0) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : fiber) best = std::min(best, dist2(coords_from_first(g, f), x0));
  return best;
}

}  // namespace

TEST_CASE("triangle projection matches the segment formula") {
  const auto g = testing::triangle();
  for (Coins t = 0; t <= 3; ++t) {
    const auto lam = testing::triangle_state(t);
    ReplenishmentProblem prob(g, lam);
    auto r = continuous_relaxation(prob);
    // Fiber is (s, 3 + s, 5 - s) for s in [0, 3] in first-endpoint terms.
    double best_s = 0, best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 300000; ++i) {
      const double s = 3.0 * i / 300000.0;
      std::vector<double> x{s, 3 - s, 3 + s, 4 - s, 5 - s, 6 + s};
      const double d = dist2(x, prob.target);
      if (d < best) {
        best = d;
        best_s = s;
      }
    }
    CHECK(r.x[0] == doctest::Approx(best_s).epsilon(1e-4));
    CHECK(r.x[2] == doctest::Approx(3 + best_s).epsilon(1e-4));
    check_on_polytope(g, lam, r.x);
  }
}

TEST_CASE("trees have a one-point fiber") {
  const auto g = testing::alice_bob_carol();
  auto lam = LiquidityState::from_first_endpoint(g, std::vector<Coins>{10, 0});
  ReplenishmentProblem prob(g, lam);
  auto res = replenish(prob);
  CHECK(res.x_int == lam);
  CHECK(res.x_rho == coordinates(lam));
  CHECK(res.circulation == Circulation::zero(g.channel_count()));
}

TEST_CASE("a target inside the fiber is returned exactly") {
  const auto g = testing::triangle();
  const auto lam = testing::triangle_state(0);
  const auto other = testing::triangle_state(2);
  ReplenishmentProblem prob(g, lam, coordinates(other));
  auto res = replenish(prob);
  CHECK(res.dist_rho == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(res.x_int == other);
  CHECK(res.dist_int == 0.0);
  CHECK(res.delta == 1);
}

TEST_CASE("delta radius") {
  std::vector<double> a{0, 0, 0, 0}, b{0, 0, 0, 0};
  CHECK(delta_radius(a, b, 2) == 1);
  b = {4, 0, 0, 0};  // distance 4 = 2 * m, sqrt(2) + 1 rounds up to 3
  CHECK(delta_radius(a, b, 2) == 3);
  b = {8, 0, 0, 0};  // sqrt(4) + 1 is exactly 3
  CHECK(delta_radius(a, b, 2) == 3);
}

TEST_CASE("random small graphs against exhaustive fibers") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(rng.between(3, 5));
    const auto m = static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(n), static_cast<std::int64_t>(n + 2)));
    auto g = testing::random_connected(rng, n, m, 5);
    std::vector<Coins> first;
    for (const auto& ch : g.channels()) first.push_back(rng.between(0, ch.capacity));
    auto lam = LiquidityState::from_first_endpoint(g, first);
    std::vector<double> x0;
    for (const auto& ch : g.channels()) {
      // Half the trials use fractional targets off the a + b = c plane.
      const bool frac = trial % 2 == 1;
      for (int i = 0; i < 2; ++i) {
        const auto c = static_cast<double>(ch.capacity);
        x0.push_back(frac ? c * static_cast<double>(rng.below(1000)) / 999.0 : static_cast<double>(rng.between(0, ch.capacity)));
      }
    }
    ReplenishmentProblem prob(g, lam, x0);
    const auto fiber = fiber_of(g, lam);
    const double best = brute_best(g, fiber, x0);

    auto res = replenish(prob);
    check_on_polytope(g, lam, res.x_rho);
    check_projection(g, fiber, res.x_rho, x0);
    CHECK(res.dist_rho * res.dist_rho <= best + 1e-6);

    CHECK(wealth_of(g, res.x_int) == wealth_of(g, lam));
    CHECK(res.dist_int >= res.dist_rho - 1e-6);
    CHECK(res.dist_int * res.dist_int >= best - 1e-6);
    if (!res.log.empty()) CHECK(res.delta_used > res.delta);

    auto opt = integer_optimum(prob);
    CHECK(wealth_of(g, opt) == wealth_of(g, lam));
    CHECK(dist2(coordinates(opt), x0) == doctest::Approx(best).epsilon(1e-9));

    auto rep = replenish_report(prob, res);
    Coins moved = 0;
    for (std::size_t e = 0; e < g.channel_count(); ++e) moved += 2 * std::abs(res.x_int.at(e, 0) - first[e]);
    CHECK(rep.moved_fraction == doctest::Approx(static_cast<double>(moved) / (2.0 * static_cast<double>(g.total_capacity()))));
    CHECK(apply_circulation(g, lam, res.circulation) == res.x_int);
  }
}

TEST_CASE("repair stays in the cube when it succeeds") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = testing::random_connected(rng, 6, 9, 20);
    std::vector<Coins> first;
    for (const auto& ch : g.channels()) first.push_back(rng.between(0, ch.capacity));
    auto lam = LiquidityState::from_first_endpoint(g, first);
    ReplenishmentProblem prob(g, lam);
    auto relaxed = continuous_relaxation(prob);
    const auto delta = delta_radius(relaxed.x, prob.target, g.channel_count());
    auto rep = integer_repair(prob, relaxed.x, delta);
    CHECK(rep.log.size() == rep.widenings + (rep.fell_back ? 1 : 0));
    if (!rep.fell_back) {
      for (std::size_t e = 0; e < g.channel_count(); ++e) {
        CHECK(std::abs(static_cast<double>(rep.x.at(e, 0)) - relaxed.x[2 * e]) <= static_cast<double>(rep.delta) + 1e-9);
      }
    }
    CHECK(relaxed.kkt_residual < 1e-6);
  }
}

TEST_CASE("band fractions") {
  NetworkDescription d;
  d.nodes = {"a", "b", "c", "d", "e"};
  d.channels = {{{"a", "b"}, 10, "p"}, {{"a", "c"}, 10, "q"}, {{"a", "d"}, 10, "r"}, {{"a", "e"}, 10, "s"}};
  auto g = ChannelGraph::build(d);
  auto lam = LiquidityState::from_first_endpoint(g, std::vector<Coins>{5, 4, 1, 0});
  auto b = band_fractions(g, lam);
  CHECK(b.narrow == doctest::Approx(0.5));
  CHECK(b.wide == doctest::Approx(0.75));
}

TEST_CASE("validation") {
  const auto g = testing::triangle();
  const auto lam = testing::triangle_state(1);
  CHECK_THROWS_AS(ReplenishmentProblem(g, lam, std::vector<double>{1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(ReplenishmentProblem(g, lam, std::vector<double>{-1, 4, 0, 7, 0, 11}), std::invalid_argument);
  ReplenishmentProblem prob(g, lam);
  CHECK_THROWS_AS(integer_repair(prob, coordinates(lam), 0), std::invalid_argument);
}
