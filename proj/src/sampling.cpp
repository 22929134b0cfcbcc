#include "pcn/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "pcn/feasibility.hpp"
#include "pcn/parallel.hpp"

namespace pcn {

EstimatorReport make_report(std::uint64_t hits, std::uint64_t samples, std::uint64_t seed) {
  EstimatorReport r;
  r.hits = hits;
  r.sample_count = samples;
  r.seed = seed;
  r.estimate = samples == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(samples);
  r.standard_error = samples == 0 ? 0.0 : std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(samples));
  return r;
}

void PaymentModel::validate(std::size_t node_count) const {
  if (amounts.empty()) throw std::invalid_argument("payment model needs at least one amount");
  for (auto a : amounts) {
    if (a < 0) throw std::invalid_argument("payment amounts must be nonnegative");
  }
  if (pairs.empty() && node_count < 2) throw std::invalid_argument("payments need at least two nodes");
  for (auto [i, j] : pairs) {
    if (i == j) throw std::invalid_argument("payer and payee must differ");
    if (i >= node_count || j >= node_count) throw std::invalid_argument("payment pair out of range");
  }
}

std::uint64_t count_wealth_distributions(Coins total, std::size_t n) {
  if (total < 0) throw std::invalid_argument("total must be nonnegative");
  if (n == 0) throw std::invalid_argument("need at least one node");
  return binomial(static_cast<std::uint64_t>(total) + n - 1, n - 1);
}

WealthVector sample_wealth(Coins total, std::size_t n, Rng& rng) {
  if (total < 0) throw std::invalid_argument("total must be nonnegative");
  if (n == 0) throw std::invalid_argument("need at least one node");
  const auto positions = static_cast<std::uint64_t>(total) + n - 1;
  const auto bars_needed = static_cast<std::uint64_t>(n - 1);
  // Floyd's algorithm: uniform subset of bars_needed positions.
  std::set<std::uint64_t> bars;
  for (auto j = positions - bars_needed; j < positions; ++j) {
    auto t = rng.below(j + 1);
    if (!bars.insert(t).second) bars.insert(j);
  }
  std::vector<Coins> omega;
  omega.reserve(n);
  std::int64_t prev = -1;
  for (auto b : bars) {
    omega.push_back(static_cast<Coins>(static_cast<std::int64_t>(b) - prev - 1));
    prev = static_cast<std::int64_t>(b);
  }
  omega.push_back(static_cast<Coins>(static_cast<std::int64_t>(positions) - prev - 1));
  return WealthVector(std::move(omega));
}

Rational exact_r(const ChannelGraph& g, std::uint64_t max_points) {
  const auto total = count_wealth_distributions(g.total_capacity(), g.node_count());
  if (total > max_points) throw std::length_error("too many wealth vectors to enumerate");
  std::uint64_t feasible = 0;
  for_each_wealth(g.total_capacity(), g.node_count(), [&](const std::vector<Coins>& w) {
    if (is_feasible(g, WealthVector(w)).feasible) ++feasible;
  });
  return Rational(BigInt(feasible), BigInt(total));
}

namespace {

template <typename PerSample>
std::uint64_t count_hits(const SamplingOptions& opt, PerSample&& per_sample) {
  if (opt.samples == 0) throw std::invalid_argument("sample count must be at least 1");
  if (opt.chunk_size == 0) throw std::invalid_argument("chunk size must be positive");
  const auto chunks = (opt.samples + opt.chunk_size - 1) / opt.chunk_size;
  std::vector<std::uint64_t> hits(chunks, 0);
  const Rng master(opt.seed);
  parallel_for(chunks, opt.threads, [&](std::uint64_t c) {
    auto rng = master.split(c);
    const auto begin = c * opt.chunk_size;
    const auto end = std::min(opt.samples, begin + opt.chunk_size);
    std::uint64_t h = 0;
    for (auto i = begin; i < end; ++i) h += per_sample(rng) ? 1 : 0;
    hits[c] = h;
  });
  return std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
}

std::pair<NodeIndex, NodeIndex> draw_pair(const PaymentModel& model, std::size_t n, Rng& rng) {
  if (!model.pairs.empty()) return model.pairs[rng.below(model.pairs.size())];
  auto i = static_cast<NodeIndex>(rng.below(n));
  auto j = static_cast<NodeIndex>(rng.below(n - 1));
  if (j >= i) ++j;
  return {i, j};
}

bool payment_fails(const ChannelGraph& g, const WealthVector& omega, NodeIndex i, NodeIndex j, Coins a) {
  if (omega[i] < a) return true;
  return !is_feasible(g, shifted_wealth(omega, i, j, a)).feasible;
}

}  // namespace

EstimatorReport estimate_r(const ChannelGraph& g, const SamplingOptions& opt) {
  const auto hits = count_hits(opt, [&](Rng& rng) {
    return is_feasible(g, sample_wealth(g.total_capacity(), g.node_count(), rng)).feasible;
  });
  return make_report(hits, opt.samples, opt.seed);
}

WealthVector sample_feasible_wealth(const ChannelGraph& g, Rng& rng, std::uint64_t retry_budget) {
  for (std::uint64_t attempt = 0; attempt < retry_budget; ++attempt) {
    auto w = sample_wealth(g.total_capacity(), g.node_count(), rng);
    if (is_feasible(g, w).feasible) return w;
  }
  throw std::runtime_error("rejection sampling exhausted its retry budget; the feasible region is too small");
}

EstimatorReport estimate_rho(const ChannelGraph& g, const PaymentModel& model, const SamplingOptions& opt) {
  model.validate(g.node_count());
  const auto hits = count_hits(opt, [&](Rng& rng) {
    auto omega = sample_feasible_wealth(g, rng, opt.retry_budget);
    auto [i, j] = draw_pair(model, g.node_count(), rng);
    auto a = model.amounts[rng.below(model.amounts.size())];
    return payment_fails(g, omega, i, j, a);
  });
  return make_report(hits, opt.samples, opt.seed);
}

Rational exact_rho(const ChannelGraph& g, const PaymentModel& model, std::uint64_t max_points) {
  model.validate(g.node_count());
  const auto n = g.node_count();
  if (count_wealth_distributions(g.total_capacity(), n) > max_points) {
    throw std::length_error("too many wealth vectors to enumerate");
  }
  auto pairs = model.pairs;
  if (pairs.empty()) {
    for (NodeIndex i = 0; i < n; ++i) {
      for (NodeIndex j = 0; j < n; ++j) {
        if (i != j) pairs.emplace_back(i, j);
      }
    }
  }
  std::uint64_t feasible_points = 0;
  std::uint64_t failures = 0;
  for_each_wealth(g.total_capacity(), n, [&](const std::vector<Coins>& w) {
    WealthVector omega(w);
    if (!is_feasible(g, omega).feasible) return;
    ++feasible_points;
    for (auto [i, j] : pairs) {
      for (auto a : model.amounts) failures += payment_fails(g, omega, i, j, a) ? 1 : 0;
    }
  });
  const auto trials = BigInt(feasible_points) * pairs.size() * model.amounts.size();
  return Rational(BigInt(failures), trials);
}

std::optional<double> throughput(double zeta, double rho) {
  if (zeta < 0) throw std::invalid_argument("zeta must be nonnegative");
  if (rho < 0 || rho > 1) throw std::invalid_argument("rho must lie in [0, 1]");
  if (rho == 0) return std::nullopt;
  return zeta / rho;
}

std::optional<Rational> throughput(const Rational& zeta, const Rational& rho) {
  if (zeta < 0) throw std::invalid_argument("zeta must be nonnegative");
  if (rho < 0 || rho > 1) throw std::invalid_argument("rho must lie in [0, 1]");
  if (rho == 0) return std::nullopt;
  return zeta / rho;
}

}  // namespace pcn
