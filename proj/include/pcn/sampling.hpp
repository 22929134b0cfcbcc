#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pcn/network.hpp"
#include "pcn/random.hpp"
#include "pcn/rational.hpp"

namespace pcn {

/// Monte Carlo estimate of a probability with its binomial standard error.
struct EstimatorReport {
  double estimate = 0.0;
  std::uint64_t sample_count = 0;
  std::uint64_t hits = 0;
  double standard_error = 0.0;
  std::uint64_t seed = 0;
};

EstimatorReport make_report(std::uint64_t hits, std::uint64_t samples, std::uint64_t seed);

/// Payment workload: amount drawn uniformly from amounts, (payer, payee)
/// drawn uniformly from pairs, or from all ordered pairs when pairs is empty.
struct PaymentModel {
  std::vector<Coins> amounts;
  std::vector<std::pair<NodeIndex, NodeIndex>> pairs;

  static PaymentModel fixed_amount(Coins a) { return PaymentModel{{a}, {}}; }
  void validate(std::size_t node_count) const;
};

/// Knobs shared by the Monte Carlo estimators. Samples are processed in
/// chunks of chunk_size; chunk i draws from Rng(seed).split(i), so results
/// do not depend on the thread count.
struct SamplingOptions {
  std::uint64_t samples = 10'000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::uint64_t chunk_size = 1024;
  std::uint64_t retry_budget = 10'000;
};

/// |W(C, n)| = binom(C + n - 1, n - 1). Throws std::overflow_error past 64 bits.
std::uint64_t count_wealth_distributions(Coins total, std::size_t n);

/// Exactly uniform draw from W(C, n) via a uniform (n-1)-subset of the
/// C + n - 1 stars-and-bars positions.
WealthVector sample_wealth(Coins total, std::size_t n, Rng& rng);

/// Calls visit on every point of W(C, n) in lexicographic order.
template <typename Visit>
void for_each_wealth(Coins total, std::size_t n, Visit&& visit);

/// Exact relative volume |W_G| / |W(C, n)| by enumeration.
Rational exact_r(const ChannelGraph& g, std::uint64_t max_points = 10'000'000);

EstimatorReport estimate_r(const ChannelGraph& g, const SamplingOptions& opt);

/// Uniform draw from the feasible wealth region by rejection. Throws
/// std::runtime_error when the retry budget is exhausted.
WealthVector sample_feasible_wealth(const ChannelGraph& g, Rng& rng, std::uint64_t retry_budget);

/// Infeasible-payment rate for a uniformly drawn feasible wealth and a
/// payment drawn from model. A payer that cannot cover the amount counts as
/// an infeasible payment.
EstimatorReport estimate_rho(const ChannelGraph& g, const PaymentModel& model, const SamplingOptions& opt);

/// Exact rate over all feasible wealth vectors, pairs and amounts.
Rational exact_rho(const ChannelGraph& g, const PaymentModel& model, std::uint64_t max_points = 10'000'000);

/// Sustainable off-chain rate S = zeta / rho; nullopt means unbounded (rho = 0).
std::optional<double> throughput(double zeta, double rho);
std::optional<Rational> throughput(const Rational& zeta, const Rational& rho);

}  // namespace pcn

namespace pcn {

template <typename Visit>
void for_each_wealth(Coins total, std::size_t n, Visit&& visit) {
  std::vector<Coins> w(n, 0);
  auto rec = [&](auto&& self, std::size_t i, Coins left) -> void {
    if (i + 1 == n) {
      w[i] = left;
      visit(static_cast<const std::vector<Coins>&>(w));
      return;
    }
    for (Coins x = 0; x <= left; ++x) {
      w[i] = x;
      self(self, i + 1, left - x);
    }
  };
  if (n > 0) rec(rec, 0, total);
}

}  // namespace pcn
