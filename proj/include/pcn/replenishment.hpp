#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcn/fibers.hpp"
#include "pcn/network.hpp"

namespace pcn {

/// Find the state in the fiber of lam closest to a target. Coordinates are
/// 2m-dimensional: x[2e] is the first endpoint's balance on e, x[2e+1] the
/// second's. 2-party graphs only.
struct ReplenishmentProblem {
  ChannelGraph g;
  LiquidityState lam;
  std::vector<double> target;

  /// Target defaults to the balanced state (floor / ceil halves).
  ReplenishmentProblem(ChannelGraph graph, LiquidityState current);
  ReplenishmentProblem(ChannelGraph graph, LiquidityState current, std::vector<double> x0);

  void validate() const;
};

std::vector<double> coordinates(const LiquidityState& lam);
double distance(const std::vector<double>& a, const std::vector<double>& b);

struct RelaxationResult {
  std::vector<double> x;  // 2m coordinates
  double kkt_residual = 0.0;
  std::size_t iterations = 0;
  bool polished = false;
};

/// Euclidean projection of the target onto the real fiber polytope:
/// Dykstra alternating projections between the affine hull (cycle space
/// orthonormalized with Eigen) and the box, stopped when an iteration moves
/// less than tol, then polished by solving the equality-constrained
/// least-squares problem on the detected active set.
RelaxationResult continuous_relaxation(const ReplenishmentProblem& prob, double tol = 1e-9,
                                       std::size_t max_iterations = 1'000'000);

/// ceil(sqrt(||x_rho - x0||_2 / m) + 1), at least 1.
Coins delta_radius(const std::vector<double>& x_rho, const std::vector<double>& x0, std::size_t m);

struct RepairResult {
  LiquidityState x;
  Coins delta = 1;        // radius the result satisfies
  std::size_t widenings = 0;
  bool fell_back = false;  // returned the current state
  std::vector<std::string> log;
};

/// Rounds the cycle coordinates of x_rho (relative to lam) to integers, which
/// keeps every node's wealth, then improves by +-1 pushes along fundamental
/// cycles: first out of box violations, then into the delta cube, then
/// toward the target. The cube doubles up to six times before the current
/// state is returned.
RepairResult integer_repair(const ReplenishmentProblem& prob, const std::vector<double>& x_rho, Coins delta);

/// Exact integer optimum by separable convex min-cost circulation on the
/// unit-expanded liquidity network of lam.
LiquidityState integer_optimum(const ReplenishmentProblem& prob);

struct ReplenishmentResult {
  std::vector<double> x_rho;
  LiquidityState x_int;
  Coins delta = 1;
  Coins delta_used = 1;
  double dist_rho = 0.0;
  double dist_int = 0.0;
  Circulation circulation;
  double kkt_residual = 0.0;
  std::vector<std::string> log;
};

ReplenishmentResult replenish(const ReplenishmentProblem& prob);

struct BandFractions {
  double narrow = 0.0;  // relative liquidity of the first endpoint in [0.4, 0.6]
  double wide = 0.0;    // in [0.1, 0.9]
};

BandFractions band_fractions(const ChannelGraph& g, const LiquidityState& lam);

struct ReplenishmentReport {
  BandFractions before;
  BandFractions after;
  /// sum |x_int - lam| over all 2m coordinates / (2 C).
  double moved_fraction = 0.0;
  Circulation circulation;
};

ReplenishmentReport replenish_report(const ReplenishmentProblem& prob, const ReplenishmentResult& result);

}  // namespace pcn
